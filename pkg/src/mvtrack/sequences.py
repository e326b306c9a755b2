"""Sequence ingestion, configuration files, run manifests and the
synthetic benchmark generator.

Sequences follow the usual benchmark layout: a directory of raster
frames (lexicographic order) plus a ground-truth file with one
"x y w h" line per frame (comma, space or tab separated).  Frames are
resized to the working resolution on load and ground-truth coordinates
are rescaled with them.
"""

import dataclasses
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .features import FeatureConfig, Frame
from .particles import MotionConfig
from .pipeline import TrackerConfig
from .solver import SolverConfig
from .templates import UpdateConfig

TOOL_VERSION = "mvtrack 0.1.0"

_RASTER_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".pgm")


@dataclass(frozen=True)
class SequenceSource:
    frames_dir: str
    gt_path: str
    name: str = ""


def load_ground_truth(path):
    """Parse boxes from lines of 4 numbers; delimiter-agnostic."""
    boxes = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.replace(",", " ").replace("\t", " ").split()
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 numbers, got {line!r}")
            try:
                boxes.append(tuple(float(v) for v in parts))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed number in {line!r}") from None
    if not boxes:
        raise ValueError(f"{path}: no ground-truth boxes")
    return boxes


def list_frame_files(frames_dir):
    frames_dir = Path(frames_dir)
    files = sorted(p for p in frames_dir.iterdir()
                   if p.suffix.lower() in _RASTER_SUFFIXES)
    if not files:
        raise ValueError(f"{frames_dir}: no raster frames found")
    return files


def source_resolution(frames_dir):
    """(width, height) of the undecoded first frame in a sequence directory."""
    with Image.open(list_frame_files(frames_dir)[0]) as img:
        return img.size


def load_sequence(source, size=(320, 240)):
    """Load and resize all frames; rescale ground truth to match.

    Returns (frames, boxes).  A frame/ground-truth count mismatch warns
    and truncates to the shorter length.
    """
    files = list_frame_files(source.frames_dir)
    boxes = load_ground_truth(source.gt_path)
    with Image.open(files[0]) as img:
        src_w, src_h = img.size
    sx, sy = size[0] / src_w, size[1] / src_h
    boxes = [(x * sx, y * sy, w * sx, h * sy) for x, y, w, h in boxes]
    if len(files) != len(boxes):
        warnings.warn(f"{source.frames_dir}: {len(files)} frames vs "
                      f"{len(boxes)} ground-truth lines; truncating")
        count = min(len(files), len(boxes))
        files, boxes = files[:count], boxes[:count]
    frames = [Frame.from_file(p, size=size) for p in files]
    return frames, boxes


# --- configuration files ------------------------------------------------

# key -> (target dataclass attribute path, parser)
def _parse_sigma(text):
    return "auto" if text == "auto" else float(text)


def _parse_views(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _parse_bool(text):
    if text.lower() in ("true", "1", "yes", "on"):
        return True
    if text.lower() in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONFIG_KEYS = {
    "lambda": ("lam", float),
    "gamma": ("gamma", float),
    "alpha": ("alpha", float),
    "n": ("n", int),
    "N": ("n_templates", int),
    "seed": ("seed", int),
    "width": ("width", int),
    "height": ("height", int),
    "views": ("views", _parse_views),
    "sigma": ("solver.sigma", _parse_sigma),
    "tol": ("solver.tol", float),
    "max_iter": ("solver.max_iter", int),
    "rel_cutoff": ("solver.rel_cutoff", float),
    "std_x": ("motion.std_x", float),
    "std_y": ("motion.std_y", float),
    "std_s": ("motion.std_s", float),
    "std_r": ("motion.std_r", float),
    "similarity_threshold": ("update.similarity_threshold", float),
    "boost": ("update.boost", float),
    "illum": ("features.illum_enabled", _parse_bool),
}


def parse_config_text(text, path="<config>"):
    """Key = value lines with # comments; unknown keys and bad types error."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        attr, parser = _CONFIG_KEYS[key]
        try:
            values[attr] = parser(raw)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
    return values


def build_config(values):
    """Assemble a TrackerConfig from attribute-path overrides."""
    groups = {"solver": {}, "motion": {}, "update": {}, "features": {}}
    top = {}
    for attr, value in values.items():
        if "." in attr:
            group, name = attr.split(".", 1)
            groups[group][name] = value
        else:
            top[attr] = value
    return TrackerConfig(
        solver=SolverConfig(**groups["solver"]),
        motion=MotionConfig(**groups["motion"]),
        update=UpdateConfig(**groups["update"]),
        features=FeatureConfig(**groups["features"]),
        **top,
    )


def config_io(path):
    """Load a TrackerConfig from a flat key=value file (defaults fill gaps)."""
    with open(path) as fh:
        return build_config(parse_config_text(fh.read(), path=str(path)))


def config_to_dict(cfg):
    """Flat snapshot of the effective config, inverse of the file keys."""
    out = {}
    for key, (attr, _) in _CONFIG_KEYS.items():
        obj = cfg
        for part in attr.split("."):
            obj = getattr(obj, part)
        out[key] = list(obj) if isinstance(obj, tuple) else obj
    return out


# --- run manifests -------------------------------------------------------

@dataclass
class RunManifest:
    """Everything needed to reproduce one tracking run."""

    config: dict
    seed: int
    sequence: str
    boxes: list
    metrics: dict
    version: str = TOOL_VERSION

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        data["boxes"] = [tuple(b) for b in data["boxes"]]
        return cls(**data)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())


# --- synthetic benchmark sequence ---------------------------------------

def _checker_texture(side, rng):
    # strong checkerboard with a fixed random color modulation
    cell = 8
    yy, xx = np.mgrid[0:side, 0:side]
    checker = ((yy // cell + xx // cell) % 2).astype(float)
    tex = np.empty((side, side, 3))
    tex[:, :, 0] = 60 + 170 * checker
    tex[:, :, 1] = 200 - 150 * checker
    tex[:, :, 2] = 60 + 40 * checker
    tex += rng.uniform(-25, 25, size=tex.shape)
    return np.clip(tex, 0, 255)


def synth_sequence(out_dir, n_frames=100, occlude_at=45, noise=0.05, seed=0,
                   size=(320, 240), target_side=48, velocity=(1.2, 0.6)):
    """Generate a constant-velocity textured-square sequence with one
    occlusion window and additive pixel noise; exact ground truth.

    Writes zero-padded PNG frames plus groundtruth_rect.txt into out_dir
    and returns (frame_paths, boxes).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    w, h = size
    rng = np.random.default_rng(seed)
    texture = _checker_texture(target_side, rng)

    # static mildly textured background
    bg = 110.0 + 30.0 * np.sin(np.arange(w) / 23.0)[None, :] \
        + 20.0 * np.cos(np.arange(h) / 17.0)[:, None]
    background = np.clip(np.stack([bg, bg * 0.95, bg * 1.05], axis=-1), 0, 255)

    x0, y0 = 40.0, 60.0
    vx, vy = velocity
    occ_frames = range(occlude_at, occlude_at + 10) if occlude_at >= 0 else ()

    paths, boxes = [], []
    for t in range(n_frames):
        x = x0 + vx * t
        y = y0 + vy * t
        xi, yi = int(round(x)), int(round(y))
        img = background.copy()
        img[yi : yi + target_side, xi : xi + target_side, :] = texture
        if t in occ_frames:
            # vertical occluding bar over the middle ~60% of the target
            ox0 = xi + int(0.2 * target_side)
            ox1 = xi + int(0.8 * target_side)
            img[max(0, yi - 20) : min(h, yi + target_side + 20), ox0:ox1, :] = 70.0
        img = img + rng.normal(0.0, noise * 255.0, size=img.shape)
        img = np.clip(img, 0, 255).astype(np.uint8)
        path = out_dir / f"{t + 1:04d}.png"
        Image.fromarray(img).save(path)
        paths.append(path)
        boxes.append((float(xi), float(yi), float(target_side), float(target_side)))

    with open(out_dir / "groundtruth_rect.txt", "w") as fh:
        for x, y, bw, bh in boxes:
            fh.write(f"{x:.0f},{y:.0f},{bw:.0f},{bh:.0f}\n")
    return paths, boxes
