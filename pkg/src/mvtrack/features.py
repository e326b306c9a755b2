"""Per-view feature extraction for image patches.

Four views per candidate patch, in fixed order: raw intensity resampled
to a small template grid, a joint RGB color histogram, HOG, and uniform
LBP.  Gray-derived views (intensity, HOG, LBP) run through an
illumination-normalization chain first; the color histogram sees the raw
crop.  Every non-degenerate view vector is L2-normalized.
"""

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy.ndimage import gaussian_filter

VIEW_ORDER = ("intensity", "color-hist", "hog", "lbp")

HOG_ORIENTATIONS = 9
HOG_CELL = 8
HOG_BLOCK = 2  # cells per block side, sliding stride 1 cell
HOG_CLIP = 0.2

LBP_BINS = 59  # 58 uniform 8-bit patterns + 1 catch-all


class OutOfFrameError(ValueError):
    """Candidate box has no overlap with the frame."""


@dataclass(frozen=True)
class FeatureConfig:
    illum_enabled: bool = True
    illum_gamma: float = 0.2
    dog_sigma_inner: float = 1.0
    dog_sigma_outer: float = 2.0
    contrast_trim: float = 0.1
    contrast_ceiling: float = 10.0
    analysis_size: int = 32  # HOG/LBP patch side
    color_bins: int = 8  # per channel, joint histogram


@dataclass
class ViewVector:
    """One view's descriptor.  normalized=False flags an all-zero raw vector."""

    view: str
    values: np.ndarray
    normalized: bool = True


class Frame:
    """One ingested video frame: float RGB in [0, 255] plus a derived gray plane."""

    def __init__(self, rgb):
        rgb = np.asarray(rgb, dtype=float)
        if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.shape[0] < 1 or rgb.shape[1] < 1:
            raise ValueError(f"expected (H, W, 3) color array, got shape {rgb.shape}")
        self.rgb = rgb
        # BT.601 luma
        self.gray = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]

    @property
    def height(self):
        return self.rgb.shape[0]

    @property
    def width(self):
        return self.rgb.shape[1]

    @classmethod
    def from_array(cls, arr, size=None):
        arr = np.asarray(arr)
        if arr.ndim == 2:
            arr = np.stack([arr] * 3, axis=-1)
        frame = cls(arr.astype(float))
        if size is not None and (frame.width, frame.height) != tuple(size):
            w, h = size
            rgb = np.stack([bilinear_resize(frame.rgb[:, :, c], h, w) for c in range(3)], axis=-1)
            frame = cls(rgb)
        return frame

    @classmethod
    def from_file(cls, path, size=(320, 240)):
        with Image.open(path) as img:
            arr = np.asarray(img.convert("RGB"), dtype=float)
        return cls.from_array(arr, size=size)


def _round_half_up(x):
    return int(math.floor(x + 0.5))


def bilinear_resize(img, out_h, out_w):
    """Resample a 2-D array with center-aligned bilinear interpolation.

    Output pixel (r, c) samples source coordinates
    ((r + 0.5) * H/out_h - 0.5, (c + 0.5) * W/out_w - 0.5), clamped to the
    image; the same convention as common INTER_LINEAR resizers.
    """
    img = np.asarray(img, dtype=float)
    h, w = img.shape
    if out_h < 1 or out_w < 1:
        raise ValueError("output size must be positive")
    sy = np.clip((np.arange(out_h) + 0.5) * h / out_h - 0.5, 0.0, h - 1.0)
    sx = np.clip((np.arange(out_w) + 0.5) * w / out_w - 0.5, 0.0, w - 1.0)
    y0 = np.floor(sy).astype(int)
    x0 = np.floor(sx).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (sy - y0)[:, None]
    fx = (sx - x0)[None, :]
    top = img[np.ix_(y0, x0)] * (1 - fx) + img[np.ix_(y0, x1)] * fx
    bot = img[np.ix_(y1, x0)] * (1 - fx) + img[np.ix_(y1, x1)] * fx
    return top * (1 - fy) + bot * fy


def clip_box(box, width, height):
    """Intersect an (x, y, w, h) box with the frame; error if empty."""
    x, y, w, h = box
    x0, y0 = max(x, 0.0), max(y, 0.0)
    x1, y1 = min(x + w, float(width)), min(y + h, float(height))
    if x1 <= x0 or y1 <= y0:
        raise OutOfFrameError(f"box {box} lies outside the {width}x{height} frame")
    return (x0, y0, x1 - x0, y1 - y0)


def crop_patch(frame, box):
    """Crop the integer pixel rect covering a (clipped) box.

    Returns (gray_patch, rgb_patch).  Box corners round half-up; the rect
    is forced nonempty inside the frame.
    """
    x, y, w, h = clip_box(box, frame.width, frame.height)
    x0 = min(_round_half_up(x), frame.width - 1)
    y0 = min(_round_half_up(y), frame.height - 1)
    x1 = max(min(_round_half_up(x + w), frame.width), x0 + 1)
    y1 = max(min(_round_half_up(y + h), frame.height), y0 + 1)
    return frame.gray[y0:y1, x0:x1], frame.rgb[y0:y1, x0:x1, :]


def illum_normalize(patch, cfg=FeatureConfig()):
    """Gamma + difference-of-Gaussians + two-stage contrast equalization.

    Produces a zero-centered patch bounded to (-ceiling, ceiling); a flat
    input maps to all zeros.  Disabled via cfg.illum_enabled, in which
    case the patch passes through unchanged.
    """
    patch = np.asarray(patch, dtype=float)
    if patch.size == 0:
        raise ValueError("empty patch")
    if not cfg.illum_enabled:
        return patch.copy()
    a = cfg.contrast_trim
    tau = cfg.contrast_ceiling
    out = np.power(np.maximum(patch, 0.0) / 255.0, cfg.illum_gamma)
    out = gaussian_filter(out, cfg.dog_sigma_inner) - gaussian_filter(out, cfg.dog_sigma_outer)
    scale = np.mean(np.abs(out) ** a) ** (1.0 / a)
    if scale > 0:
        out = out / scale
    scale = np.mean(np.minimum(np.abs(out), tau) ** a) ** (1.0 / a)
    if scale > 0:
        out = out / scale
    return tau * np.tanh(out / tau)


def intensity_template_size(width, height):
    """Template grid for the intensity view, derived from the initial box.

    One third of each box side, or one half when the shorter side is under
    20 pixels; rounded half-up with a floor of 1.
    """
    if width <= 0 or height <= 0:
        raise ValueError(f"box sides must be positive, got {width}x{height}")
    factor = 2.0 if min(width, height) < 20 else 3.0
    return (max(1, _round_half_up(width / factor)),
            max(1, _round_half_up(height / factor)))


def _unit(values, view):
    norm = np.linalg.norm(values)
    if norm == 0:
        return ViewVector(view, values, normalized=False)
    return ViewVector(view, values / norm, normalized=True)


def extract_intensity(patch, template_size):
    """Gray patch resampled to (tw, th), vectorized row-major, unit norm."""
    tw, th = template_size
    resized = bilinear_resize(patch, th, tw)
    return _unit(resized.ravel(), "intensity")


def extract_color_hist(patch, bins=8):
    """Joint RGB histogram with `bins` per channel (red-major layout).

    Counts over all pixels, L1-normalized then L2-normalized.
    """
    patch = np.asarray(patch, dtype=float)
    idx = np.clip(np.floor(patch * bins / 256.0), 0, bins - 1).astype(int)
    joint = (idx[:, :, 0] * bins + idx[:, :, 1]) * bins + idx[:, :, 2]
    hist = np.bincount(joint.ravel(), minlength=bins ** 3).astype(float)
    total = hist.sum()
    if total > 0:
        hist /= total
    return _unit(hist, "color-hist")


def _hog_gradients(patch):
    # central differences inside, one-sided at the borders (undivided)
    gx = np.empty_like(patch)
    gy = np.empty_like(patch)
    gx[:, 1:-1] = patch[:, 2:] - patch[:, :-2]
    gx[:, 0] = patch[:, 1] - patch[:, 0]
    gx[:, -1] = patch[:, -1] - patch[:, -2]
    gy[1:-1, :] = patch[2:, :] - patch[:-2, :]
    gy[0, :] = patch[1, :] - patch[0, :]
    gy[-1, :] = patch[-1, :] - patch[-2, :]
    return gx, gy


def extract_hog(patch):
    """HOG on a 32x32 gray patch.

    9 unsigned orientation bins with hard assignment, 8x8-pixel cells, 2x2
    cell blocks sliding one cell at a time, L2-hys block normalization
    (clip at 0.2), giving 3*3 blocks * 4 cells * 9 bins = 324 values.
    """
    patch = np.asarray(patch, dtype=float)
    side = patch.shape[0]
    if patch.shape != (side, side) or side % HOG_CELL != 0:
        raise ValueError(f"HOG expects a square patch divisible by {HOG_CELL}, got {patch.shape}")
    gx, gy = _hog_gradients(patch)
    mag = np.hypot(gx, gy)
    ang = np.mod(np.arctan2(gy, gx), np.pi)
    bins = np.minimum((ang / (np.pi / HOG_ORIENTATIONS)).astype(int), HOG_ORIENTATIONS - 1)

    n_cells = side // HOG_CELL
    hist = np.zeros((n_cells, n_cells, HOG_ORIENTATIONS))
    rows = np.repeat(np.arange(side) // HOG_CELL, side).reshape(side, side)
    np.add.at(hist, (rows, rows.T, bins), mag)

    n_blocks = n_cells - HOG_BLOCK + 1
    out = []
    for br in range(n_blocks):
        for bc in range(n_blocks):
            v = hist[br : br + HOG_BLOCK, bc : bc + HOG_BLOCK, :].ravel()
            norm = np.linalg.norm(v)
            if norm > 0:
                v = np.minimum(v / norm, HOG_CLIP)
                norm = np.linalg.norm(v)
                if norm > 0:
                    v = v / norm
            out.append(v)
    return _unit(np.concatenate(out), "hog")


# circular neighbor order (clockwise from top-left), radius 1
_LBP_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))


def _lbp_bin_table():
    # uniform codes (<= 2 circular bit transitions) get their own bins in
    # ascending code order; everything else shares the final catch-all bin
    table = np.empty(256, dtype=int)
    uniform = []
    for code in range(256):
        bits = [(code >> i) & 1 for i in range(8)]
        transitions = sum(bits[i] != bits[(i + 1) % 8] for i in range(8))
        if transitions <= 2:
            uniform.append(code)
    lookup = {code: i for i, code in enumerate(uniform)}
    for code in range(256):
        table[code] = lookup.get(code, LBP_BINS - 1)
    return table


_LBP_TABLE = _lbp_bin_table()


def extract_lbp(patch):
    """Uniform LBP histogram (8 neighbors, radius 1) over interior pixels.

    Bit i of a pixel's code is set when the i-th circular neighbor is
    strictly brighter than the center, so a flat patch produces the
    all-zeros pattern.  59 bins: 58 uniform patterns plus one catch-all.
    """
    patch = np.asarray(patch, dtype=float)
    if patch.shape[0] < 3 or patch.shape[1] < 3:
        raise ValueError(f"LBP needs at least a 3x3 patch, got {patch.shape}")
    center = patch[1:-1, 1:-1]
    code = np.zeros(center.shape, dtype=int)
    for bit, (dy, dx) in enumerate(_LBP_OFFSETS):
        nb = patch[1 + dy : patch.shape[0] - 1 + dy, 1 + dx : patch.shape[1] - 1 + dx]
        code |= (nb > center).astype(int) << bit
    hist = np.bincount(_LBP_TABLE[code].ravel(), minlength=LBP_BINS).astype(float)
    return _unit(hist, "lbp")


def extract_all_views(frame, box, template_size, cfg=FeatureConfig(), views=VIEW_ORDER):
    """Crop a candidate box and extract its enabled views in fixed order.

    The box is clipped to the frame (OutOfFrameError when fully outside);
    gray-derived views share one illumination-normalized crop, the color
    histogram uses the raw colors.
    """
    gray, rgb = crop_patch(frame, box)
    gray_n = illum_normalize(gray, cfg)
    out = []
    for view in VIEW_ORDER:
        if view not in views:
            continue
        if view == "intensity":
            out.append(extract_intensity(gray_n, template_size))
        elif view == "color-hist":
            out.append(extract_color_hist(rgb, cfg.color_bins))
        elif view == "hog":
            out.append(extract_hog(bilinear_resize(gray_n, cfg.analysis_size, cfg.analysis_size)))
        elif view == "lbp":
            out.append(extract_lbp(bilinear_resize(gray_n, cfg.analysis_size, cfg.analysis_size)))
    return out
