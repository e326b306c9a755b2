"""Per-frame tracking orchestration.

Each frame: propagate particles, extract per-view features of every
candidate box, assemble the joint sparse-coding problem against the
current template dictionaries, solve it, weight candidates by likelihood,
pick the best, update the templates with it, then resample.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .features import (VIEW_ORDER, FeatureConfig, OutOfFrameError,
                       extract_all_views, intensity_template_size)
from .particles import (MotionConfig, box_from_state, candidate_residuals,
                        likelihood, make_states, propagate, resample,
                        select_best)
from .solver import Problem, SolverConfig, solve
from .templates import TemplateSet, UpdateConfig, init_templates, maybe_update


@dataclass(frozen=True)
class TrackerConfig:
    """Tracker defaults: n=400 particles, N=10 templates, lam=0.1,
    gamma=0.25, alpha=30.  lam and gamma here override the nested solver
    config so there is a single source of truth for the model weights."""

    n: int = 400
    n_templates: int = 10
    lam: float = 0.1
    gamma: float = 0.25
    alpha: float = 30.0
    seed: int = 0
    width: int = 320
    height: int = 240
    views: tuple = VIEW_ORDER
    solver: SolverConfig = field(default_factory=SolverConfig)
    motion: MotionConfig = field(default_factory=MotionConfig)
    update: UpdateConfig = field(default_factory=UpdateConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)

    def __post_init__(self):
        if self.n < 1 or self.n_templates < 1:
            raise ValueError("particle and template counts must be positive")
        unknown = set(self.views) - set(VIEW_ORDER)
        if unknown or not self.views:
            raise ValueError(f"views must be a nonempty subset of {VIEW_ORDER}")

    def effective_solver(self):
        return replace(self.solver, lam=self.lam, gamma=self.gamma)


@dataclass
class TrackRecord:
    """Per-frame outputs of one tracking run."""

    boxes: list = field(default_factory=list)
    likelihoods: list = field(default_factory=list)
    degenerate: list = field(default_factory=list)
    frame_times: list = field(default_factory=list)

    def append(self, box, best_likelihood, degenerate, seconds):
        self.boxes.append(tuple(float(v) for v in box))
        self.likelihoods.append(float(best_likelihood))
        self.degenerate.append(bool(degenerate))
        self.frame_times.append(float(seconds))

    def __len__(self):
        return len(self.boxes)


class Tracker:
    """Single-target tracker; init on frame 1, then track_frame per frame."""

    def __init__(self, cfg=TrackerConfig()):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.record = TrackRecord()
        self.templates = None
        self.states = None
        self.init_size = None
        self.template_size = None
        self.prev_box = None
        self.frame_idx = -1

    def init(self, frame, box):
        t0 = time.perf_counter()
        x, y, w, h = (float(v) for v in box)
        if w <= 0 or h <= 0:
            raise ValueError(f"initial box must have positive area, got {box}")
        cfg = self.cfg
        self.init_size = (w, h)
        self.template_size = intensity_template_size(w, h)
        self.templates = init_templates(frame, (x, y, w, h), cfg.n_templates,
                                        self.template_size, self.rng,
                                        cfg.features, cfg.views)
        self.states = make_states(cfg.n, (x, y, w, h))
        self.prev_box = (x, y, w, h)
        self.frame_idx = 0
        self.record.append(self.prev_box, 1.0, False, time.perf_counter() - t0)
        return self.prev_box

    def _assemble_problem(self, frame):
        cfg = self.cfg
        valid = np.ones(cfg.n, dtype=bool)
        columns = {v: [] for v in cfg.views}
        dims = {v: self.templates.dicts[v].shape[0] for v in cfg.views}
        for i in range(cfg.n):
            box = box_from_state(self.states[i], self.init_size)
            try:
                vecs = extract_all_views(frame, box, self.template_size,
                                         cfg.features, cfg.views)
            except OutOfFrameError:
                valid[i] = False
                for v in cfg.views:
                    columns[v].append(np.zeros(dims[v]))
                continue
            for vec in vecs:
                columns[vec.view].append(vec.values)
        views = tuple((np.column_stack(columns[v]), self.templates.dicts[v])
                      for v in cfg.views)
        return Problem(views=views), valid

    def track_frame(self, frame):
        if self.templates is None:
            raise RuntimeError("tracker not initialized; call init() first")
        t0 = time.perf_counter()
        cfg = self.cfg
        self.frame_idx += 1

        self.states = propagate(self.states, cfg.motion, self.rng,
                                (cfg.width, cfg.height))
        problem, valid = self._assemble_problem(frame)

        if not valid.any():
            # every candidate box fell outside the frame: hold the last box
            self.record.append(self.prev_box, 0.0, True, time.perf_counter() - t0)
            self.states, _ = resample(self.states, np.zeros(cfg.n), self.rng)
            return self.prev_box

        solution = solve(problem, cfg.effective_solver())
        weights = likelihood(solution, problem, cfg.alpha)
        weights[~valid] = 0.0
        residuals = candidate_residuals(problem, solution.C)
        residuals[~valid] = np.inf

        index, box, degenerate = select_best(self.states, weights,
                                             self.init_size, residuals)
        if degenerate:
            box = self.prev_box
        else:
            # coefficients of the first enabled view (intensity by default)
            coeffs = solution.C[:, index - 1]
            best_features = extract_all_views(
                frame, box_from_state(self.states[index - 1], self.init_size),
                self.template_size, cfg.features, cfg.views)
            self.templates = maybe_update(self.templates, best_features,
                                          coeffs, cfg.update, self.frame_idx)
        self.prev_box = tuple(float(v) for v in box)

        self.states, _ = resample(self.states, weights, self.rng)
        self.record.append(self.prev_box, weights.max(), degenerate,
                           time.perf_counter() - t0)
        return self.prev_box


def track_sequence(frames, first_box, cfg=TrackerConfig()):
    """Track one sequence initialized at the first frame's ground truth box.

    frames: sequence of Frame objects (already at working resolution).
    Returns the TrackRecord with one entry per frame, the first being the
    initialization box itself.
    """
    frames = list(frames)
    if not frames:
        raise ValueError("empty sequence")
    tracker = Tracker(cfg)
    tracker.init(frames[0], first_box)
    for frame in frames[1:]:
        tracker.track_frame(frame)
    return tracker.record
