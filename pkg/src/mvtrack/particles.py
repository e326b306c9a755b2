"""Particle propagation, likelihood weighting, selection and resampling.

A particle set is a (n, 4) float array with columns (cx, cy, s, r):
center position in pixels, scale factor and aspect-ratio factor relative
to the initial box.  Weights live in a separate (n,) array.  Candidate
indices exposed by this module are 1-based, matching the solver's
coefficient column-group convention.
"""

import warnings
from dataclasses import dataclass

import numpy as np

CX, CY, SC, AR = 0, 1, 2, 3

SCALE_CLAMP = (0.5, 2.0)  # bounds on s and r relative to the initial box


class DegenerateFrameWarning(RuntimeWarning):
    """All candidate weights vanished; a fallback selection was used."""


@dataclass(frozen=True)
class MotionConfig:
    """Gaussian random-walk standard deviations of the particle transition."""

    std_x: float = 4.0
    std_y: float = 4.0
    std_s: float = 0.02
    std_r: float = 0.005
    seed: int = 0

    def __post_init__(self):
        if min(self.std_x, self.std_y, self.std_s, self.std_r) < 0:
            raise ValueError("motion standard deviations must be nonnegative")


def make_states(n, box):
    """n identical particles centered on an (x, y, w, h) box, unit factors."""
    x, y, w, h = box
    states = np.zeros((n, 4))
    states[:, CX] = x + w / 2.0
    states[:, CY] = y + h / 2.0
    states[:, SC] = 1.0
    states[:, AR] = 1.0
    return states


def box_from_state(state, init_size):
    """Derive the (x, y, w, h) box of one particle from the initial box size."""
    w0, h0 = init_size
    w = w0 * state[SC]
    h = h0 * state[SC] * state[AR]
    return (state[CX] - w / 2.0, state[CY] - h / 2.0, w, h)


def propagate(states, cfg, rng, frame_size):
    """Perturb every particle by independent Gaussian noise.

    Scale and aspect factors are clamped to SCALE_CLAMP times their
    initial (unit) values, centers to the frame interior.  Draw order is
    fixed (x, y, s, r), so a given rng state yields one exact output.
    """
    if len(states) == 0:
        raise ValueError("empty particle set")
    w, h = frame_size
    out = np.asarray(states, dtype=float).copy()
    n = len(out)
    out[:, CX] = np.clip(out[:, CX] + rng.normal(0.0, cfg.std_x, n), 0.0, w - 1.0)
    out[:, CY] = np.clip(out[:, CY] + rng.normal(0.0, cfg.std_y, n), 0.0, h - 1.0)
    out[:, SC] = np.clip(out[:, SC] + rng.normal(0.0, cfg.std_s, n), *SCALE_CLAMP)
    out[:, AR] = np.clip(out[:, AR] + rng.normal(0.0, cfg.std_r, n), *SCALE_CLAMP)
    return out


def candidate_residuals(problem, C):
    """Per-candidate total squared reconstruction error sum_k ||D^k c_i^k - x_i^k||^2.

    The outlier matrix is deliberately left out of this residual; the
    likelihood scores how well the templates alone explain the candidate.
    """
    n = problem.n_candidates
    total = np.zeros(n)
    for k, (X, D) in enumerate(problem.views):
        R = D @ C[:, k * n : (k + 1) * n] - X
        total += np.sum(R * R, axis=0)
    return total


def likelihood(solution, problem, alpha):
    """Candidate weights exp(-alpha * total squared residual), in (0, 1]."""
    C = np.asarray(solution.C, dtype=float)
    n, N, K = problem.n_candidates, problem.n_templates, problem.n_views
    if C.shape != (N, n * K):
        raise ValueError(f"coefficients have shape {C.shape}, expected {(N, n * K)}")
    return np.exp(-alpha * candidate_residuals(problem, C))


def select_best(states, weights, init_size, residuals=None):
    """Pick the highest-weight candidate.

    Returns (index, box, degenerate) with a 1-based index; ties break
    toward the lowest index.  When every weight underflows to zero the
    selection falls back to the minimum total residual (degenerate=True,
    warned); without residuals that situation raises.
    """
    w = np.asarray(weights, dtype=float)
    if len(w) != len(states):
        raise ValueError("weights and states disagree in length")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if w.max() > 0:
        idx = int(np.argmax(w))
        degenerate = False
    elif residuals is not None:
        warnings.warn("all candidate weights underflowed; selecting by residual",
                      DegenerateFrameWarning)
        idx = int(np.argmin(residuals))
        degenerate = True
    else:
        raise ValueError("all candidate weights are zero")
    return idx + 1, box_from_state(states[idx], init_size), degenerate


def normalize_weights(weights):
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must sum to a positive value")
    return w / total


def resample(states, weights, rng):
    """Systematic resampling; returns (states, uniform weights).

    Expected multiplicity of particle i is proportional to its normalized
    weight.  A zero-sum weight vector keeps the states and only resets
    the weights (with a warning).
    """
    states = np.asarray(states, dtype=float)
    w = np.asarray(weights, dtype=float)
    n = len(states)
    uniform = np.full(n, 1.0 / n)
    if w.sum() <= 0:
        warnings.warn("zero-sum weights: keeping states, resetting uniform",
                      DegenerateFrameWarning)
        return states.copy(), uniform
    cum = np.cumsum(w / w.sum())
    cum[-1] = 1.0  # guard cumulative rounding
    positions = (rng.uniform() + np.arange(n)) / n
    idx = np.searchsorted(cum, positions, side="left")
    return states[np.minimum(idx, n - 1)].copy(), uniform
