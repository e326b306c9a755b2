"""Proximal-gradient solver for multi-view joint sparse coding.

The model represents n candidate feature columns in each of K views by a
shared template dictionary per view:

    minimize_{C >= 0, E}   sum_k ||X^k - D^k C^k - E^k||_F^2
                         + lam * sum_i ||group_i(C)||_*
                         + gamma * (sum(C) + ||E||_1)

C is N x (n*K), view-major column blocks [C^1 | ... | C^K]; E stacks the
per-view outlier blocks E^k vertically.  group_i(C) collects candidate i's
coefficient columns across the K views; penalizing its nuclear norm pulls
the per-view codes of one candidate toward a shared activation pattern.

The solver alternates two closed-form proximal steps from zero
initialization: soft thresholding in E and nonnegative projection in C,
both driven by (sub)gradients taken at the iteration-start point.  The
nuclear term enters through its subgradient, so the raw objective is not
monotone; the best iterate seen is returned.
"""

import numbers
from dataclasses import dataclass, field

import numpy as np

from .proxops import project_nonneg, soft_threshold, svd_thin


class SolverDivergenceError(RuntimeError):
    """Raised when an iterate stops being finite."""

    def __init__(self, iteration):
        self.iteration = iteration
        super().__init__(f"non-finite values encountered at iteration {iteration}")


@dataclass(frozen=True)
class Problem:
    """Per-view feature matrices paired with per-view dictionaries.

    views: sequence of (X_k, D_k) with X_k of shape (d_k, n) and D_k of
    shape (d_k, N).  All views share the candidate count n and the
    template count N; d_k may differ per view.
    """

    views: tuple

    def __post_init__(self):
        if len(self.views) < 1:
            raise ValueError("Problem needs at least one view")
        views = []
        for k, (X, D) in enumerate(self.views):
            X = np.asarray(X, dtype=float)
            D = np.asarray(D, dtype=float)
            if X.ndim != 2 or D.ndim != 2:
                raise ValueError(f"view {k}: X and D must be 2-D")
            if X.shape[0] != D.shape[0]:
                raise ValueError(
                    f"view {k}: feature dim mismatch, X has {X.shape[0]} rows, D has {D.shape[0]}"
                )
            if not (np.all(np.isfinite(X)) and np.all(np.isfinite(D))):
                raise ValueError(f"view {k}: non-finite entries")
            views.append((X, D))
        n = views[0][0].shape[1]
        N = views[0][1].shape[1]
        if n < 1 or N < 1:
            raise ValueError("candidate and template counts must be positive")
        for k, (X, D) in enumerate(views):
            if X.shape[1] != n:
                raise ValueError(f"view {k}: candidate count {X.shape[1]} != {n}")
            if D.shape[1] != N:
                raise ValueError(f"view {k}: template count {D.shape[1]} != {N}")
        object.__setattr__(self, "views", tuple(views))

    @property
    def n_views(self):
        return len(self.views)

    @property
    def n_candidates(self):
        return self.views[0][0].shape[1]

    @property
    def n_templates(self):
        return self.views[0][1].shape[1]

    @property
    def dims(self):
        return tuple(X.shape[0] for X, _ in self.views)

    def row_slices(self):
        """Row slices of the stacked outlier matrix, one per view."""
        offsets = np.cumsum((0,) + self.dims)
        return [slice(offsets[k], offsets[k + 1]) for k in range(self.n_views)]


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 0.1
    gamma: float = 0.25
    sigma: object = "auto"  # positive float, or "auto" for the Lipschitz step
    tol: float = 1e-4
    max_iter: int = 100
    rel_cutoff: float = 1e-10

    def __post_init__(self):
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("lam and gamma must be nonnegative")
        if not (isinstance(self.sigma, str) and self.sigma == "auto"):
            if not (isinstance(self.sigma, numbers.Real) and self.sigma > 0):
                raise ValueError(f"sigma must be a positive number or 'auto', got {self.sigma!r}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0.0 <= self.rel_cutoff < 1.0:
            raise ValueError("rel_cutoff must be in [0, 1)")


@dataclass
class Solution:
    """Output of solve(): coefficients, outliers and convergence diagnostics."""

    C: np.ndarray
    E: np.ndarray
    residuals: list = field(repr=False)
    objective_trace: np.ndarray = field(repr=False)
    best_objective: float = 0.0
    iterations: int = 0
    converged: bool = False


def _check_shapes(p, C, E):
    n, N, K = p.n_candidates, p.n_templates, p.n_views
    C = np.asarray(C, dtype=float)
    E = np.asarray(E, dtype=float)
    if C.shape != (N, n * K):
        raise ValueError(f"C has shape {C.shape}, expected {(N, n * K)}")
    d_total = sum(p.dims)
    if E.shape != (d_total, n):
        raise ValueError(f"E has shape {E.shape}, expected {(d_total, n)}")
    return C, E


def _group_stack(C, n, K):
    # (n, N, K) stack of per-candidate coefficient groups; [i] selects
    # columns {l*n + i : l = 0..K-1} of C, matching the view-major layout.
    N = C.shape[0]
    return C.reshape(N, K, n).transpose(2, 0, 1)


def _residual_blocks(p, C, E):
    n = p.n_candidates
    out = []
    for k, ((X, D), rows) in enumerate(zip(p.views, p.row_slices())):
        Ck = C[:, k * n : (k + 1) * n]
        out.append(X - D @ Ck - E[rows, :])
    return out


def _objective_value(p, C, E, lam, gamma):
    quad = sum(float(np.sum(R * R)) for R in _residual_blocks(p, C, E))
    nuc = float(np.linalg.svd(_group_stack(C, p.n_candidates, p.n_views), compute_uv=False).sum())
    return quad + lam * nuc + gamma * (float(C.sum()) + float(np.abs(E).sum()))


def objective(p, C, E, cfg):
    """Full model objective at (C, E).  Rejects negative coefficients."""
    C, E = _check_shapes(p, C, E)
    if np.any(C < 0):
        raise ValueError("C must be elementwise nonnegative")
    return _objective_value(p, C, E, cfg.lam, cfg.gamma)


def _nuclear_subgrad_scatter(C, n, K, rel_cutoff):
    # Sum over candidates of the scattered U V^T subgradients.  Batched
    # over the n groups; groups with zero spectrum contribute zero.
    stack = _group_stack(C, n, K)
    U, S, Vh = np.linalg.svd(stack, full_matrices=False)
    keep = (S > rel_cutoff * S[:, :1]).astype(float)
    G = np.einsum("nir,nr,nrj->nij", U, keep, Vh)
    return G.transpose(1, 2, 0).reshape(C.shape)


def _gradients(p, C, E, lam, gamma, rel_cutoff):
    n = p.n_candidates
    gradC = np.empty_like(C)
    gradE = np.empty_like(E)
    for k, ((X, D), rows) in enumerate(zip(p.views, p.row_slices())):
        R = X - D @ C[:, k * n : (k + 1) * n] - E[rows, :]
        gradE[rows, :] = -2.0 * R
        gradC[:, k * n : (k + 1) * n] = -2.0 * (D.T @ R)
    gradC += gamma
    if lam > 0:
        gradC += lam * _nuclear_subgrad_scatter(C, n, p.n_views, rel_cutoff)
    return gradC, gradE


def smooth_grad(p, C, E, cfg):
    """(Sub)gradient of the smooth-plus-nuclear part at (C, E).

    Per view block: gradE^k = -2 (X^k - D^k C^k - E^k) and
    gradC^k = -2 D^k.T (X^k - D^k C^k - E^k) + gamma, plus lam times the
    scattered nuclear subgradients of the per-candidate groups.
    """
    C, E = _check_shapes(p, C, E)
    return _gradients(p, C, E, cfg.lam, cfg.gamma, cfg.rel_cutoff)


def pg_step_E(E, gradE, sigma, gamma):
    """Proximal step in the outlier block: soft threshold at sigma*gamma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return soft_threshold(np.asarray(E, dtype=float) - sigma * np.asarray(gradE, dtype=float),
                          sigma * gamma)


def pg_step_C(C, gradC, sigma):
    """Proximal step in the coefficient block: project onto C >= 0."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return project_nonneg(np.asarray(C, dtype=float) - sigma * np.asarray(gradC, dtype=float))


def auto_step(p):
    """Inverse Lipschitz constant of the smooth quadratic block.

    The quadratic couples each view's coefficients and outliers through
    [D^k  I]; its gradient has Lipschitz constant 2*(||D^k||_2^2 + 1), so
    the largest safe fixed step over all views is
    1 / (2 * max_k ||D^k||_2^2 + 2).  This choice makes the plain proximal
    iteration (lam = 0) a guaranteed descent method.
    """
    smax2 = 0.0
    for _, D in p.views:
        f = svd_thin(D, 0.0)
        if f.rank > 0:
            smax2 = max(smax2, float(f.S[0]) ** 2)
    return 1.0 / (2.0 * smax2 + 2.0)


def solve(p, cfg=SolverConfig()):
    """Run the proximal-gradient iteration from zero initialization.

    Both blocks step with gradients taken at the iteration-start point;
    the outlier update precedes the coefficient update.  Stops when the
    relative iterate change max(reldC, reldE) drops below cfg.tol
    (measured in Frobenius norm against 1 + previous norm) or at
    cfg.max_iter.  Returns the best-objective iterate seen.

    Each iterate's residual blocks and group SVD are computed once and
    shared between its objective value and the next step's gradients.
    """
    n, N, K = p.n_candidates, p.n_templates, p.n_views
    sigma = auto_step(p) if cfg.sigma == "auto" else float(cfg.sigma)
    slices = p.row_slices()
    d_total = sum(p.dims)
    C = np.zeros((N, n * K))
    E = np.zeros((d_total, n))

    # the outlier block dominates the work at tracking sizes (d_total*n
    # entries), so the loop below reuses two work buffers and updates the
    # residual stack in place instead of allocating per step
    X_stack = np.empty((d_total, n))
    for (X, _), rows in zip(p.views, slices):
        X_stack[rows, :] = X
    work = np.empty_like(E)
    diff = np.empty_like(E)

    def refresh_residual(R, C_cur, E_cur):
        for k, ((_, D), rows) in enumerate(zip(p.views, slices)):
            np.matmul(D, C_cur[:, k * n : (k + 1) * n], out=R[rows, :])
        np.subtract(X_stack, R, out=R)
        R -= E_cur
        return R

    def group_svd(C_cur):
        return np.linalg.svd(_group_stack(C_cur, n, K), full_matrices=False)

    R = refresh_residual(np.empty_like(E), C, E)
    U, S, Vh = group_svd(C)
    obj = float(np.dot(R.ravel(), R.ravel())) + cfg.lam * float(S.sum())
    trace = [obj]
    best_obj, best_C, best_E = obj, C, E

    norm_C = 0.0
    norm_E = 0.0
    thresh = sigma * cfg.gamma
    iterations = 0
    converged = False
    for t in range(1, cfg.max_iter + 1):
        iterations = t
        with np.errstate(over="ignore", invalid="ignore"):
            # gradC = -2 D^T R + gamma (+ lam * scattered group subgradients)
            gradC = np.empty_like(C)
            for k, ((_, D), rows) in enumerate(zip(p.views, slices)):
                np.matmul(D.T, R[rows, :], out=gradC[:, k * n : (k + 1) * n])
            gradC *= -2.0
            gradC += cfg.gamma
            if cfg.lam > 0:
                keep = (S > cfg.rel_cutoff * S[:, :1]).astype(float)
                G = np.einsum("nir,nr,nrj->nij", U, keep, Vh)
                gradC += cfg.lam * G.transpose(1, 2, 0).reshape(C.shape)
            C_new = np.maximum(C - sigma * gradC, 0.0)
            if not np.all(np.isfinite(C_new)):
                raise SolverDivergenceError(t)

            # gradE = -2 R; prox is the soft threshold at sigma*gamma.
            # E_new starts as the gradient step, `work` carries |E_new|.
            E_new = E + (2.0 * sigma) * R
            np.abs(E_new, out=work)
            work -= thresh
            np.maximum(work, 0.0, out=work)
            np.sign(E_new, out=E_new)
            E_new *= work
            abs_E_sum = float(work.sum())

            refresh_residual(R, C_new, E_new)
            U, S, Vh = group_svd(C_new)
            obj = (float(np.dot(R.ravel(), R.ravel())) + cfg.lam * float(S.sum())
                   + cfg.gamma * (float(C_new.sum()) + abs_E_sum))
        if not np.isfinite(obj):
            raise SolverDivergenceError(t)
        trace.append(obj)
        if obj < best_obj:
            best_obj, best_C, best_E = obj, C_new, E_new

        np.subtract(E_new, E, out=diff)
        rel_C = np.linalg.norm(C_new - C) / (1.0 + norm_C)
        rel_E = np.sqrt(np.dot(diff.ravel(), diff.ravel())) / (1.0 + norm_E)
        norm_C = np.linalg.norm(C_new)
        norm_E = np.sqrt(np.dot(E_new.ravel(), E_new.ravel()))
        C, E = C_new, E_new
        if max(rel_C, rel_E) < cfg.tol:
            converged = True
            break

    return Solution(
        C=best_C,
        E=best_E,
        residuals=_residual_blocks(p, best_C, best_E),
        objective_trace=np.asarray(trace),
        best_objective=best_obj,
        iterations=iterations,
        converged=converged,
    )


def save_problem(p, path):
    """Write a Problem as the plain-text container used by the CLI.

    Format: a magic line, then per view one header line "view d_k n N"
    followed by d_k rows of X and d_k rows of D, whitespace separated.
    """
    n, N = p.n_candidates, p.n_templates
    with open(path, "w") as fh:
        fh.write(f"mvtrack-problem views={p.n_views}\n")
        for X, D in p.views:
            fh.write(f"view {X.shape[0]} {n} {N}\n")
            for row in X:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")
            for row in D:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_problem(path):
    """Read a Problem written by save_problem."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("mvtrack-problem"):
        raise ValueError(f"{path}: not a problem file")
    n_views = int(lines[0].split("views=")[1])
    pos = 1
    views = []
    for _ in range(n_views):
        tag, d_k, n, N = lines[pos].split()
        if tag != "view":
            raise ValueError(f"{path}: expected view header at line {pos + 1}")
        d_k, n, N = int(d_k), int(n), int(N)
        pos += 1
        X = np.array([[float(v) for v in lines[pos + r].split()] for r in range(d_k)])
        pos += d_k
        D = np.array([[float(v) for v in lines[pos + r].split()] for r in range(d_k)])
        pos += d_k
        if X.shape != (d_k, n) or D.shape != (d_k, N):
            raise ValueError(f"{path}: matrix dimensions disagree with view header")
        views.append((X, D))
    return Problem(views=tuple(views))
