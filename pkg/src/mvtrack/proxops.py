"""Dense matrix kernels and proximal/subgradient operators.

All matrices are plain 2-D float ndarrays. Operations reject NaN/Inf
inputs and never mutate their arguments.
"""

from dataclasses import dataclass

import numpy as np


def _as_matrix(Y, name="Y"):
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] < 1 or Y.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-D matrix with positive dimensions, got shape {Y.shape}")
    if not np.all(np.isfinite(Y)):
        raise ValueError(f"{name} contains non-finite entries")
    return Y


def soft_threshold(Y, rho):
    """Elementwise shrink-toward-zero: sign(y) * max(|y| - rho, 0).

    This is the proximal operator of rho * ||.||_1.
    """
    Y = _as_matrix(np.atleast_2d(Y))
    if rho < 0:
        raise ValueError(f"soft_threshold requires rho >= 0, got {rho}")
    return np.sign(Y) * np.maximum(np.abs(Y) - rho, 0.0)


def project_nonneg(Y):
    """Euclidean projection onto the nonnegative orthant: max(Y, 0).

    This is the proximal operator of the indicator of {Y >= 0} and the
    unique nearest nonnegative matrix in Frobenius distance.
    """
    Y = _as_matrix(np.atleast_2d(Y))
    return np.maximum(Y, 0.0)


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD with small singular triples dropped.

    U: (m, r) left singular vectors, orthonormal columns
    S: (r,) singular values, nonincreasing, strictly positive
    V: (n, r) right singular vectors, orthonormal columns

    r = 0 (empty factors) flags an all-zero input matrix.
    """

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        return self.S.shape[0]

    def reconstruct(self):
        return (self.U * self.S) @ self.V.T


def svd_thin(Y, rel_cutoff=0.0):
    """Thin SVD of Y keeping singular triples with s_i > rel_cutoff * s_max.

    rel_cutoff must lie in [0, 1). An all-zero matrix yields empty factors
    (rank 0), which downstream operators treat as the zero subgradient.
    """
    Y = _as_matrix(Y)
    if not 0.0 <= rel_cutoff < 1.0:
        raise ValueError(f"rel_cutoff must be in [0, 1), got {rel_cutoff}")
    U, S, Vh = np.linalg.svd(Y, full_matrices=False)
    keep = S > rel_cutoff * (S[0] if S.size else 0.0)
    return SvdFactors(U=U[:, keep], S=S[keep], V=Vh[keep, :].T)


def nuclear_norm(Y):
    """Sum of all singular values of Y."""
    Y = _as_matrix(Y)
    return float(np.linalg.svd(Y, compute_uv=False).sum())


def nuclear_subgradient(Y, rel_cutoff=1e-10):
    """A subgradient of the nuclear norm at Y, namely U @ V.T from its thin SVD.

    Singular triples with s_i <= rel_cutoff * s_max are dropped; the omitted
    orthogonal-complement term is set to zero, which stays inside the
    subdifferential.  The zero matrix maps to the zero matrix.
    """
    f = svd_thin(Y, rel_cutoff)
    if f.rank == 0:
        return np.zeros_like(np.asarray(Y, dtype=float))
    return f.U @ f.V.T


def column_group_select(C, particle, n_particles, n_views):
    """Select one particle's coefficient columns across all views.

    C is laid out view-major with n_particles columns per view block, so
    particle i (1-based, 1 <= i <= n_particles) owns columns
    {(l-1)*n_particles + i : l = 1..n_views}.  Returns the N x K submatrix
    with view order preserved.
    """
    C = _as_matrix(C, "C")
    if C.shape[1] != n_particles * n_views:
        raise ValueError(
            f"C has {C.shape[1]} columns, expected n_particles*n_views = {n_particles * n_views}"
        )
    if not 1 <= particle <= n_particles:
        raise ValueError(f"particle index {particle} out of range 1..{n_particles}")
    cols = (particle - 1) + n_particles * np.arange(n_views)
    return C[:, cols].copy()


def column_group_scatter(W, particle, n_particles, n_views, target_shape):
    """Adjoint of column_group_select: place W's columns into a zero matrix.

    W is N x n_views; the result has target_shape with W's columns at
    indices {(l-1)*n_particles + particle}.
    """
    W = _as_matrix(W, "W")
    rows, cols = target_shape
    if W.shape != (rows, n_views) or cols != n_particles * n_views:
        raise ValueError(
            f"shape mismatch: W {W.shape}, target {target_shape}, "
            f"n_particles={n_particles}, n_views={n_views}"
        )
    if not 1 <= particle <= n_particles:
        raise ValueError(f"particle index {particle} out of range 1..{n_particles}")
    out = np.zeros(target_shape)
    out[:, (particle - 1) + n_particles * np.arange(n_views)] = W
    return out
