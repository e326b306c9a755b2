import numpy as np
import pytest

from mvtrack.proxops import (column_group_scatter, column_group_select,
                             nuclear_norm, nuclear_subgradient,
                             project_nonneg, soft_threshold, svd_thin)

from oracles import jacobi_eigh, singular_values_via_eigh


def test_soft_threshold_direct():
    out = soft_threshold(np.array([[1.0, -2.0, 0.3]]), 0.5)
    assert np.allclose(out, [[0.5, -1.5, 0.0]])


def test_soft_threshold_zero_rho_is_identity():
    rng = np.random.default_rng(1)
    Y = rng.normal(size=(4, 6))
    assert np.array_equal(soft_threshold(Y, 0.0), Y)


def test_soft_threshold_large_rho_zeroes_everything():
    rng = np.random.default_rng(2)
    Y = rng.uniform(-1, 1, size=(5, 5))
    assert np.array_equal(soft_threshold(Y, 2.0), np.zeros((5, 5)))


def test_soft_threshold_negative_rho_rejected():
    with pytest.raises(ValueError):
        soft_threshold(np.ones((2, 2)), -0.1)


def test_soft_threshold_composition():
    rng = np.random.default_rng(3)
    # dyadic entries and thresholds: the identity holds bit-exactly
    Y = rng.integers(-8, 9, size=(6, 6)).astype(float) / 4.0
    lhs = soft_threshold(soft_threshold(Y, 0.5), 0.25)
    assert np.array_equal(lhs, soft_threshold(Y, 0.75))
    # arbitrary floats: exact up to rounding of the subtractions
    Z = rng.normal(size=(6, 6)) * 3
    lhs = soft_threshold(soft_threshold(Z, 0.7), 0.4)
    assert np.allclose(lhs, soft_threshold(Z, 1.1), atol=1e-12, rtol=0)


def test_soft_threshold_nonexpansive():
    rng = np.random.default_rng(4)
    for _ in range(50):
        A = rng.normal(size=(5, 3))
        B = rng.normal(size=(5, 3))
        d_out = np.linalg.norm(soft_threshold(A, 0.8) - soft_threshold(B, 0.8))
        assert d_out <= np.linalg.norm(A - B) + 1e-12


def test_project_nonneg_direct():
    assert np.array_equal(project_nonneg(np.array([[-1.0, 0.0, 2.0]])),
                          [[0.0, 0.0, 2.0]])


def test_project_nonneg_fixed_point_and_idempotent():
    rng = np.random.default_rng(5)
    Y = rng.uniform(0, 1, size=(4, 4))
    assert np.array_equal(project_nonneg(Y), Y)
    Z = rng.normal(size=(4, 4))
    assert np.array_equal(project_nonneg(project_nonneg(Z)), project_nonneg(Z))


def test_project_nonneg_minimality():
    rng = np.random.default_rng(6)
    Y = rng.normal(size=(4, 5))
    best = np.linalg.norm(project_nonneg(Y) - Y)
    for _ in range(100):
        Z = rng.uniform(0, 2, size=(4, 5))
        assert np.linalg.norm(Z - Y) >= best - 1e-12


def test_svd_thin_identity_spectrum():
    f = svd_thin(np.eye(3))
    assert np.allclose(f.S, [1.0, 1.0, 1.0])


def test_svd_thin_rank_one():
    u = np.array([2.0, 0.0, 0.0])
    v = np.array([0.0, 3.0])
    f = svd_thin(np.outer(u, v))
    assert f.rank == 1
    assert np.allclose(f.S, [6.0])


def test_svd_thin_matches_jacobi_eigensolver():
    rng = np.random.default_rng(7)
    Y = rng.normal(size=(10, 4))
    f = svd_thin(Y)
    assert np.allclose(f.S, singular_values_via_eigh(Y)[: f.rank], atol=1e-8)


def test_svd_thin_factor_contracts():
    rng = np.random.default_rng(8)
    for shape in [(6, 3), (3, 6), (5, 5)]:
        Y = rng.normal(size=shape)
        f = svd_thin(Y)
        assert np.allclose(f.U.T @ f.U, np.eye(f.rank), atol=1e-8)
        assert np.allclose(f.V.T @ f.V, np.eye(f.rank), atol=1e-8)
        assert np.all(np.diff(f.S) <= 1e-15)
        rel = np.linalg.norm(f.reconstruct() - Y) / np.linalg.norm(Y)
        assert rel < 1e-8


def test_svd_thin_zero_matrix_flagged_empty():
    f = svd_thin(np.zeros((3, 2)))
    assert f.rank == 0
    assert f.S.size == 0


def test_svd_thin_cutoff_validation():
    with pytest.raises(ValueError):
        svd_thin(np.eye(2), rel_cutoff=1.0)
    with pytest.raises(ValueError):
        svd_thin(np.eye(2), rel_cutoff=-0.1)


def test_svd_thin_rejects_nan():
    Y = np.ones((2, 2))
    Y[0, 0] = np.nan
    with pytest.raises(ValueError):
        svd_thin(Y)


def test_nuclear_norm_cases():
    assert nuclear_norm(np.zeros((3, 3))) == 0.0
    assert np.isclose(nuclear_norm(np.ones((2, 2))), 2.0)
    rng = np.random.default_rng(9)
    Y = rng.normal(size=(6, 3))
    assert np.isclose(nuclear_norm(Y), singular_values_via_eigh(Y).sum(), atol=1e-8)


def test_nuclear_norm_orderings():
    rng = np.random.default_rng(10)
    for _ in range(20):
        Y = rng.normal(size=(5, 4))
        s = np.linalg.svd(Y, compute_uv=False)
        assert nuclear_norm(Y) >= np.linalg.norm(Y) - 1e-12
        assert np.linalg.norm(Y) >= s[0] - 1e-12


def test_nuclear_norm_unitary_invariance():
    rng = np.random.default_rng(11)
    Y = rng.normal(size=(5, 5))
    Q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    P, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    base = nuclear_norm(Y)
    assert abs(nuclear_norm(Q @ Y @ P) - base) / base < 1e-8


def test_nuclear_subgradient_zero_and_diagonal():
    assert np.array_equal(nuclear_subgradient(np.zeros((3, 2))), np.zeros((3, 2)))
    assert np.allclose(nuclear_subgradient(np.diag([3.0, 2.0])), np.eye(2))


def test_nuclear_subgradient_inequality():
    rng = np.random.default_rng(12)
    Y = rng.normal(size=(4, 4))
    G = nuclear_subgradient(Y)
    nY = nuclear_norm(Y)
    for _ in range(100):
        Z = rng.normal(size=(4, 4)) * 2
        assert nuclear_norm(Z) >= nY + np.sum(G * (Z - Y)) - 1e-9


def test_nuclear_subgradient_contracts():
    rng = np.random.default_rng(13)
    Y = rng.normal(size=(5, 3))
    G = nuclear_subgradient(Y, rel_cutoff=0.0)
    assert np.linalg.svd(G, compute_uv=False)[0] <= 1 + 1e-8
    assert abs(np.sum(G * Y) - nuclear_norm(Y)) < 1e-6


def test_column_group_select_single_particle():
    rng = np.random.default_rng(14)
    C = rng.normal(size=(4, 3))  # n=1, K=3
    assert np.array_equal(column_group_select(C, 1, 1, 3), C)


def test_column_group_select_indexing():
    C = np.arange(12.0).reshape(3, 4)  # n=2, K=2
    got = column_group_select(C, 2, 2, 2)
    assert np.array_equal(got, C[:, [1, 3]])


def test_column_group_select_range_errors():
    C = np.zeros((3, 4))
    with pytest.raises(ValueError):
        column_group_select(C, 0, 2, 2)
    with pytest.raises(ValueError):
        column_group_select(C, 3, 2, 2)
    with pytest.raises(ValueError):
        column_group_select(C, 1, 3, 2)  # wrong column count


def test_column_group_scatter_roundtrip_and_single():
    rng = np.random.default_rng(15)
    W = rng.normal(size=(3, 2))
    assert np.array_equal(column_group_scatter(W, 1, 1, 2, (3, 2)), W)
    out = column_group_scatter(W, 2, 4, 2, (3, 8))
    assert np.array_equal(column_group_select(out, 2, 4, 2), W)


def test_column_group_scatter_shape_errors():
    with pytest.raises(ValueError):
        column_group_scatter(np.zeros((3, 2)), 1, 2, 2, (3, 5))
    with pytest.raises(ValueError):
        column_group_scatter(np.zeros((3, 3)), 1, 2, 2, (3, 4))


def test_select_scatter_adjoint_identity():
    rng = np.random.default_rng(16)
    n, K, N = 3, 4, 5
    C = rng.normal(size=(N, n * K))
    for i in range(1, n + 1):
        W = rng.normal(size=(N, K))
        lhs = np.sum(column_group_select(C, i, n, K) * W)
        rhs = np.sum(C * column_group_scatter(W, i, n, K, C.shape))
        assert np.isclose(lhs, rhs, atol=1e-12)


def test_jacobi_oracle_agrees_with_itself_on_known_spectrum():
    # sanity for the test oracle: eigenvalues of a known symmetric matrix
    evals, evecs = jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(evals, [3.0, 1.0])
    assert np.allclose(evecs @ np.diag(evals) @ evecs.T, [[2, 1], [1, 2]], atol=1e-12)
