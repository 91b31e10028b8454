import numpy as np
import pytest

from phmor import (
    IndefiniteMatrixError,
    NotHurwitzError,
    NotSymmetricError,
    arnoldi,
    cholesky_spd,
    ordered_psd_factorization,
    solve_lyapunov,
    svd_full,
)


def test_svd_full_reconstruction(rng):
    A = rng.standard_normal((6, 4))
    U, s, V = svd_full(A)
    S = np.zeros((6, 4))
    S[:4, :4] = np.diag(s)
    assert np.allclose(U @ S @ V.T, A, atol=1e-12)
    assert np.allclose(U.T @ U, np.eye(6), atol=1e-12)
    assert np.allclose(V.T @ V, np.eye(4), atol=1e-12)


def test_ordered_psd_factorization(rng):
    F = rng.standard_normal((8, 5))
    A = F @ F.T
    fac = ordered_psd_factorization(A)
    assert fac.rank == 5
    recon = fac.C @ fac.Rhat @ fac.C.T
    assert np.linalg.norm(recon - A) <= 1e-12 * np.linalg.norm(A)
    d = np.diag(fac.Rhat)
    assert np.all(np.diff(d) <= 1e-12)
    assert np.allclose(fac.C.T @ fac.Chat, 0, atol=1e-12)


def test_ordered_psd_factorization_rejections(rng):
    with pytest.raises(NotSymmetricError):
        ordered_psd_factorization(rng.standard_normal((4, 4)))
    with pytest.raises(IndefiniteMatrixError):
        ordered_psd_factorization(np.diag([1.0, -1.0]))


def test_cholesky_spd(rng):
    F = rng.standard_normal((6, 6))
    A = F @ F.T + 6 * np.eye(6)
    K = cholesky_spd(A)
    assert np.allclose(K @ K.T, A, atol=1e-10)
    with pytest.raises(IndefiniteMatrixError):
        cholesky_spd(np.diag([1.0, -1.0]))


def test_solve_lyapunov(rng):
    n = 12
    A = rng.standard_normal((n, n))
    A -= (np.max(np.linalg.eigvals(A).real) + 0.5) * np.eye(n)
    F = rng.standard_normal((n, 3))
    W = F @ F.T
    X = solve_lyapunov(A, W)
    res = A @ X + X @ A.T + W
    assert np.linalg.norm(res) <= 1e-11 * np.linalg.norm(W)
    with pytest.raises(NotHurwitzError):
        solve_lyapunov(np.diag([1.0, -1.0]), np.eye(2))


def test_arnoldi_orthonormality_and_span(rng):
    n = 30
    A = rng.standard_normal((n, n))
    b = rng.standard_normal(n)
    basis = arnoldi(lambda v: A @ v, b, 8)
    V = basis.V
    assert basis.r == 8
    assert np.linalg.norm(V.T @ V - np.eye(8)) <= 1e-12
    # Krylov vectors lie in the span
    K = np.column_stack([np.linalg.matrix_power(A, j) @ b for j in range(8)])
    proj = V @ (V.T @ K)
    assert np.linalg.norm(proj - K) <= 1e-8 * np.linalg.norm(K)


def test_arnoldi_deflation():
    # operator with a 3-dimensional invariant subspace containing b
    A = np.diag([1.0, 2.0, 3.0, 4.0, 5.0])
    b = np.zeros(5)
    b[:3] = 1.0
    basis = arnoldi(lambda v: A @ v, b, 5)
    assert basis.r == 3
    assert basis.deflated


def test_arnoldi_zero_start():
    basis = arnoldi(lambda v: v, np.zeros(4), 3)
    assert basis.r == 0
