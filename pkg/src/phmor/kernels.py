"""Dense linear-algebra kernels used by the decoupling and reduction code.

Thin wrappers around LAPACK via numpy/scipy that add the rank handling,
ordering and verification conventions the reductions rely on: full SVD,
ordered symmetric PSD eigendecomposition, Cholesky, a Bartels-Stewart
Lyapunov solve with a Hurwitz guard, and a block Arnoldi process with
reorthogonalization and deflation.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    IndefiniteMatrixError,
    NotHurwitzError,
    NotSymmetricError,
    PhmorError,
)

__all__ = [
    "svd_full",
    "OrderedSpectralFactorization",
    "ordered_psd_factorization",
    "cholesky_spd",
    "solve_lyapunov",
    "KrylovBasis",
    "arnoldi",
    "DEFAULT_RANK_TOL",
]

DEFAULT_RANK_TOL = 1e-12


def svd_full(A):
    """Full singular value decomposition A = U diag(s) V^T.

    Returns (U, s, V) with U p x p, V q x q orthogonal and s the
    nonincreasing singular values.
    """
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise PhmorError("svd_full: input contains non-finite entries")
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    return U, s, Vt.T


@dataclass(frozen=True)
class OrderedSpectralFactorization:
    """Ordered eigendecomposition A = C Rhat C^T of a symmetric PSD matrix.

    C holds the eigenvectors of the eigenvalues above the rank cutoff
    (orthonormal columns, eigenvalues nonincreasing), Chat the orthonormal
    complement spanning the numerical kernel, and Rhat the diagonal SPD
    block of retained eigenvalues.
    """

    C: np.ndarray
    Rhat: np.ndarray
    Chat: np.ndarray
    rank: int


def ordered_psd_factorization(A, rank_tol=DEFAULT_RANK_TOL, sym_tol=1e-10):
    """Eigendecompose a symmetric PSD matrix with eigenvalues ordered
    nonincreasing and truncated at rank_tol * largest eigenvalue."""
    A = np.asarray(A, dtype=float)
    nrm = float(np.linalg.norm(A))
    if nrm > 0 and float(np.linalg.norm(A - A.T)) > sym_tol * nrm:
        raise NotSymmetricError("ordered_psd_factorization: input is not symmetric")
    Asym = 0.5 * (A + A.T)
    w, V = np.linalg.eigh(Asym)
    w = w[::-1]
    V = V[:, ::-1]
    lam_max = float(w[0]) if w.size else 0.0
    if w.size and float(w[-1]) < -sym_tol * max(lam_max, 1.0):
        raise IndefiniteMatrixError(
            "ordered_psd_factorization: input is indefinite",
            min_eigenvalue=float(w[-1]),
        )
    cutoff = rank_tol * lam_max
    rank = int(np.sum(w > cutoff))
    return OrderedSpectralFactorization(
        C=V[:, :rank].copy(),
        Rhat=np.diag(w[:rank]),
        Chat=V[:, rank:].copy(),
        rank=rank,
    )


def cholesky_spd(A):
    """Lower-triangular Cholesky factor K with K K^T = A; raises
    IndefiniteMatrixError if A is not positive definite."""
    A = np.asarray(A, dtype=float)
    try:
        return scipy.linalg.cholesky(0.5 * (A + A.T), lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise IndefiniteMatrixError("cholesky_spd: matrix is not SPD") from exc


def solve_lyapunov(A, W, hurwitz_margin=0.0):
    """Solve A X + X A^T + W = 0 for symmetric W with Hurwitz A.

    Uses the real-Schur (Bartels-Stewart) direct solver; the spectrum of
    A is checked first and NotHurwitzError is raised if any eigenvalue
    has real part >= -hurwitz_margin.  The result is symmetrized.
    """
    A = np.asarray(A, dtype=float)
    W = np.asarray(W, dtype=float)
    eigs = np.linalg.eigvals(A)
    max_re = float(np.max(eigs.real)) if eigs.size else -np.inf
    if max_re >= -hurwitz_margin:
        raise NotHurwitzError(
            "solve_lyapunov: A has an eigenvalue with real part %.3e" % max_re,
            max_real_part=max_re,
        )
    X = scipy.linalg.solve_continuous_lyapunov(A, -W)
    return 0.5 * (X + X.T)


@dataclass(frozen=True)
class KrylovBasis:
    """Orthonormal basis of a (block) Krylov space.

    V has orthonormal columns; r is the achieved dimension, which may be
    smaller than requested when deflation occurs.  shift records the
    expansion point the basis was built for (None when not applicable).
    """

    V: np.ndarray
    r: int
    shift: object = None
    deflated: bool = False


def arnoldi(apply, start_block, r, deflation_tol=1e-12, shift=None):
    """Block Arnoldi process with modified Gram-Schmidt and one full
    reorthogonalization pass.

    Builds an orthonormal basis of the block Krylov space generated by
    the linear operator ``apply`` from the columns of ``start_block``,
    truncated to at most r columns.  Candidate columns whose norm after
    orthogonalization falls below deflation_tol relative to the start
    block are dropped (deflation), so the achieved dimension may be
    smaller than r.
    """
    S = np.asarray(start_block, dtype=float)
    if S.ndim == 1:
        S = S.reshape(-1, 1)
    n = S.shape[0]
    scale = float(np.linalg.norm(S))
    if scale == 0.0 or r == 0:
        return KrylovBasis(V=np.zeros((n, 0)), r=0, shift=shift, deflated=r > 0)

    cols = []
    deflated = False

    def push(v):
        # two MGS passes against the current basis, then accept or deflate
        for _ in range(2):
            for q in cols:
                v = v - q * (q @ v)
        nv = float(np.linalg.norm(v))
        if nv <= deflation_tol * scale:
            return False
        cols.append(v / nv)
        return True

    block = [S[:, j].copy() for j in range(S.shape[1])]
    while len(cols) < r:
        grew = False
        next_block = []
        for v in block:
            accepted = push(v.copy())
            grew = grew or accepted
            if accepted:
                next_block.append(cols[-1])
            if len(cols) >= r:
                break
        if not grew:
            deflated = True
            break
        if len(cols) >= r:
            break
        block = [np.asarray(apply(q), dtype=float).reshape(-1) for q in next_block]

    V = np.column_stack(cols) if cols else np.zeros((n, 0))
    return KrylovBasis(V=V, r=V.shape[1], shift=shift, deflated=deflated or V.shape[1] < r)
