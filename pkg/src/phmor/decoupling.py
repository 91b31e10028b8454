"""Structure-preserving separation of dynamic and algebraic variables.

For an index-at-most-one pHDAE, ``decouple_index1`` transforms the system
so that E = diag(E11, 0) with E11 invertible and (J - R) and Q become
lower block triangular.  The dynamic state then satisfies an implicit
pHODE with corrected port matrices (hat coefficients), while the
algebraic state is recovered from an explicit constraint.
``split_kernel`` further rotates the dynamic state to separate the kernel
of the energy matrix, yielding the three-block form used by the
reduction methods.  ``reduce_index2`` lowers an index-two pHDAE to index
at most one using externally supplied hidden constraints of the form
A x = 0.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import (
    IndefiniteMatrixError,
    IndexTooHighError,
    NotApplicableError,
    PhmorError,
    RankAmbiguityError,
)
from .kernels import DEFAULT_RANK_TOL, svd_full
from .model import BlockPHDAE, PHDAESystem

__all__ = [
    "Index1Decoupling",
    "HiddenConstraints",
    "decouple_index1",
    "split_kernel",
    "reduce_index2",
]


def _rank_with_gap(s, rank_tol, what):
    """Numerical rank of a nonincreasing singular value array, with a
    guard against cutoff decisions that are not well separated."""
    if s.size == 0 or s[0] == 0.0:
        return 0
    cutoff = rank_tol * s[0]
    rank = int(np.sum(s > cutoff))
    if 0 < rank < s.size and s[rank] > 0.0:
        gap = s[rank - 1] / s[rank]
        if gap < 10.0:
            raise RankAmbiguityError(
                "%s: singular values straddle the rank cutoff "
                "(gap ratio %.2f)" % (what, gap),
                gap_ratio=gap,
            )
    return rank


@dataclass(frozen=True)
class Index1Decoupling:
    """Result of the index-1 decoupling transformation.

    The transformed system has E = diag(E11, 0), lower block triangular
    L = J - R and Q, and the same feed-through as the input.  n1 is the
    dynamic dimension, n2 the algebraic one.  The implicit pHODE for the
    dynamic state uses the hat-corrected port matrices.
    """

    n1: int
    n2: int
    E11: np.ndarray
    J: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    B: np.ndarray
    P: np.ndarray
    S: np.ndarray
    N: np.ndarray
    Bhat1: np.ndarray
    Phat1: np.ndarray
    Shat: np.ndarray
    Nhat: np.ndarray
    U: np.ndarray
    V: np.ndarray
    cond_L22: float

    @property
    def s1(self):
        return slice(0, self.n1)

    @property
    def s2(self):
        return slice(self.n1, self.n1 + self.n2)

    @property
    def L(self):
        return self.J - self.R

    def ode_system(self):
        """The implicit pHODE governing the dynamic state and the output."""
        s1 = self.s1
        return PHDAESystem(
            E=self.E11,
            J=self.J[s1, s1],
            R=self.R[s1, s1],
            Q=self.Q[s1, s1],
            B=self.Bhat1,
            P=self.Phat1,
            S=self.Shat,
            N=self.Nhat,
        )

    def recover_algebraic(self, x1, u):
        """Solve the explicit constraint for the algebraic state x2."""
        if self.n2 == 0:
            return np.zeros(0)
        s1, s2 = self.s1, self.s2
        L = self.L
        rhs = -(L[s2, s1] @ self.Q[s1, s1] + L[s2, s2] @ self.Q[s2, s1]) @ np.asarray(x1)
        rhs = rhs - (self.B[s2] - self.P[s2]) @ np.atleast_1d(np.asarray(u, dtype=float))
        return np.linalg.solve(L[s2, s2] @ self.Q[s2, s2], rhs)


def decouple_index1(sys, rank_tol=DEFAULT_RANK_TOL):
    """Decouple dynamic and algebraic variables of an index <= 1 pHDAE.

    Returns (Index1Decoupling, BlockPHDAE).  The block form requires the
    input to have no feed-through (P = S = N = 0); when feed-through is
    present the second element is None and split_kernel raises.
    """
    n = sys.n
    Ut, se, Vt = svd_full(sys.E)
    n1 = _rank_with_gap(se, rank_tol, "decouple_index1: rank of E")
    n2 = n - n1

    # first transformation: orthogonal (U~, V) brings E to diag(E11, 0)
    J1 = Ut.T @ sys.J @ Ut
    R1 = Ut.T @ sys.R @ Ut
    Q1 = Ut.T @ sys.Q @ Vt
    B1 = Ut.T @ sys.B
    P1 = Ut.T @ sys.P
    E11 = np.diag(se[:n1])

    if n2 > 0:
        L1 = J1 - R1
        L22 = L1[n1:, n1:]
        Q22 = Q1[n1:, n1:]
        LQ22 = L22 @ Q22
        sv = np.linalg.svd(LQ22, compute_uv=False)
        scale = max(float(np.linalg.norm(J1 - R1)), float(np.linalg.norm(Q1)), 1.0)
        if sv.size == 0 or sv[-1] <= rank_tol * scale:
            raise IndexTooHighError(
                "decouple_index1: L22*Q22 is singular; the system has "
                "differentiation index larger than one"
            )
        cond_L22 = float(np.linalg.cond(L22))

        # second transformation T makes L and Q lower block triangular
        T21 = -np.linalg.solve(L22.T, L1[:n1, n1:].T)
        T = np.eye(n)
        T[n1:, :n1] = T21
        U = Ut @ T
        Tinv = np.eye(n)
        Tinv[n1:, :n1] = -T21
        J2 = T.T @ J1 @ T
        R2 = T.T @ R1 @ T
        Q2 = Tinv @ Q1
        B2 = T.T @ B1
        P2 = T.T @ P1
        # clean the decoupled blocks that vanish by construction
        Q2[:n1, n1:] = 0.0
        L12_res = (J2 - R2)[:n1, n1:]
        J2[:n1, n1:] -= 0.5 * L12_res
        R2[:n1, n1:] += 0.5 * L12_res
        J2 = 0.5 * (J2 - J2.T)
    else:
        cond_L22 = 1.0
        U, J2, R2, Q2, B2, P2 = Ut, J1, R1, Q1, B1, P1

    # hat-corrected port matrices of the implicit pHODE
    if n2 > 0:
        L2 = J2 - R2
        L21, L22 = L2[n1:, :n1], L2[n1:, n1:]
        Bp2 = B2[n1:] + P2[n1:]
        Bm2 = B2[n1:] - P2[n1:]
        corr = 0.5 * L21.T @ np.linalg.solve(L22.T, Bp2)
        Bhat1 = B2[:n1] - corr
        Phat1 = P2[:n1] - corr
        X = Bp2.T @ np.linalg.solve(L22, Bm2)
        Shat = sys.S - 0.5 * (X + X.T)
        Nhat = sys.N - 0.5 * (X - X.T)
    else:
        Bhat1, Phat1, Shat, Nhat = B2.copy(), P2.copy(), sys.S.copy(), sys.N.copy()

    dec = Index1Decoupling(
        n1=n1,
        n2=n2,
        E11=E11,
        J=J2,
        R=R2,
        Q=Q2,
        B=B2,
        P=P2,
        S=sys.S.copy(),
        N=sys.N.copy(),
        Bhat1=Bhat1,
        Phat1=Phat1,
        Shat=Shat,
        Nhat=Nhat,
        U=U,
        V=Vt,
        cond_L22=cond_L22,
    )
    feed = max(
        float(np.linalg.norm(sys.P)),
        float(np.linalg.norm(sys.S)),
        float(np.linalg.norm(sys.N)),
    )
    block = None
    if feed == 0.0:
        block = split_kernel(dec, rank_tol=rank_tol)
    return dec, block


def split_kernel(dec, rank_tol=DEFAULT_RANK_TOL):
    """Rotate the dynamic state to separate the kernel of Q11*E11^{-1}.

    Uses the ordered eigendecomposition Q11 E11^{-1} = U diag(S, 0) U^T
    and the change of variables x = U^T E11 x1, which normalizes the
    dynamic E-block to the identity.  Returns the three-block form with
    n1 = dim(S) energy-carrying states and n2 kernel states.
    """
    feed = max(
        float(np.linalg.norm(dec.P)),
        float(np.linalg.norm(dec.S)),
        float(np.linalg.norm(dec.N)),
    )
    scale = max(float(np.linalg.norm(dec.B)), 1.0)
    if feed > 1e-12 * scale:
        raise NotApplicableError(
            "split_kernel: the three-block form carries no feed-through; "
            "P, S, N must vanish"
        )
    nd, na = dec.n1, dec.n2
    s1, s2 = dec.s1, dec.s2
    Q11 = dec.Q[s1, s1]
    E11inv = np.linalg.inv(dec.E11)
    Sym = Q11 @ E11inv
    Sym = 0.5 * (Sym + Sym.T)
    w, Ubar = np.linalg.eigh(Sym)
    w = w[::-1]
    Ubar = Ubar[:, ::-1]
    wmax = float(w[0]) if w.size else 0.0
    if w.size and float(w[-1]) < -1e-10 * max(wmax, 1.0):
        raise IndefiniteMatrixError(
            "split_kernel: Q11*E11^{-1} is indefinite", min_eigenvalue=float(w[-1])
        )
    ka = int(np.sum(w > rank_tol * max(wmax, 0.0))) if wmax > 0 else 0
    kb = nd - ka
    w = np.maximum(w, 0.0)
    w[ka:] = 0.0

    # dynamic-state transformation: U' = Ubar, V' = E11^{-1} Ubar
    Vp = E11inv @ Ubar
    J = dec.J.copy()
    R = dec.R.copy()
    J[s1, :] = Ubar.T @ J[s1, :]
    J[:, s1] = J[:, s1] @ Ubar
    R[s1, :] = Ubar.T @ R[s1, :]
    R[:, s1] = R[:, s1] @ Ubar
    B = dec.B.copy()
    B[s1] = Ubar.T @ B[s1]
    Q21 = dec.Q[s2, s1] @ Vp

    return BlockPHDAE(
        n1=ka,
        n2=kb,
        n3=na,
        J=J,
        R=R,
        Q11=np.diag(w[:ka]),
        Q31=Q21[:, :ka],
        Q32=Q21[:, ka:],
        Q33=dec.Q[s2, s2].copy(),
        B=B,
    )


@dataclass(frozen=True)
class HiddenConstraints:
    """Hidden constraint rows A with A x = 0 valid on all solutions."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        object.__setattr__(self, "rows", rows)

    @property
    def count(self):
        return self.rows.shape[0]


def reduce_index2(sys, h, rank_tol=DEFAULT_RANK_TOL):
    """Reduce an index-2 pHDAE to index at most one using the hidden
    constraints h (rows A with A x = 0).

    The constraints are row-compressed; rows that do not act on the
    algebraic part of the state (and therefore do not contribute to the
    index reduction) are dropped.  The remaining constraints are rotated
    so that they read A3 x3 = 0 with A3 invertible, which forces x3 = 0;
    the leading subsystem with x3 removed is returned.

    The construction assumes the hidden constraints hold for every input
    (they are uncontrollable); only then is the input-output behavior
    preserved exactly.
    """
    n = sys.n
    A = np.atleast_2d(np.asarray(h.rows, dtype=float))
    if A.shape[1] != n:
        raise PhmorError("reduce_index2: constraint rows have wrong width")
    if A.shape[0] == 0 or float(np.linalg.norm(A)) == 0.0:
        return sys

    U1, se, V1 = svd_full(sys.E)
    ne = _rank_with_gap(se, rank_tol, "reduce_index2: rank of E")
    AV = A @ V1
    A2t = AV[:, ne:]

    # row compression: keep only the part of the constraints acting on
    # the algebraic state directions
    Uc, sc, _ = svd_full(A2t) if A2t.size else (np.eye(A.shape[0]), np.zeros(0), None)
    c = _rank_with_gap(sc, rank_tol, "reduce_index2: rank of algebraic constraint part")
    if c == 0:
        return sys
    AV = Uc.T[:c] @ AV
    A1 = AV[:, :ne]
    A2t = AV[:, ne:]

    # rotate so that the constraint block reads [0 A3] with A3 invertible
    Ua, sa, Va = svd_full(A2t)
    V2t = np.column_stack([Va[:, c:], Va[:, :c]])
    A3 = A2t @ V2t[:, -c:]

    elim = np.eye(n)
    elim[n - c :, :ne] = -np.linalg.solve(A3, A1)
    mid = np.eye(n)
    mid[ne:, ne:] = V2t
    V = V1 @ mid @ elim

    # orthogonal U2 zeroing the trailing Q block row
    Qt = U1.T @ sys.Q @ V
    Y = Qt[:, : n - c]
    Uy, sy, _ = svd_full(Y)
    if _rank_with_gap(sy, rank_tol, "reduce_index2: rank of leading Q columns") < n - c:
        raise PhmorError("reduce_index2: leading Q columns are rank deficient")
    U = U1 @ Uy

    Et = U.T @ sys.E @ V
    Jt = U.T @ sys.J @ U
    Rt = U.T @ sys.R @ U
    Qt = np.linalg.solve(U, sys.Q @ V)
    Bt = U.T @ sys.B
    Pt = U.T @ sys.P

    k = n - c
    return PHDAESystem(
        E=Et[:k, :k],
        J=Jt[:k, :k],
        R=Rt[:k, :k],
        Q=Qt[:k, :k],
        B=Bt[:k],
        P=Pt[:k],
        S=sys.S.copy(),
        N=sys.N.copy(),
    )
