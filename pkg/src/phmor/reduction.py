"""Structure-preserving model reduction of decoupled pHDAEs.

All methods operate on the three-block form (BlockPHDAE): the
energy-carrying dynamic state x1 is reduced while the kernel and
algebraic states are kept, so every explicit and hidden constraint of
the original system survives in the reduced model.

* ``balance_split`` computes a balancing (or balancing-free) splitting
  of the dynamic state from the two Lyapunov Gramians of the closed
  dynamic subsystem.
* ``open_resistive_port`` rewrites the system with the dissipation
  exposed as a resistive port (an ordered PSD factorization of the
  transformed R), the common starting point of ECRM and FCRM.
* ``ecrm`` cuts the effort variables of the discarded states (Effort
  Constraint Reduction Method).
* ``fcrm`` cuts the flow variables instead (Flow Constraint Reduction
  Method); it requires the discarded-block interconnection matrix to be
  invertible and generally introduces feed-through terms.
* ``moment_match`` performs one-sided rational Krylov interpolation in
  energy coordinates.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .analysis import StateSpace, _stable_gramian, proper_part
from .errors import (
    DimensionError,
    NotApplicableError,
    PhmorError,
    ShiftAtPoleError,
)
from .kernels import arnoldi, cholesky_spd, ordered_psd_factorization
from .model import BlockPHDAE, PHDAESystem

__all__ = [
    "BalancingSplit",
    "balance_split",
    "OpenPortRepresentation",
    "open_resistive_port",
    "ReducedModel",
    "ecrm",
    "fcrm",
    "moment_match",
    "compute_moments",
]


@dataclass(frozen=True)
class ReducedModel:
    """A reduced pHDAE with its provenance.

    ``system`` is the assembled reduced pHDAE; r, n2, n3 give the block
    partition of its state (reduced dynamic, kernel, algebraic).
    ``block`` is the reduced three-block form when the method produces
    one (ECRM, MM); FCRM models carry feed-through and have block None.
    """

    system: PHDAESystem
    method: str
    r: int
    n2: int
    n3: int
    shift: object = None
    block: BlockPHDAE = None
    provenance: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BalancingSplit:
    """Splitting of the dynamic state from Lyapunov balancing.

    Vhat is invertible (n1 x n1); its leading columns span the dominant
    reachable/observable directions in decreasing Hankel order.  With
    balancing_free the leading columns are orthonormalized, trading the
    balanced coordinates for better conditioning.  hankel holds the
    Hankel singular values (padded with zeros past the numerical rank).
    """

    Vhat: np.ndarray
    hankel: np.ndarray
    r: int
    balancing_free: bool


def _psd_factor(X):
    """Factor a symmetric PSD matrix X = Z Z^T with Z of full numerical
    column rank."""
    w, V = np.linalg.eigh(0.5 * (X + X.T))
    w = w[::-1]
    V = V[:, ::-1]
    wmax = float(w[0]) if w.size else 0.0
    keep = w > max(wmax, 0.0) * 1e-15
    return V[:, keep] * np.sqrt(np.maximum(w[keep], 0.0))


def balance_split(block, r, balancing_free=False):
    """Balancing splitting of the dynamic state of a BlockPHDAE.

    Solves the two Lyapunov equations of the closed dynamic subsystem
    (algebraic couplings eliminated), forms the square-root balancing
    transformation, and completes it to an invertible change of basis.
    Neutral system invariants that are neither excited nor observed are
    deflated; genuinely unstable dynamics raise NotStableError.
    """
    n1 = block.n1
    if not 0 < r <= n1:
        raise DimensionError("balance_split: need 0 < r <= n1 = %d" % n1)
    ss = proper_part(block)
    nd = ss.n  # n1 + n2; the kernel part is unreachable in energy terms
    A = ss.A[:n1, :n1]
    Bp = ss.B[:n1]
    Cp = ss.C[:, :n1]

    Xc = _stable_gramian(A, Bp)
    Xo = _stable_gramian(A.T, Cp.T)
    Zc = _psd_factor(Xc)
    Zo = _psd_factor(Xo)
    U, sig, Vt = np.linalg.svd(Zo.T @ Zc)
    smax = float(sig[0]) if sig.size else 0.0
    ell = int(np.sum(sig > smax * 1e-13))
    if ell == 0:
        raise PhmorError("balance_split: the dynamic subsystem is zero")
    T = Zc @ (Vt[:ell].T / np.sqrt(sig[:ell]))
    if balancing_free:
        T, _ = np.linalg.qr(T)

    # complete to an invertible basis with the orthogonal complement
    Qfull, _ = np.linalg.qr(T, mode="complete")
    Vhat = np.column_stack([T, Qfull[:, ell:]]) if ell < n1 else T
    hankel = np.zeros(n1)
    hankel[: sig.size] = sig
    return BalancingSplit(Vhat=Vhat, hankel=hankel, r=r, balancing_free=balancing_free)


@dataclass(frozen=True)
class OpenPortRepresentation:
    """BlockPHDAE rewritten in split coordinates with the dissipation
    exposed as a resistive port.

    The dynamic state was transformed by Vhat (energy-preserving
    congruence); C and Rhat give the ordered PSD factorization
    R = C Rhat C^T of the transformed dissipation matrix.  Block
    accessors partition at a chosen reduced order r.
    """

    n1: int
    n2: int
    n3: int
    J: np.ndarray
    R: np.ndarray
    Q11: np.ndarray
    Q31: np.ndarray
    Q32: np.ndarray
    Q33: np.ndarray
    B: np.ndarray
    C: np.ndarray
    Rhat: np.ndarray
    split: BalancingSplit

    @property
    def n(self):
        return self.n1 + self.n2 + self.n3

    @property
    def m(self):
        return self.B.shape[1]

    def as_block(self):
        return BlockPHDAE(
            n1=self.n1,
            n2=self.n2,
            n3=self.n3,
            J=self.J,
            R=self.R,
            Q11=self.Q11,
            Q31=self.Q31,
            Q32=self.Q32,
            Q33=self.Q33,
            B=self.B,
        )


def open_resistive_port(block, split, recon_tol=1e-8):
    """Transform a BlockPHDAE by the balancing split and factor the
    dissipation matrix into a resistive port.

    The congruence uses V = diag(Vhat, I, I) and U = V^{-T}, which
    leaves E invariant and maps Q11 to Vhat^T Q11 Vhat.  The transformed
    R is factored as C Rhat C^T with Rhat diagonal SPD and the
    reconstruction is verified against recon_tol.
    """
    n1, n2, n3 = block.n1, block.n2, block.n3
    Vhat = split.Vhat
    if Vhat.shape != (n1, n1):
        raise DimensionError("open_resistive_port: split size mismatch")
    n = block.n
    Vinv = np.linalg.inv(Vhat)
    s1 = block.s1

    def congr(M):
        # V^{-1} M V^{-T} acting on the leading block only
        out = M.copy()
        out[s1, :] = Vinv @ out[s1, :]
        out[:, s1] = out[:, s1] @ Vinv.T
        return out

    Jt = congr(block.J)
    Jt = 0.5 * (Jt - Jt.T)
    Rt = congr(block.R)
    Rt = 0.5 * (Rt + Rt.T)
    Bt = block.B.copy()
    Bt[s1] = Vinv @ Bt[s1]
    Q11t = Vhat.T @ block.Q11 @ Vhat
    Q11t = 0.5 * (Q11t + Q11t.T)
    Q31t = block.Q31 @ Vhat

    fac = ordered_psd_factorization(Rt)
    recon = fac.C @ fac.Rhat @ fac.C.T
    scale = max(float(np.linalg.norm(Rt)), 1.0)
    if float(np.linalg.norm(recon - Rt)) > recon_tol * scale:
        raise PhmorError(
            "open_resistive_port: resistive factorization failed to "
            "reconstruct R within tolerance"
        )
    return OpenPortRepresentation(
        n1=n1,
        n2=n2,
        n3=n3,
        J=Jt,
        R=Rt,
        Q11=Q11t,
        Q31=Q31t,
        Q32=block.Q32.copy(),
        Q33=block.Q33.copy(),
        B=Bt,
        C=fac.C,
        Rhat=fac.Rhat,
        split=split,
    )


def _keep_indices(rep, r):
    n1 = rep.n1
    if not 0 < r <= n1:
        raise DimensionError("reduction order r=%d out of range (n1=%d)" % (r, n1))
    keep = np.concatenate([np.arange(r), np.arange(n1, rep.n)])
    drop = np.arange(r, n1)
    return keep, drop


def ecrm(rep, r):
    """Effort Constraint Reduction Method.

    Keeps the principal subsystem of the leading r dynamic states plus
    the kernel and algebraic blocks; the energy matrix is corrected by
    the Schur complement of the discarded block so that the reduced
    Hamiltonian matches the restricted one.
    """
    keep, drop = _keep_indices(rep, r)
    n2, n3 = rep.n2, rep.n3
    J = rep.J[np.ix_(keep, keep)]
    R = rep.R[np.ix_(keep, keep)]
    B = rep.B[keep]

    Q11 = rep.Q11
    Qrr = Q11[:r, :r]
    Qrs = Q11[:r, r:]
    Qss = Q11[r:, r:]
    if drop.size:
        Kss = cholesky_spd(Qss)
        Y = scipy.linalg.cho_solve((Kss, True), Qrs.T)
        Q11r = Qrr - Qrs @ Y
        Q31r = rep.Q31[:, :r] - rep.Q31[:, r:] @ Y
    else:
        Q11r = Qrr.copy()
        Q31r = rep.Q31[:, :r].copy()

    block = BlockPHDAE(
        n1=r,
        n2=n2,
        n3=n3,
        J=J,
        R=R,
        Q11=0.5 * (Q11r + Q11r.T),
        Q31=Q31r,
        Q32=rep.Q32.copy(),
        Q33=rep.Q33.copy(),
        B=B,
    )
    from .model import assemble_block

    return ReducedModel(
        system=assemble_block(block),
        method="ecrm",
        r=r,
        n2=n2,
        n3=n3,
        block=block,
        provenance={"hankel": rep.split.hankel.copy()},
    )


def fcrm(rep, r):
    """Flow Constraint Reduction Method.

    Eliminates the flows of the discarded dynamic states through the
    interconnection matrix; requires the discarded skew block J11^ss to
    be invertible (impossible for odd discarded dimension) and produces
    feed-through terms P, S, N in general.
    """
    n1, n2, n3 = rep.n1, rep.n2, rep.n3
    keep, drop = _keep_indices(rep, r)
    s = slice(r, n1)
    ns = n1 - r
    if ns == 0:
        # nothing is discarded; the method degenerates to the identity
        return _fcrm_degenerate(rep, r)
    Jss = rep.J[s, s]
    scale = max(float(np.linalg.norm(rep.J)), 1.0)
    if ns % 2 == 1:
        raise NotApplicableError(
            "fcrm: discarded dimension %d is odd, the skew-symmetric "
            "block J11^ss is singular" % ns
        )
    if float(np.linalg.norm(Jss)) <= 1e-10 * scale:
        raise NotApplicableError("fcrm: the skew-symmetric block J11^ss vanishes")
    if 1.0 / float(np.linalg.cond(Jss)) < 1e-12:
        raise NotApplicableError("fcrm: the skew-symmetric block J11^ss is singular")

    lu_piv = scipy.linalg.lu_factor(Jss)

    def jss_solve(M):
        return scipy.linalg.lu_solve(lu_piv, M)

    nk = keep.size  # r + n2 + n3
    Jsk = rep.J[s, :][:, keep]  # [J_sr, J_s2, J_s3]
    Jks = rep.J[np.ix_(keep, np.arange(r, n1))]
    X = jss_solve(Jsk)  # Jss^{-1} [Jsr Js2 Js3]

    # reduced interconnection: J_kk - J_ks Jss^{-1} J_sk
    Jred = rep.J[np.ix_(keep, keep)] - Jks @ X
    Jred = 0.5 * (Jred - Jred.T)

    B1s = rep.B[s]
    Bk = rep.B[keep]
    # script-B rows: B1s^T Jss^{-1} J_sk - Bk^T
    Bscr = B1s.T @ X - Bk.T

    C1s = rep.C[s]
    Ck = rep.C[keep]
    Cscr = C1s.T @ X - Ck.T

    Gscr = C1s.T @ jss_solve(B1s)
    Dscr = C1s.T @ jss_solve(C1s)
    Nscr = B1s.T @ jss_solve(B1s)

    Rh = rep.Rhat
    M = np.eye(Rh.shape[0]) - Dscr @ Rh
    if Rh.shape[0] and 1.0 / max(float(np.linalg.cond(M)), 1.0) < 1e-13:
        raise NotApplicableError("fcrm: resistive feedback loop is singular")
    Z = Rh @ np.linalg.inv(M) if Rh.shape[0] else np.zeros((0, 0))
    ZR = 0.5 * (Z + Z.T)
    ZJ = 0.5 * (Z - Z.T)

    Jfc = Jred - Cscr.T @ ZJ @ Cscr
    Rfc = Cscr.T @ ZR @ Cscr
    Bfc = -Bscr.T - Cscr.T @ ZJ @ Gscr
    Pfc = Cscr.T @ ZR @ Gscr
    Sfc = Gscr.T @ ZR @ Gscr
    Nfc = Gscr.T @ ZJ @ Gscr - Nscr
    Sfc = 0.5 * (Sfc + Sfc.T)
    Nfc = 0.5 * (Nfc - Nfc.T)
    Jfc = 0.5 * (Jfc - Jfc.T)
    Rfc = 0.5 * (Rfc + Rfc.T)

    nred = nk
    Qfc = np.zeros((nred, nred))
    Qfc[:r, :r] = rep.Q11[:r, :r]
    Qfc[r + n2 :, :r] = rep.Q31[:, :r]
    Qfc[r + n2 :, r : r + n2] = rep.Q32
    Qfc[r + n2 :, r + n2 :] = rep.Q33
    E = np.zeros((nred, nred))
    d = np.arange(r + n2)
    E[d, d] = 1.0

    system = PHDAESystem(E=E, J=Jfc, R=Rfc, Q=Qfc, B=Bfc, P=Pfc, S=Sfc, N=Nfc)
    return ReducedModel(
        system=system,
        method="fcrm",
        r=r,
        n2=n2,
        n3=n3,
        block=None,
        provenance={"hankel": rep.split.hankel.copy(), "resistive_rank": Rh.shape[0]},
    )


def _fcrm_degenerate(rep, r):
    block = rep.as_block()
    from .model import assemble_block

    return ReducedModel(
        system=assemble_block(block),
        method="fcrm",
        r=r,
        n2=rep.n2,
        n3=rep.n3,
        block=block,
        provenance={"hankel": rep.split.hankel.copy(), "degenerate": True},
    )


_SHIFT_RCOND = 1e-15


def _dynamic_operator(block):
    """Energy-normalized dynamic data of a BlockPHDAE: returns
    (K, A, Bt) with Q11 = K K^T, A = K^T L11 K and Bt = K^T B1."""
    n1 = block.n1
    L = block.J - block.R
    K = cholesky_spd(block.Q11)
    A = K.T @ L[block.s1, block.s1] @ K
    Bt = K.T @ block.B[block.s1]
    return K, A, Bt


def moment_match(block, r, s0=0.0):
    """One-sided rational Krylov moment matching in energy coordinates.

    The dynamic state is transformed so that the energy matrix becomes
    the identity (Cholesky of Q11); a Galerkin projection onto the
    (block) Krylov space at the expansion point s0 then preserves the
    port-Hamiltonian structure.  s0 may be finite or numpy.inf for
    Markov-parameter matching.  The achieved order can be smaller than
    r when the Krylov space deflates.
    """
    n1, n2, n3 = block.n1, block.n2, block.n3
    if not 0 < r <= n1:
        raise DimensionError("moment_match: need 0 < r <= n1 = %d" % n1)
    K, A, Bt = _dynamic_operator(block)

    if np.isinf(s0):
        basis = arnoldi(lambda v: A @ v, Bt, r, shift=s0)
    else:
        s0c = complex(s0)
        M = A - s0c * np.eye(n1)
        if abs(s0c.imag) == 0.0:
            M = M.real
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu_piv = scipy.linalg.lu_factor(M)
        anorm = np.abs(M).sum(axis=0).max()
        gecon = scipy.linalg.get_lapack_funcs("gecon", (lu_piv[0],))
        rcond, _ = gecon(lu_piv[0], anorm)
        if rcond < _SHIFT_RCOND:
            raise ShiftAtPoleError(
                "moment_match: shift s0=%s coincides with a system pole" % s0
            )
        if abs(s0c.imag) == 0.0:
            basis = arnoldi(
                lambda v: scipy.linalg.lu_solve(lu_piv, v),
                scipy.linalg.lu_solve(lu_piv, Bt),
                r,
                shift=s0,
            )
        else:
            # complex shift: build the complex space, realify the basis
            rr = (r + 1) // 2
            cols = [scipy.linalg.lu_solve(lu_piv, Bt.astype(complex))]
            for _ in range(rr - 1):
                cols.append(scipy.linalg.lu_solve(lu_piv, cols[-1]))
            Craw = np.column_stack([np.column_stack([c.real, c.imag]) for c in cols])
            Qb, Rb = np.linalg.qr(Craw)
            keep = np.abs(np.diag(Rb)) > 1e-12 * max(np.abs(np.diag(Rb)).max(), 1e-300)
            V = Qb[:, keep][:, :r]
            from .kernels import KrylovBasis

            basis = KrylovBasis(V=V, r=V.shape[1], shift=s0, deflated=V.shape[1] < r)

    Vr = basis.V
    ra = basis.r
    if ra == 0:
        raise PhmorError("moment_match: Krylov space is empty")

    # project the dynamic block in energy coordinates; x1 = K V_r x1r
    W = K @ Vr  # dynamic-state basis in original coordinates
    n = block.n
    nred = ra + n2 + n3
    J = np.zeros((nred, nred))
    R = np.zeros((nred, nred))
    B = np.zeros((nred, block.m))
    rows = [np.arange(0, n1), np.arange(n1, n)]

    def proj_rows(M):
        top = W.T @ M[: n1]
        return np.vstack([top, M[n1:]])

    Jp = proj_rows(proj_rows(block.J).T).T
    Rp = proj_rows(proj_rows(block.R).T).T
    J[:, :] = 0.5 * (Jp - Jp.T)
    R[:, :] = 0.5 * (Rp + Rp.T)
    B[:, :] = proj_rows(block.B)

    Q31 = block.Q31 @ np.linalg.solve(K.T, Vr)
    red = BlockPHDAE(
        n1=ra,
        n2=n2,
        n3=n3,
        J=J,
        R=R,
        Q11=np.eye(ra),
        Q31=Q31,
        Q32=block.Q32.copy(),
        Q33=block.Q33.copy(),
        B=B,
    )
    from .model import assemble_block

    return ReducedModel(
        system=assemble_block(red),
        method="mm",
        r=ra,
        n2=n2,
        n3=n3,
        shift=s0,
        block=red,
        provenance={"requested_r": r, "deflated": basis.deflated},
    )


def compute_moments(obj, s0, k, sizes=None):
    """Moments of the transfer function about the expansion point s0.

    For finite s0 returns the list [m_0, ..., m_{k-1}] of the Taylor
    coefficients of G about s0 (m_0 = G(s0), feed-through included).
    For s0 = numpy.inf returns (markov, const): the first k Markov
    parameters of the proper part and, separately, the constant
    polynomial part.
    """
    ss = obj if isinstance(obj, StateSpace) else proper_part(obj, sizes=sizes)
    A, B, C, D = ss.A, ss.B, ss.C, ss.D
    if np.isinf(s0):
        markov = []
        X = B
        for _ in range(k):
            markov.append(C @ X)
            X = A @ X
        return markov, D.copy()
    M = complex(s0) * np.eye(ss.n) - A
    if abs(complex(s0).imag) == 0.0:
        M = M.real
    lu_piv = scipy.linalg.lu_factor(M)
    anorm = np.abs(M).sum(axis=0).max()
    gecon = scipy.linalg.get_lapack_funcs("gecon", (lu_piv[0],))
    rcond, _ = gecon(lu_piv[0], anorm)
    if rcond < _SHIFT_RCOND:
        raise ShiftAtPoleError("compute_moments: s0=%s is a pole" % s0)
    moments = []
    X = scipy.linalg.lu_solve(lu_piv, B)
    moments.append(C @ X + D)
    for _ in range(1, k):
        X = scipy.linalg.lu_solve(lu_piv, X)
        moments.append(C @ X)
    return moments
