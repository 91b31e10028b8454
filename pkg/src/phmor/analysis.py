"""Frequency- and time-domain analysis utilities.

Transfer function evaluation, relative error curves on logarithmic
frequency grids, sampled H-infinity lower bounds with golden-section
refinement, the H2 norm via the observability Gramian, and a
structure-aware implicit-midpoint time integrator that monitors the
discrete power balance.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DimensionError,
    NotHurwitzError,
    NotStableError,
    PhmorError,
    PoleError,
    UnboundedError,
)
from .model import BlockPHDAE, PHDAESystem

__all__ = [
    "StateSpace",
    "FrequencyGrid",
    "proper_part",
    "transfer_eval",
    "ErrorCurve",
    "relative_error_curve",
    "NormEstimate",
    "hinf_estimate",
    "h2_norm",
    "SimulationResult",
    "simulate_dissipation",
]


@dataclass(frozen=True)
class StateSpace:
    """Standard state-space system x' = A x + B u, y = C x + D u."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]


@dataclass(frozen=True)
class FrequencyGrid:
    """Logarithmically spaced evaluation frequencies (rad/s)."""

    omega: np.ndarray

    @classmethod
    def log_spaced(cls, omega_min=1e-6, omega_max=1e6, samples=400):
        if omega_min <= 0 or omega_max <= omega_min or samples < 2:
            raise PhmorError("FrequencyGrid: invalid range")
        return cls(omega=np.logspace(np.log10(omega_min), np.log10(omega_max), samples))


def _block_sizes(obj):
    from .reduction import ReducedModel

    if isinstance(obj, BlockPHDAE):
        return obj.n1, obj.n2, obj.n3
    if isinstance(obj, ReducedModel):
        return obj.r, obj.n2, obj.n3
    return None


def _descriptor_data(obj):
    """Uniform access to (E, A, B, C, D) for the supported system types."""
    from .benchmarks import DescriptorSystem
    from .reduction import ReducedModel

    if isinstance(obj, StateSpace):
        E = np.eye(obj.n)
        return E, obj.A, obj.B, obj.C, obj.D
    if isinstance(obj, DescriptorSystem):
        m = obj.B.shape[1]
        return obj.E, obj.A, obj.B, obj.C, np.zeros((obj.C.shape[0], m))
    if isinstance(obj, BlockPHDAE):
        from .model import assemble_block

        obj = assemble_block(obj)
    if isinstance(obj, ReducedModel):
        obj = obj.system
    if isinstance(obj, PHDAESystem):
        L = (obj.J - obj.R) @ obj.Q
        return (
            obj.E,
            L,
            obj.B - obj.P,
            (obj.B + obj.P).T @ obj.Q,
            obj.S + obj.N,
        )
    raise PhmorError("unsupported system type: %r" % type(obj).__name__)


def proper_part(obj, sizes=None):
    """Eliminate the algebraic variables of a decoupled system and
    return the proper rational part as a StateSpace (plus constant
    feed-through).

    ``obj`` is a BlockPHDAE, a ReducedModel carrying block sizes, or a
    PHDAESystem whose E is diag over the leading n1+n2 states with the
    trailing n3 algebraic (pass sizes=(n1, n2, n3) in that case).
    """
    sz = sizes if sizes is not None else _block_sizes(obj)
    if sz is None:
        raise PhmorError("proper_part: block sizes are required for this input")
    n1, n2, n3 = sz

    from .reduction import ReducedModel

    if isinstance(obj, BlockPHDAE):
        from .model import assemble_block

        sys = assemble_block(obj)
    elif isinstance(obj, ReducedModel):
        sys = obj.system
    else:
        sys = obj

    E = sys.E
    s3 = slice(n1 + n2, sys.n)
    L = (sys.J - sys.R) @ sys.Q
    Bm = sys.B - sys.P
    Ct = (sys.B + sys.P).T @ sys.Q
    D = sys.S + sys.N

    Edyn = E[: n1 + n2, : n1 + n2]
    Ldd = L[: n1 + n2, : n1 + n2]
    Lda = L[: n1 + n2, s3]
    Lad = L[s3, : n1 + n2]
    Laa = L[s3, s3]
    Bd = Bm[: n1 + n2]
    Ba = Bm[s3]
    Cd = Ct[:, : n1 + n2]
    Ca = Ct[:, s3]

    if n3 > 0:
        try:
            X = np.linalg.solve(Laa, np.column_stack([Lad, Ba]))
        except np.linalg.LinAlgError as exc:
            raise PhmorError("proper_part: algebraic block is singular") from exc
        A = Ldd - Lda @ X[:, : n1 + n2]
        Bp = Bd - Lda @ X[:, n1 + n2 :]
        C = Cd - Ca @ X[:, : n1 + n2]
        Dp = D - Ca @ X[:, n1 + n2 :]
    else:
        A, Bp, C, Dp = Ldd, Bd, Cd, D.copy()

    if float(np.linalg.norm(Edyn - np.eye(n1 + n2))) > 1e-12 * max(
        1.0, float(np.linalg.norm(Edyn))
    ):
        A = np.linalg.solve(Edyn, A)
        Bp = np.linalg.solve(Edyn, Bp)
    return StateSpace(A=A, B=Bp, C=C, D=Dp)


_POLE_RCOND = 1e-15


def transfer_eval(obj, s):
    """Evaluate the transfer function G(s) at a complex point.

    Raises PoleError when the resolvent is numerically singular.
    """
    E, A, Bm, C, D = _descriptor_data(obj)
    M = np.asarray(s * E - A, dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M)
    diag = np.abs(np.diag(lu))
    if diag.min() == 0.0:
        raise PoleError("transfer_eval: resolvent singular at s=%s" % s)
    anorm = np.abs(M).sum(axis=0).max()
    gecon = scipy.linalg.get_lapack_funcs("gecon", (lu,))
    rcond, _ = gecon(lu, anorm)
    if rcond < _POLE_RCOND:
        raise PoleError("transfer_eval: resolvent singular at s=%s" % s)
    return C @ scipy.linalg.lu_solve((lu, piv), Bm.astype(complex)) + D


@dataclass(frozen=True)
class ErrorCurve:
    """Pointwise transfer error along a frequency grid.

    ``valid`` flags samples where both resolvents could be evaluated;
    flagged-out samples hold NaN.
    """

    omega: np.ndarray
    norm_G: np.ndarray
    norm_err: np.ndarray
    rel_err: np.ndarray
    valid: np.ndarray


def _spectral_norm(G):
    return float(np.linalg.norm(G, 2)) if G.size else 0.0


def relative_error_curve(full, reduced, grid=None):
    """Relative spectral-norm error of the reduced transfer function
    along the grid; singular samples are skipped and flagged."""
    if grid is None:
        grid = FrequencyGrid.log_spaced()
    om = np.asarray(grid.omega, dtype=float)
    nG = np.full(om.shape, np.nan)
    ne = np.full(om.shape, np.nan)
    re = np.full(om.shape, np.nan)
    ok = np.zeros(om.shape, dtype=bool)
    for i, w in enumerate(om):
        try:
            G = transfer_eval(full, 1j * w)
            Gr = transfer_eval(reduced, 1j * w)
        except PoleError:
            continue
        nG[i] = _spectral_norm(G)
        ne[i] = _spectral_norm(G - Gr)
        re[i] = ne[i] / nG[i] if nG[i] > 0 else np.nan
        ok[i] = True
    return ErrorCurve(omega=om, norm_G=nG, norm_err=ne, rel_err=re, valid=ok)


@dataclass(frozen=True)
class NormEstimate:
    """Result of a sampled norm computation.

    kind is "hinf_lower_bound" or "unbounded"; omega locates the
    maximizing frequency of the samples (refined).
    """

    value: float
    kind: str
    omega: float
    refine_tol: float


def _err_norm_factory(full, reduced):
    def f(w):
        G = transfer_eval(full, 1j * w)
        if reduced is None:
            return _spectral_norm(G)
        return _spectral_norm(G - transfer_eval(reduced, 1j * w))

    return f


def hinf_estimate(full, reduced=None, grid=None, refine_tol=1e-6):
    """Lower bound for the H-infinity norm of G (or of G - Gr) from grid
    sampling plus golden-section refinement on the log-frequency axis.

    Divergence of the polynomial part is detected by probing large
    frequencies; in that case the estimate reports kind="unbounded".
    """
    if grid is None:
        grid = FrequencyGrid.log_spaced()
    f = _err_norm_factory(full, reduced)
    om = np.asarray(grid.omega, dtype=float)
    vals = np.full(om.shape, -np.inf)
    for i, w in enumerate(om):
        try:
            vals[i] = f(w)
        except PoleError:
            continue
    if not np.isfinite(vals).any():
        raise PhmorError("hinf_estimate: no evaluable grid samples")

    # probe for a divergent polynomial part
    probes = []
    for w in (1e9, 1e10, 1e11):
        try:
            probes.append(f(w))
        except PoleError:
            probes.append(np.nan)
    finite_max = float(np.nanmax(vals))
    if (
        len(probes) == 3
        and np.all(np.isfinite(probes))
        and probes[2] > 5.0 * probes[1] > 5.0 * probes[0]
        and probes[2] > finite_max
    ):
        return NormEstimate(value=np.inf, kind="unbounded", omega=np.inf, refine_tol=refine_tol)

    k = int(np.argmax(vals))
    lo = om[max(k - 1, 0)]
    hi = om[min(k + 1, om.size - 1)]
    a, b = np.log(lo), np.log(hi)
    # golden-section maximization of f(exp(t)) on [a, b]
    gr = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - gr * (b - a)
    d = a + gr * (b - a)

    def safe(t):
        try:
            return f(float(np.exp(t)))
        except PoleError:
            return -np.inf

    fc, fd = safe(c), safe(d)
    while (b - a) > refine_tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = safe(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = safe(d)
    t_best = c if fc >= fd else d
    best = max(float(vals[k]), fc, fd)
    # the limit at infinity is also a valid supremum candidate
    tail = probes[-1]
    if np.isfinite(tail) and tail > best:
        best, t_best = float(tail), np.log(1e11)
    return NormEstimate(
        value=best, kind="hinf_lower_bound", omega=float(np.exp(t_best)), refine_tol=refine_tol
    )


def _split_stable_schur(A, neutral_tol=1e-8):
    """Ordered real Schur form with the asymptotically stable invariant
    subspace leading.  Returns (T, Z, k) with k the stable dimension.
    Raises NotStableError if eigenvalues with positive real part exist.
    """
    scale = max(float(np.linalg.norm(A)), 1.0)
    thresh = neutral_tol * scale

    def select(re, im):
        return re < -thresh

    T, Z, sdim = scipy.linalg.schur(A, output="real", sort=select)
    eigs = np.linalg.eigvals(A)
    if float(eigs.real.max(initial=-np.inf)) > thresh:
        raise NotStableError(
            "system has an eigenvalue with real part %.3e" % float(eigs.real.max())
        )
    return T, Z, int(sdim)


def _stable_gramian(A, F, neutral_tol=1e-8):
    """Controllability-type Gramian of (A, F): solves A X + X A^T +
    F F^T = 0 on the asymptotically stable invariant subspace.

    Neutral eigenvalues (real part within neutral_tol * ||A|| of zero)
    are tolerated only when F has no component in their left invariant
    directions, i.e. the neutral modes are not excited; otherwise
    NotStableError is raised.  This covers conserved quantities such as
    rigid-body invariants that are unreachable and unobservable.
    """
    n = A.shape[0]
    T, Z, k = _split_stable_schur(A, neutral_tol)
    Fs = Z.T @ F
    if k < n:
        resid = float(np.linalg.norm(Fs[k:]))
        if resid > 1e-6 * max(float(np.linalg.norm(F)), 1.0):
            raise NotStableError(
                "neutral modes are excited by the input/output map "
                "(residual %.3e); Gramian does not exist" % resid
            )
        Fs = Fs[:k]
    Ts = T[:k, :k]
    X = scipy.linalg.solve_continuous_lyapunov(Ts, -(Fs @ Fs.T))
    X = 0.5 * (X + X.T)
    Zs = Z[:, :k]
    return Zs @ X @ Zs.T


def h2_norm(obj, sizes=None):
    """H2 norm of a (decoupled) system via the observability Gramian.

    Raises UnboundedError when the feed-through is nonzero and
    NotStableError when the dynamics are not asymptotically stable
    (neutral unreachable/unobservable modes are deflated).
    """
    ss = obj if isinstance(obj, StateSpace) else proper_part(obj, sizes=sizes)
    dscale = max(float(np.linalg.norm(ss.B)) * float(np.linalg.norm(ss.C)), 1.0)
    if float(np.linalg.norm(ss.D)) > 1e-12 * dscale:
        raise UnboundedError("h2_norm: nonzero feed-through, H2 norm is unbounded")
    Xo = _stable_gramian(ss.A.T, ss.C.T)
    val = float(np.trace(ss.B.T @ Xo @ ss.B))
    return float(np.sqrt(max(val, 0.0)))


@dataclass(frozen=True)
class SimulationResult:
    """Implicit-midpoint trajectory with power-balance diagnostics.

    ``balance_residual`` is the per-step discrete power balance residual
    using midpoint quadrature (exact to round-off for this scheme);
    ``balance_residual_refined`` uses Simpson quadrature of the supplied
    power and therefore exhibits the second-order convergence of the
    scheme.  Both are reported as maximal residual per unit time.
    """

    times: np.ndarray
    states: np.ndarray
    outputs: np.ndarray
    hamiltonians: np.ndarray
    dissipated: np.ndarray
    balance_residual: float
    balance_residual_refined: float
    hamiltonian_nonincreasing: bool


def _input_function(u, m):
    if u is None:
        return lambda t: np.zeros(m)
    if callable(u):
        return lambda t: np.atleast_1d(np.asarray(u(t), dtype=float))
    if isinstance(u, tuple) and len(u) == 2:
        tt = np.asarray(u[0], dtype=float)
        uu = np.atleast_2d(np.asarray(u[1], dtype=float))
        if uu.shape[0] != tt.size:
            uu = uu.T

        def interp(t):
            return np.array([np.interp(t, tt, uu[:, j]) for j in range(uu.shape[1])])

        return interp
    const = np.atleast_1d(np.asarray(u, dtype=float))
    return lambda t: const


def simulate_dissipation(block, u, x0, dt, t_final, recovery=None):
    """Integrate the dynamic part of a decoupled pHDAE with the implicit
    midpoint rule and monitor the discrete power balance
    dH/dt = u^T y - dissipation.

    ``block`` is a BlockPHDAE (or a PHDAESystem that is a pure implicit
    ODE with symmetric positive definite E).  The algebraic state is
    recovered from the constraint at every step.  ``u`` may be a
    callable t -> u(t), a constant vector, or a (times, values) table.
    """
    from .model import assemble_block, hamiltonian

    if isinstance(block, BlockPHDAE):
        sys = assemble_block(block)
        nd = block.n1 + block.n2
        n3 = block.n3
    elif isinstance(block, PHDAESystem):
        sys = block
        nd = sys.n
        n3 = 0
    else:
        raise PhmorError("simulate_dissipation: unsupported system type")

    n = sys.n
    sd = slice(0, nd)
    sa = slice(nd, n)
    L = (sys.J - sys.R) @ sys.Q
    E = sys.E
    Edd = E[sd, sd]
    Ldd = L[sd, sd]
    Lda = L[sd, sa]
    Lad = L[sa, sd]
    Laa = L[sa, sa]
    Bm = (sys.B - sys.P)[sd]
    Bma = (sys.B - sys.P)[sa]
    ufun = _input_function(u, sys.m)

    if n3 > 0:
        # close the algebraic coupling: xa = -Laa^{-1} (Lad xd + Bma u)
        Xsol = np.linalg.solve(Laa, np.column_stack([Lad, Bma]))
        Ac = Ldd - Lda @ Xsol[:, :nd]
        Bc = Bm - Lda @ Xsol[:, nd:]
    else:
        Ac, Bc = Ldd, Bm
        Xsol = None

    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] == n:
        xd = x0[:nd].copy()
    elif x0.shape[0] == nd:
        xd = x0.copy()
    else:
        raise DimensionError("simulate_dissipation: x0 has wrong length")

    nsteps = int(round(t_final / dt))
    times = np.arange(nsteps + 1) * dt

    W = sys.passivity_matrix()
    Ct = (sys.B + sys.P).T @ sys.Q
    Dff = sys.S + sys.N
    Q = sys.Q

    def algebraic(xdk, uk):
        if n3 == 0:
            return np.zeros(0)
        return -(Xsol[:, :nd] @ xdk + Xsol[:, nd:] @ uk)

    def full_state(xdk, uk):
        if n3 == 0:
            return xdk
        return np.concatenate([xdk, algebraic(xdk, uk)])

    def power(xdk, uk):
        xf = full_state(xdk, uk)
        y = Ct @ xf + Dff @ uk
        z = np.concatenate([xf, uk])
        return float(uk @ y) - float(z @ (W @ z)), y

    states = np.zeros((nsteps + 1, n))
    outputs = np.zeros((nsteps + 1, sys.m))
    hams = np.zeros(nsteps + 1)
    diss = np.zeros(nsteps + 1)

    uk = ufun(0.0)
    xf = full_state(xd, uk)
    states[0] = xf
    _, y0 = power(xd, uk)
    outputs[0] = y0
    hams[0] = hamiltonian(sys, xf)
    zf = np.concatenate([xf, uk])
    diss[0] = float(zf @ (W @ zf))

    # implicit midpoint: (E - dt/2 A) x+ = (E + dt/2 A) x + dt B u_mid
    Mlhs = Edd - 0.5 * dt * Ac
    Mrhs = Edd + 0.5 * dt * Ac
    lu_piv = scipy.linalg.lu_factor(Mlhs)

    res_mid = 0.0
    res_simp = 0.0
    for k in range(nsteps):
        tk = times[k]
        um = ufun(tk + 0.5 * dt)
        xnew = scipy.linalg.lu_solve(lu_piv, Mrhs @ xd + dt * (Bc @ um))
        xm = 0.5 * (xd + xnew)
        pm, _ = power(xm, um)
        uk1 = ufun(tk + dt)
        p0, _ = power(xd, ufun(tk))
        p1, y1 = power(xnew, uk1)
        xf1 = full_state(xnew, uk1)
        H1 = hamiltonian(sys, xf1)
        H0 = hams[k]
        res_mid = max(res_mid, abs(H1 - H0 - dt * pm) / dt)
        res_simp = max(res_simp, abs(H1 - H0 - dt / 6.0 * (p0 + 4.0 * pm + p1)) / dt)
        xd = xnew
        states[k + 1] = xf1
        outputs[k + 1] = y1
        hams[k + 1] = H1
        zf = np.concatenate([xf1, uk1])
        diss[k + 1] = float(zf @ (W @ zf))

    return SimulationResult(
        times=times,
        states=states,
        outputs=outputs,
        hamiltonians=hams,
        dissipated=diss,
        balance_residual=res_mid,
        balance_residual_refined=res_simp,
        hamiltonian_nonincreasing=bool(np.all(np.diff(hams) <= 1e-12 * max(hams.max(), 1.0))),
    )
