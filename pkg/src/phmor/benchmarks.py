"""Benchmark model builders and their structure-specific decouplings.

Four families of systems are provided:

* ``build_stokes`` -- semidiscretized Stokes flow on the unit square
  using a staggered (MAC) finite-difference grid with no-slip walls;
  an index-2 pHDAE with velocity and pressure states.
* ``build_oseen`` -- the same grid with an additional constant-wind
  convection term, split into its skew-symmetric (transport) and
  symmetric (diffusion-like) parts.
* ``build_msd`` -- a mass-spring-damper chain with a rigid velocity
  constraint between the first and last mass, enforced by a Lagrange
  multiplier; an index-2 pHDAE.
* ``build_msd_minimal_extension`` -- a minimally-extended index-1
  formulation of the constrained chain.  The extended descriptor system
  is not itself port-Hamiltonian; the underlying ODE on the constraint
  manifold is, and is returned alongside.

The ``*_decouple`` companions produce the underlying pHODE, a recovery
map for the eliminated variables, and (lazily) the three-block form used
by the reduction methods.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .decoupling import decouple_index1
from .errors import ConfigError, IndefiniteMatrixError, PhmorError
from .model import PHDAESystem

__all__ = [
    "FlowConfig",
    "MSDConfig",
    "DescriptorSystem",
    "DecoupledSystem",
    "build_stokes",
    "stokes_decouple",
    "build_oseen",
    "oseen_decouple",
    "build_msd",
    "msd_decouple",
    "build_msd_minimal_extension",
    "stokes_hidden_constraints",
    "msd_hidden_constraints",
]


@dataclass(frozen=True)
class FlowConfig:
    """Parameters of the staggered-grid flow benchmarks.

    grid is the number of cells per side, viscosity the kinematic
    viscosity, convection the constant wind (a1, a2) used by the Oseen
    variant, inputs the number of (random, seeded) force inputs.
    """

    grid: int
    viscosity: float = 1.0
    convection: tuple = (0.0, 0.0)
    inputs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.grid < 2:
            raise ConfigError("FlowConfig: grid must be at least 2")
        if self.viscosity <= 0:
            raise ConfigError("FlowConfig: viscosity must be positive")
        if self.inputs < 1:
            raise ConfigError("FlowConfig: inputs must be at least 1")


@dataclass(frozen=True)
class MSDConfig:
    """Parameters of the constrained mass-spring-damper chain.

    masses is the number of masses g; the physical constants follow the
    standard setup: mass 100 each, interior spring/damper constants 2
    and 5, ground springs 2 (4 at both ends), ground dampers 5 (10 at
    both ends).
    """

    masses: int
    mass: float = 100.0
    spring: float = 2.0
    damper: float = 5.0
    ground_spring: float = 2.0
    ground_damper: float = 5.0
    end_ground_spring: float = 4.0
    end_ground_damper: float = 10.0
    input_mass: int = 0

    def __post_init__(self):
        if self.masses < 2:
            raise ConfigError("MSDConfig: need at least two masses")
        if not 0 <= self.input_mass < self.masses:
            raise ConfigError("MSDConfig: input_mass out of range")


@dataclass(frozen=True)
class DescriptorSystem:
    """A plain linear descriptor system E x' = A x + B u, y = C x.

    Used for formulations that are regular but not port-Hamiltonian.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    is_port_hamiltonian: bool = False


class DecoupledSystem:
    """Bundle of (three-block form, underlying ODE, recovery map).

    The block form is built on first access; iterating the bundle yields
    (block, ode, recovery).
    """

    def __init__(self, ode, recovery, block_factory):
        self.ode = ode
        self.recovery = recovery
        self._block_factory = block_factory

    @cached_property
    def block(self):
        return self._block_factory()

    def __iter__(self):
        return iter((self.block, self.ode, self.recovery))


# ----------------------------------------------------------------------
# staggered-grid flow benchmarks


def _flow_grid(cfg):
    """Index maps for the staggered grid: x-velocities on vertical
    interior edges, y-velocities on horizontal interior edges, pressures
    at cell centers with the last cell pinned."""
    M = cfg.grid
    nvx = (M - 1) * M
    nvy = M * (M - 1)
    n_p = M * M - 1

    def vx_index(i, j):
        # i = 1..M-1 (vertical line), j = 0..M-1 (row)
        return j * (M - 1) + (i - 1)

    def vy_index(i, j):
        # i = 0..M-1 (column), j = 1..M-1 (horizontal line)
        return nvx + (j - 1) * M + i

    def p_index(i, j):
        # cell (i, j); the last cell (M-1, M-1) is pinned
        k = j * M + i
        return None if k == n_p else k

    return M, nvx, nvy, n_p, vx_index, vy_index, p_index


def _flow_operators(cfg):
    """Assemble the viscous operator L (symmetric negative definite),
    the convection operator C (centered differences), and the discrete
    divergence D on the staggered grid."""
    M, nvx, nvy, n_p, vx_index, vy_index, p_index = _flow_grid(cfg)
    nv = nvx + nvy
    h = 1.0 / M
    nu = cfg.viscosity
    a1, a2 = cfg.convection

    L = np.zeros((nv, nv))
    C = np.zeros((nv, nv))
    D = np.zeros((n_p, nv))

    cl = nu / h / h
    cc1 = a1 / (2.0 * h)
    cc2 = a2 / (2.0 * h)

    # x-velocity unknowns: walls normal to x carry the value exactly
    # (zero neighbor), walls normal to y are handled by ghost reflection
    for j in range(M):
        for i in range(1, M):
            k = vx_index(i, j)
            diag = -4.0
            # x-direction neighbors (may lie on the wall, value zero)
            for ii, sgn in ((i - 1, -1.0), (i + 1, 1.0)):
                if 1 <= ii <= M - 1:
                    L[k, vx_index(ii, j)] += cl
                    C[k, vx_index(ii, j)] += -sgn * cc1
            # y-direction neighbors (ghost reflection at the walls)
            for jj, sgn in ((j - 1, -1.0), (j + 1, 1.0)):
                if 0 <= jj <= M - 1:
                    L[k, vx_index(i, jj)] += cl
                    C[k, vx_index(i, jj)] += -sgn * cc2
                else:
                    diag -= 1.0
                    C[k, k] += sgn * cc2
            L[k, k] += diag * cl

    # y-velocity unknowns: symmetric roles of the two directions
    for j in range(1, M):
        for i in range(M):
            k = vy_index(i, j)
            diag = -4.0
            for jj, sgn in ((j - 1, -1.0), (j + 1, 1.0)):
                if 1 <= jj <= M - 1:
                    L[k, vy_index(i, jj)] += cl
                    C[k, vy_index(i, jj)] += -sgn * cc2
            for ii, sgn in ((i - 1, -1.0), (i + 1, 1.0)):
                if 0 <= ii <= M - 1:
                    L[k, vy_index(ii, j)] += cl
                    C[k, vy_index(ii, j)] += -sgn * cc1
                else:
                    diag -= 1.0
                    C[k, k] += sgn * cc1
            L[k, k] += diag * cl

    # discrete divergence, one row per free pressure cell
    for j in range(M):
        for i in range(M):
            row = p_index(i, j)
            if row is None:
                continue
            if i + 1 <= M - 1:
                D[row, vx_index(i + 1, j)] += 1.0 / h
            if i >= 1:
                D[row, vx_index(i, j)] -= 1.0 / h
            if j + 1 <= M - 1:
                D[row, vy_index(i, j + 1)] += 1.0 / h
            if j >= 1:
                D[row, vy_index(i, j)] -= 1.0 / h

    return L, C, D


def _build_flow(cfg):
    L, C, D = _flow_operators(cfg)
    nv = L.shape[0]
    n_p = D.shape[0]
    n = nv + n_p

    T = L - C
    A = 0.5 * (T - T.T)
    Ltil = 0.5 * (T + T.T)

    # structural checks
    if float(np.linalg.norm(L - L.T)) > 1e-12 * float(np.linalg.norm(L)):
        raise PhmorError("flow benchmark: viscous operator is not symmetric")
    lam_max = float(np.linalg.eigvalsh(Ltil)[-1])
    if lam_max >= 0.0:
        raise IndefiniteMatrixError(
            "flow benchmark: symmetric part of the velocity operator is "
            "not negative definite (convection too strong for this grid)",
            min_eigenvalue=lam_max,
        )
    if np.linalg.matrix_rank(D) < n_p:
        raise PhmorError("flow benchmark: divergence matrix is rank deficient")

    rng = np.random.default_rng(cfg.seed)
    F = 10.0 * rng.standard_normal((nv, cfg.inputs))

    E = np.zeros((n, n))
    idx = np.arange(nv)
    E[idx, idx] = 1.0
    J = np.zeros((n, n))
    J[:nv, :nv] = A
    J[:nv, nv:] = -D.T
    J[nv:, :nv] = D
    R = np.zeros((n, n))
    R[:nv, :nv] = -Ltil
    Q = np.eye(n)
    B = np.zeros((n, cfg.inputs))
    B[:nv] = F
    sys = PHDAESystem(E=E, J=J, R=R, Q=Q, B=B)
    return sys, A, Ltil, D, F


def build_stokes(cfg):
    """Semidiscretized Stokes flow as an index-2 pHDAE."""
    if cfg.convection != (0.0, 0.0):
        cfg = FlowConfig(
            grid=cfg.grid, viscosity=cfg.viscosity, convection=(0.0, 0.0),
            inputs=cfg.inputs, seed=cfg.seed,
        )
    sys, _, _, _, _ = _build_flow(cfg)
    return sys


def build_oseen(cfg):
    """Semidiscretized Oseen flow (Stokes plus constant-wind convection)
    as an index-2 pHDAE."""
    sys, _, _, _, _ = _build_flow(cfg)
    return sys


class FlowRecovery:
    """Recover the full flow state (v, p) from the decoupled dynamic
    state x2 and the input: v = U2 x2, the wall-normal combination
    U1^T v vanishes, and the pressure follows from the hidden
    constraint."""

    def __init__(self, U1, U2, Z, W12, B1):
        self.U1 = U1
        self.U2 = U2
        self.Z = Z
        self.W12 = W12
        self.B1 = B1

    def full_state(self, x2, u=None):
        x2 = np.asarray(x2, dtype=float).reshape(-1)
        rhs = self.W12 @ x2
        if u is not None:
            rhs = rhs + self.B1 @ np.atleast_1d(np.asarray(u, dtype=float))
        p = np.linalg.solve(self.Z.T, rhs)
        return np.concatenate([self.U2 @ x2, p])


def _flow_decouple(cfg):
    sys, A, Ltil, D, F = _build_flow(cfg)
    nv = D.shape[1]
    n_p = D.shape[0]
    nd = nv - n_p

    # SVD of the discrete gradient: D^T = U [Sigma; 0] V^T
    U, s, Vt = np.linalg.svd(D.T, full_matrices=True)
    Z = Vt.T @ np.diag(s)
    U1 = U[:, :n_p]
    U2 = U[:, n_p:]

    A22 = U2.T @ A @ U2
    L22 = U2.T @ Ltil @ U2
    B2 = U2.T @ F
    ode = PHDAESystem(
        E=np.eye(nd), J=A22, R=-L22, Q=np.eye(nd), B=B2,
    )

    W12 = U1.T @ (A + Ltil) @ U2
    recovery = FlowRecovery(U1=U1, U2=U2, Z=Z, W12=W12, B1=U1.T @ F)

    def block_factory():
        # intermediate index-1 pHDAE on (x2, x1, x3): the differential
        # equation for the wall-consistent combination x1 = U1^T v is
        # replaced by the (equivalent, since x1 vanishes) algebraic one
        n = nv + n_p
        A11 = U1.T @ A @ U1
        A12 = U1.T @ A @ U2
        L11 = U1.T @ Ltil @ U1
        L12 = U1.T @ Ltil @ U2
        E = np.zeros((n, n))
        idx = np.arange(nd)
        E[idx, idx] = 1.0
        J = np.zeros((n, n))
        J[:nd, :nd] = A22
        J[:nd, nd : nd + n_p] = -A12.T
        J[nd : nd + n_p, :nd] = A12
        J[nd : nd + n_p, nd : nd + n_p] = A11
        J[nd : nd + n_p, nd + n_p :] = -Z.T
        J[nd + n_p :, nd : nd + n_p] = Z
        J = 0.5 * (J - J.T)
        R = np.zeros((n, n))
        R[:nd, :nd] = -L22
        R[:nd, nd : nd + n_p] = -L12.T
        R[nd : nd + n_p, :nd] = -L12
        R[nd : nd + n_p, nd : nd + n_p] = -L11
        B = np.zeros((n, F.shape[1]))
        B[:nd] = B2
        B[nd : nd + n_p] = U1.T @ F
        inter = PHDAESystem(E=E, J=J, R=R, Q=np.eye(n), B=B)
        _, block = decouple_index1(inter)
        return block

    return DecoupledSystem(ode=ode, recovery=recovery, block_factory=block_factory)


def stokes_decouple(cfg_or_sys):
    """Decouple the Stokes benchmark; accepts the FlowConfig used to
    build it."""
    cfg = _require_flow_config(cfg_or_sys)
    if cfg.convection != (0.0, 0.0):
        cfg = FlowConfig(
            grid=cfg.grid, viscosity=cfg.viscosity, convection=(0.0, 0.0),
            inputs=cfg.inputs, seed=cfg.seed,
        )
    return _flow_decouple(cfg)


def oseen_decouple(cfg_or_sys):
    """Decouple the Oseen benchmark; accepts the FlowConfig used to
    build it."""
    return _flow_decouple(_require_flow_config(cfg_or_sys))


def _require_flow_config(cfg):
    if not isinstance(cfg, FlowConfig):
        raise ConfigError(
            "flow decoupling works from the FlowConfig (the staggered-grid "
            "structure is needed), not from assembled matrices"
        )
    return cfg


def stokes_hidden_constraints(cfg):
    """Hidden constraints of the flow benchmarks: the divergence rows
    acting on the velocity part, [D 0]."""
    from .decoupling import HiddenConstraints

    _, _, D = _flow_operators(_require_flow_config(cfg))
    nv = D.shape[1]
    n_p = D.shape[0]
    rows = np.zeros((n_p, nv + n_p))
    rows[:, :nv] = D
    return HiddenConstraints(rows=rows)


# ----------------------------------------------------------------------
# constrained mass-spring-damper chain


def _msd_matrices(cfg):
    """Stiffness and damping matrices of the chain (negative definite)
    and the constraint row G."""
    g = cfg.masses
    k = cfg.spring
    d = cfg.damper
    kg = np.full(g, cfg.ground_spring)
    dg = np.full(g, cfg.ground_damper)
    kg[0] = kg[-1] = cfg.end_ground_spring
    dg[0] = dg[-1] = cfg.end_ground_damper

    K = np.zeros((g, g))
    Dm = np.zeros((g, g))
    idx = np.arange(g)
    # interior springs/dampers connect neighbors; ground elements add to
    # the diagonal
    conn_k = np.full(g - 1, k)
    conn_d = np.full(g - 1, d)
    K[idx, idx] = -kg
    K[idx[:-1], idx[:-1]] -= conn_k
    K[idx[1:], idx[1:]] -= conn_k
    K[idx[:-1], idx[1:]] = conn_k
    K[idx[1:], idx[:-1]] = conn_k
    Dm[idx, idx] = -dg
    Dm[idx[:-1], idx[:-1]] -= conn_d
    Dm[idx[1:], idx[1:]] -= conn_d
    Dm[idx[:-1], idx[1:]] = conn_d
    Dm[idx[1:], idx[:-1]] = conn_d

    G = np.zeros((1, g))
    G[0, 0] = 1.0
    G[0, -1] = -1.0
    return K, Dm, G


def build_msd(cfg):
    """Mass-spring-damper chain with a rigid velocity constraint between
    the first and last mass; an index-2 pHDAE with state (p, v, lambda)."""
    g = cfg.masses
    n = 2 * g + 1
    K, Dm, G = _msd_matrices(cfg)
    idx = np.arange(g)

    E = np.zeros((n, n))
    E[idx, idx] = 1.0
    E[g + idx, g + idx] = cfg.mass

    J = np.zeros((n, n))
    J[idx, g + idx] = 1.0
    J[g + idx, idx] = -1.0
    J[g : 2 * g, 2 * g :] = -G.T
    J[2 * g :, g : 2 * g] = G

    R = np.zeros((n, n))
    R[g : 2 * g, g : 2 * g] = -Dm

    Q = np.zeros((n, n))
    Q[:g, :g] = -K
    Q[g + idx, g + idx] = 1.0
    Q[2 * g, 2 * g] = 1.0

    B = np.zeros((n, 1))
    B[g + cfg.input_mass, 0] = 1.0
    return PHDAESystem(E=E, J=J, R=R, Q=Q, B=B)


def _householder_for_constraint(G):
    """Symmetric orthogonal H = I - 2 w w^T with H G^T = ||G|| e1;
    columns 2..g of H span the constraint manifold's velocity
    directions.  Returns (w, ||G||); w is None when H is the identity.
    The reflector is never materialised: at chain lengths in the
    thousands the dense g-by-g matrix would dominate the memory budget,
    while every product with H costs only a rank-1 update."""
    u = G.reshape(-1) / float(np.linalg.norm(G))
    w = u.copy()
    w[0] -= 1.0
    nw = float(np.linalg.norm(w))
    if nw == 0.0:
        return None, float(np.linalg.norm(G))
    w /= nw
    return w, float(np.linalg.norm(G))


def _apply_v2(w, v2):
    """H[:, 1:] @ v2 for H = I - 2 w w^T."""
    out = np.concatenate([[0.0], np.asarray(v2, dtype=float)])
    if w is not None:
        out -= 2.0 * w * float(w[1:] @ v2)
    return out


def _apply_v2t(w, x):
    """H[:, 1:].T @ x."""
    x = np.asarray(x, dtype=float)
    out = x[1:].copy()
    if w is not None:
        out -= 2.0 * w[1:] * float(w @ x)
    return out


def _apply_v1t(w, x):
    """H[:, 0].T @ x."""
    x = np.asarray(x, dtype=float)
    if w is None:
        return float(x[0])
    return float(x[0] - 2.0 * w[0] * (w @ x))


def _reflect_symmetric(X, w):
    """H X H for H = I - 2 w w^T (w unit) and symmetric X, using rank-2
    updates; X is modified in place and returned."""
    t = X @ w
    alpha = float(w @ t)
    X -= np.outer(2.0 * w, t)
    X -= np.outer(t - 2.0 * alpha * w, 2.0 * w)
    return X


class MSDRecovery:
    """Recover the full chain state (p, v, lambda) from the decoupled
    state (p, v2) and the input."""

    def __init__(self, cfg, K, Dm, w, z):
        self.cfg = cfg
        self.K = K
        self.Dm = Dm
        self.w = w
        self.z = z

    def full_state(self, x, u=None):
        g = self.cfg.masses
        x = np.asarray(x, dtype=float).reshape(-1)
        p, v2 = x[:g], x[g:]
        v = _apply_v2(self.w, v2)
        Bfull = np.zeros(g)
        uval = 0.0 if u is None else float(np.atleast_1d(u)[0])
        Bfull[self.cfg.input_mass] = uval
        f = self.K @ p + self.Dm @ v + Bfull
        # the mass matrix is a uniform multiple of the identity, so the
        # reflected masses stay diagonal, the (1,2) coupling vanishes and
        # v1 = 0 identically on the constraint manifold
        lam = np.array([_apply_v1t(self.w, f) / self.z])
        return np.concatenate([p, v, lam])


def msd_decouple(cfg_or_sys):
    """Decouple the constrained chain into its underlying pHODE of
    dimension 2 g - 1 on (p, v2), plus the recovery of (v, lambda)."""
    cfg = cfg_or_sys
    if not isinstance(cfg, MSDConfig):
        raise ConfigError(
            "msd_decouple works from the MSDConfig (the chain structure is "
            "needed), not from assembled matrices"
        )
    g = cfg.masses
    K, Dm, G = _msd_matrices(cfg)
    w, z = _householder_for_constraint(G)

    # the masses are uniform, so the reflected mass matrix is m I and
    # only the damping needs the congruence (two rank-2 updates)
    negD = -Dm
    if w is not None:
        _reflect_symmetric(negD, w)

    nd = 2 * g - 1
    idx = np.arange(g)
    jdx = np.arange(g, nd)
    E = np.zeros((nd, nd))
    E[idx, idx] = 1.0
    E[jdx, jdx] = cfg.mass
    J = np.zeros((nd, nd))
    # V2 = H[:, 1:] = I[:, 1:] - 2 w w[1:]^T assembled without forming H
    # (and its negated transpose likewise, avoiding a strided copy)
    J[idx[1:], g + idx[:-1]] = 1.0
    J[g + idx[:-1], idx[1:]] = -1.0
    if w is not None:
        J[:g, g:] -= np.outer(2.0 * w, w[1:])
        J[g:, :g] += np.outer(2.0 * w[1:], w)
    R = np.zeros((nd, nd))
    R[g:, g:] = negD[1:, 1:]
    del negD
    Q = np.zeros((nd, nd))
    Q[:g, :g] = -K
    Q[jdx, jdx] = 1.0
    B = np.zeros((nd, 1))
    b = np.zeros(g)
    b[cfg.input_mass] = 1.0
    B[g:, 0] = _apply_v2t(w, b)
    ode = PHDAESystem(E=E, J=J, R=R, Q=Q, B=B)

    recovery = MSDRecovery(cfg=cfg, K=K, Dm=Dm, w=w, z=z)

    def block_factory():
        _, block = decouple_index1(ode)
        return block

    return DecoupledSystem(ode=ode, recovery=recovery, block_factory=block_factory)


def msd_hidden_constraints(cfg):
    """Hidden constraint of the chain obtained by differentiating the
    velocity constraint: G M^{-1} (K p + D v - G^T lambda) = 0."""
    from .decoupling import HiddenConstraints

    if not isinstance(cfg, MSDConfig):
        raise ConfigError("msd_hidden_constraints expects an MSDConfig")
    g = cfg.masses
    K, Dm, G = _msd_matrices(cfg)
    GMinv = G / cfg.mass
    rows = np.zeros((1, 2 * g + 1))
    rows[:, :g] = GMinv @ K
    rows[:, g : 2 * g] = GMinv @ Dm
    rows[:, 2 * g :] = -GMinv @ G.T
    return HiddenConstraints(rows=rows)


def build_msd_minimal_extension(cfg):
    """Minimally-extended index-1 formulation of the constrained chain.

    Returns (extended descriptor system, underlying pHODE).  The
    extended system of dimension 2 g + 2 adds a second multiplier that
    enforces the position-level constraint; it is regular of index 1 but
    not port-Hamiltonian.  The underlying pHODE of dimension 2 (g - 1)
    lives on the constraint manifold coordinates (p2, v2).
    """
    if not isinstance(cfg, MSDConfig):
        raise ConfigError("build_msd_minimal_extension expects an MSDConfig")
    g = cfg.masses
    K, Dm, G = _msd_matrices(cfg)
    Mv = np.full(g, cfg.mass)
    n = 2 * g + 2

    # extended descriptor system on (p, v, lambda, mu):
    #   p' = v - G^T mu
    #   M v' = K p + D v - G^T lambda + B u
    #   0 = G v
    #   0 = G p
    E = np.zeros((n, n))
    idx = np.arange(g)
    E[idx, idx] = 1.0
    E[g + idx, g + idx] = Mv
    A = np.zeros((n, n))
    A[idx, g + idx] = 1.0
    A[:g, 2 * g + 1 :] = -G.T
    A[g : 2 * g, :g] = K
    A[g : 2 * g, g : 2 * g] = Dm
    A[g : 2 * g, 2 * g : 2 * g + 1] = -G.T
    A[2 * g, g : 2 * g] = G
    A[2 * g + 1, :g] = G
    B = np.zeros((n, 1))
    B[g + cfg.input_mass, 0] = 1.0
    C = np.zeros((1, n))
    C[0, g + cfg.input_mass] = 1.0
    dae = DescriptorSystem(E=E, A=A, B=B, C=C, is_port_hamiltonian=False)

    # underlying pHODE on (p2, v2)
    w, _ = _householder_for_constraint(G)
    HKH = K.copy()
    HDH = Dm.copy()
    if w is not None:
        _reflect_symmetric(HKH, w)
        _reflect_symmetric(HDH, w)
    K22 = HKH[1:, 1:].copy()
    D22 = HDH[1:, 1:].copy()
    del HKH, HDH
    nd = 2 * (g - 1)
    gm = g - 1
    E2 = np.zeros((nd, nd))
    jdx = np.arange(gm)
    E2[jdx, jdx] = 1.0
    kdx0 = np.arange(gm, nd)
    E2[kdx0, kdx0] = cfg.mass
    J2 = np.zeros((nd, nd))
    J2[jdx, gm + jdx] = 1.0
    J2[gm + jdx, jdx] = -1.0
    R2 = np.zeros((nd, nd))
    R2[gm:, gm:] = -D22
    Q2 = np.zeros((nd, nd))
    Q2[:gm, :gm] = -K22
    kdx = np.arange(gm, nd)
    Q2[kdx, kdx] = 1.0
    b = np.zeros(g)
    b[cfg.input_mass] = 1.0
    B2 = np.zeros((nd, 1))
    B2[gm:, 0] = _apply_v2t(w, b)
    ode = PHDAESystem(E=E2, J=J2, R=R2, Q=Q2, B=B2)
    return dae, ode
