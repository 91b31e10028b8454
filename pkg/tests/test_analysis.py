import numpy as np
import pytest

from phmor import (
    FrequencyGrid,
    PoleError,
    UnboundedError,
    h2_norm,
    hamiltonian,
    hinf_estimate,
    proper_part,
    relative_error_curve,
    simulate_dissipation,
    solve_lyapunov,
    transfer_eval,
)
from phmor.analysis import StateSpace
from phmor.benchmarks import (
    FlowConfig,
    MSDConfig,
    build_msd,
    build_stokes,
    msd_decouple,
    stokes_decouple,
)

from conftest import random_index1_phdae, transfer


def test_transfer_eval_matches_reference(rng):
    sys = random_index1_phdae(rng, n1=5, n2=3, m=2)
    for s in (1.0 + 0j, 0.5j, 0.2 + 0.7j):
        G = transfer_eval(sys, s)
        assert np.abs(G - transfer(sys, s)).max() <= 1e-10 * np.abs(G).max()


def test_transfer_eval_block_and_ode():
    cfg = FlowConfig(grid=4)
    sys = build_stokes(cfg)
    d = stokes_decouple(cfg)
    for s in (1.0 + 0j, 0.3j):
        G = transfer_eval(sys, s)
        assert np.abs(transfer_eval(d.ode, s) - G).max() <= 1e-10 * np.abs(G).max()
        assert np.abs(transfer_eval(d.block, s) - G).max() <= 1e-10 * np.abs(G).max()


def test_transfer_eval_pole_detection():
    # the chain DAE is singular at s = 0 (rigid-body pole)
    sys = build_msd(MSDConfig(masses=5))
    with pytest.raises(PoleError):
        transfer_eval(sys, 0.0 + 0.0j)


def test_relative_error_curve_values_and_flags():
    cfg = MSDConfig(masses=8)
    sys = build_msd(cfg)
    ode = msd_decouple(cfg).ode
    grid = FrequencyGrid.log_spaced(1e-2, 1e2, 25)
    curve = relative_error_curve(sys, ode, grid)
    assert curve.omega.shape == (25,)
    assert np.all(curve.valid)
    assert np.nanmax(curve.rel_err) <= 1e-8


def test_hinf_estimate_scalar_reference():
    # G(s) = 1/(s^2 + 0.2 s + 1): peak at w ~ sqrt(1 - 0.02), |G| ~ 5.0025
    A = np.array([[0.0, 1.0], [-1.0, -0.2]])
    ss = StateSpace(A=A, B=np.array([[0.0], [1.0]]),
                    C=np.array([[1.0, 0.0]]), D=np.zeros((1, 1)))
    est = hinf_estimate(ss, grid=FrequencyGrid.log_spaced(1e-2, 1e2, 200))
    gpeak = np.abs(transfer_eval(ss, 1j * np.sqrt(1 - 0.02)))
    assert est.kind == "hinf_lower_bound"
    assert est.value == pytest.approx(float(gpeak.max()), rel=1e-6)
    assert est.omega == pytest.approx(np.sqrt(1 - 0.02), rel=1e-4)


def test_hinf_estimate_detects_unbounded_feedthrough_difference():
    # a pure gain has constant transfer; comparing against zero is still
    # bounded, but an improper difference (polynomial) must be flagged
    A = np.array([[-1.0, 0.0], [1.0, 0.0]])  # integrator chain -> pole at 0
    ss = StateSpace(A=A, B=np.array([[1.0], [0.0]]),
                    C=np.array([[0.0, 1.0]]), D=np.zeros((1, 1)))
    est = hinf_estimate(ss, grid=FrequencyGrid.log_spaced(1e-2, 1e2, 50))
    assert est.kind == "unbounded" or est.value > 1.0


def test_h2_norm_scalar_reference():
    # G(s) = 1/(s+a): ||G||_H2 = 1/sqrt(2a)
    a = 0.7
    ss = StateSpace(A=np.array([[-a]]), B=np.array([[1.0]]),
                    C=np.array([[1.0]]), D=np.zeros((1, 1)))
    assert h2_norm(ss) == pytest.approx(1.0 / np.sqrt(2 * a), rel=1e-10)


def test_h2_norm_rejects_feedthrough():
    ss = StateSpace(A=np.array([[-1.0]]), B=np.array([[1.0]]),
                    C=np.array([[1.0]]), D=np.array([[0.5]]))
    with pytest.raises(UnboundedError):
        h2_norm(ss)


def test_h2_norm_matches_lyapunov_oracle():
    cfg = FlowConfig(grid=4)
    d = stokes_decouple(cfg)
    val = h2_norm(d.block)
    ss = proper_part(d.block)
    Xo = solve_lyapunov(ss.A.T, ss.C.T @ ss.C)
    ref = np.sqrt(np.trace(ss.B.T @ Xo @ ss.B))
    assert val == pytest.approx(float(ref), rel=1e-9)


def test_proper_part_eliminates_algebraic_block():
    cfg = FlowConfig(grid=4)
    d = stokes_decouple(cfg)
    ss = proper_part(d.block)
    assert ss.A.shape == (d.block.n1, d.block.n1)
    for s in (1.0 + 0j, 0.5j):
        G0 = transfer_eval(d.block, s)
        G1 = ss.C @ np.linalg.solve(s * np.eye(ss.A.shape[0]) - ss.A, ss.B) + ss.D
        assert np.abs(G0 - G1).max() <= 1e-9 * np.abs(G0).max()


def test_simulate_free_decay_dissipates():
    cfg = MSDConfig(masses=5)
    sys = build_msd(cfg)
    g = 5
    x0 = np.zeros(sys.n)
    x0[:g] = np.array([1.0, 0.5, 0.0, -0.5, -1.0])
    res = simulate_dissipation(sys, x0=x0, u=0.0, dt=1e-3, t_final=2.0)
    H = res.hamiltonians
    assert np.all(np.diff(H) <= 1e-12 * max(H[0], 1.0))
    assert H[-1] < H[0]


def test_simulate_power_balance_residual():
    cfg = MSDConfig(masses=5)
    sys = build_msd(cfg)
    res = simulate_dissipation(sys, x0=np.zeros(sys.n), u=1.0, dt=1e-3, t_final=1.0)
    assert res.balance_residual <= 1e-10
    assert res.balance_residual_refined <= 1e-6


def test_simulate_refined_residual_second_order():
    cfg = MSDConfig(masses=5)
    sys = build_msd(cfg)
    r1 = simulate_dissipation(sys, x0=np.zeros(sys.n), u=1.0, dt=2e-3, t_final=0.5)
    r2 = simulate_dissipation(sys, x0=np.zeros(sys.n), u=1.0, dt=1e-3, t_final=0.5)
    assert r2.balance_residual_refined <= r1.balance_residual_refined / 3.0


def test_simulate_input_forms():
    cfg = MSDConfig(masses=4)
    sys = build_msd(cfg)
    args = dict(x0=np.zeros(sys.n), dt=1e-2, t_final=0.2)
    a = simulate_dissipation(sys, u=0.5, **args)
    b = simulate_dissipation(sys, u=lambda t: np.array([0.5]), **args)
    t = np.linspace(0.0, 0.2, 11)
    table = (t, np.full((11, 1), 0.5))
    c = simulate_dissipation(sys, u=table, **args)
    assert np.allclose(a.states[-1], b.states[-1], atol=1e-12)
    assert np.allclose(a.states[-1], c.states[-1], atol=1e-10)
