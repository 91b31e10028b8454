import numpy as np
import pytest

from phmor import (
    HiddenConstraints,
    IndexTooHighError,
    NotApplicableError,
    PHDAESystem,
    assemble_block,
    decouple_index1,
    hamiltonian,
    reduce_index2,
    split_kernel,
    validate_phdae,
)
from phmor.benchmarks import (
    FlowConfig,
    MSDConfig,
    build_msd,
    build_stokes,
    msd_hidden_constraints,
    stokes_decouple,
    stokes_hidden_constraints,
)

from conftest import random_index1_phdae, transfer


def test_identity_E_passthrough(rng):
    sys = random_index1_phdae(rng, n1=5, n2=0, scrambled=False)
    dec, block = decouple_index1(sys)
    assert dec.n1 == 5 and dec.n2 == 0
    ode = dec.ode_system()
    for s in (1.0 + 0j, 0.7j):
        G0 = transfer(sys, s)
        G1 = transfer(ode, s)
        assert np.abs(G0 - G1).max() <= 1e-10 * np.abs(G0).max()


def test_decouple_random_index1(rng):
    for trial in range(5):
        sys = random_index1_phdae(rng, n1=5, n2=3, m=2)
        dec, block = decouple_index1(sys)
        assert dec.n1 == 5 and dec.n2 == 3
        ode = dec.ode_system()
        assert validate_phdae(ode).passed
        # transfer equivalence between input and implicit pHODE
        for s in (1.0 + 0j, 0.5j, 0.2 + 0.3j):
            G0 = transfer(sys, s)
            G1 = transfer(ode, s)
            assert np.abs(G0 - G1).max() <= 1e-8 * np.abs(G0).max()
        # decoupled shape: L and Q lower block triangular, E = diag(E11, 0)
        L = dec.L
        assert np.linalg.norm(L[: dec.n1, dec.n1 :]) <= 1e-9 * np.linalg.norm(L)
        assert np.linalg.norm(dec.Q[: dec.n1, dec.n1 :]) == 0.0
        # block form assembles into a valid pHDAE with equal transfer
        bsys = assemble_block(block)
        assert validate_phdae(bsys).passed
        for s in (1.0 + 0j, 0.5j):
            G0 = transfer(sys, s)
            G2 = transfer(bsys, s)
            assert np.abs(G0 - G2).max() <= 1e-8 * np.abs(G0).max()


def test_recover_algebraic_consistency(rng):
    sys = random_index1_phdae(rng, n1=4, n2=3, m=1, scrambled=False)
    dec, _ = decouple_index1(sys)
    u = np.array([0.7])
    x1 = rng.standard_normal(dec.n1)
    x2 = dec.recover_algebraic(x1, u)
    # the algebraic row of the decoupled system must vanish
    L = dec.L
    s1, s2 = dec.s1, dec.s2
    resid = (
        L[s2, s1] @ dec.Q[s1, s1] @ x1
        + L[s2, s2] @ (dec.Q[s2, s1] @ x1 + dec.Q[s2, s2] @ x2)
        + (dec.B[s2] - dec.P[s2]) @ u
    )
    assert np.linalg.norm(resid) <= 1e-9 * max(np.linalg.norm(x1), 1.0)


def test_hamiltonian_invariance(rng):
    sys = random_index1_phdae(rng, n1=4, n2=2, m=1)
    dec, _ = decouple_index1(sys)
    x = rng.standard_normal(sys.n)
    xt = np.linalg.solve(dec.V, x)
    Et = np.zeros((sys.n, sys.n))
    Et[: dec.n1, : dec.n1] = dec.E11
    tsys = PHDAESystem(E=Et, J=dec.J, R=dec.R, Q=dec.Q, B=dec.B, P=dec.P)
    assert hamiltonian(tsys, xt) == pytest.approx(hamiltonian(sys, x), rel=1e-8)


def test_index_too_high_detection():
    # pure index-2 pencil: constraint couples only through the dynamic part
    E = np.diag([1.0, 0.0])
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    R = np.zeros((2, 2))
    sys = PHDAESystem(E=E, J=J, R=R, Q=np.eye(2), B=np.array([1.0, 0.0]))
    with pytest.raises(IndexTooHighError):
        decouple_index1(sys)


def test_split_kernel_shapes_and_energy(rng):
    # dynamic block with a Q kernel: Q11 singular PSD
    n1, n2 = 4, 2
    n = n1 + n2
    E11 = np.diag([1.0, 2.0, 3.0, 4.0])
    E = np.zeros((n, n))
    E[:n1, :n1] = E11
    G = rng.standard_normal((n, n))
    J = 0.5 * (G - G.T)
    F = rng.standard_normal((n, n))
    R = F @ F.T / n
    Q = np.eye(n)
    Q11 = np.diag([2.0, 1.0, 0.0, 0.0]) @ E11  # kernel of dimension 2
    Q[:n1, :n1] = Q11
    sys = PHDAESystem(E=E, J=J, R=R, Q=Q, B=rng.standard_normal((n, 1)))
    dec, block = decouple_index1(sys)
    assert (block.n1, block.n2, block.n3) == (2, 2, 2)
    bsys = assemble_block(block)
    assert validate_phdae(bsys).passed
    for s in (1.0 + 0j, 0.4j):
        G0 = transfer(sys, s)
        G1 = transfer(bsys, s)
        assert np.abs(G0 - G1).max() <= 1e-8 * np.abs(G0).max()


def test_split_kernel_rejects_feedthrough(rng):
    sys = random_index1_phdae(rng, n1=3, n2=2, m=1, scrambled=False)
    sys = PHDAESystem(
        E=sys.E, J=sys.J, R=sys.R, Q=sys.Q, B=sys.B, S=np.array([[1.0]])
    )
    dec, block = decouple_index1(sys)
    assert block is None
    with pytest.raises(NotApplicableError):
        split_kernel(dec)


def test_reduce_index2_passthrough_for_trivial_constraints(rng):
    sys = random_index1_phdae(rng, n1=4, n2=2, m=1)
    out = reduce_index2(sys, HiddenConstraints(rows=np.zeros((1, sys.n))))
    assert out is sys


def test_reduce_index2_stokes_constraints_have_no_algebraic_part():
    # the divergence rows act on the dynamic (velocity) part only, so
    # the preprocessing drops them all and the system is returned as is
    cfg = FlowConfig(grid=3)
    sys = build_stokes(cfg)
    h = stokes_hidden_constraints(cfg)
    out = reduce_index2(sys, h)
    assert out is sys
    # consistency with the structure-specific decoupling
    d = stokes_decouple(cfg)
    for s in (1.0 + 0j, 0.5j):
        G0 = transfer(out, s)
        G1 = transfer(d.ode, s)
        assert np.abs(G0 - G1).max() <= 1e-9 * np.abs(G0).max()


def test_reduce_index2_msd_input_decoupled():
    # the hidden constraint must be input-free for exact reduction: put
    # the force on a mass that does not enter the rigid constraint
    cfg = MSDConfig(masses=4, input_mass=1)
    sys = build_msd(cfg)
    h = msd_hidden_constraints(cfg)
    red = reduce_index2(sys, h)
    assert red.n == sys.n - 1
    assert validate_phdae(red).passed
    for s in (1.0 + 0j, 0.5j, 3.0j, 0.1 + 0.2j):
        G0 = transfer(sys, s)
        G1 = transfer(red, s)
        assert np.abs(G0 - G1).max() <= 1e-9 * np.abs(G0).max()
    # the result has index at most one
    dec, _ = decouple_index1(red)
    assert dec.n1 + dec.n2 == red.n
