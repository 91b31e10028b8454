import numpy as np
import pytest

from phmor import PHDAESystem


def transfer(sys, s):
    """Reference transfer function evaluation for tests."""
    L = (sys.J - sys.R) @ sys.Q
    M = s * sys.E - L
    return (sys.B + sys.P).T @ sys.Q @ np.linalg.solve(M, sys.B - sys.P) + sys.S + sys.N


def random_index1_phdae(rng, n1=5, n2=3, m=2, scrambled=True):
    """A random valid pHDAE of index at most one.

    Built in decoupled coordinates (E = diag(E11, 0), lower triangular
    L and Q, L22 Q22 invertible) and optionally scrambled by a random
    congruence so the structure is hidden.
    """
    n = n1 + n2
    E11 = _random_spd(rng, n1)
    E = np.zeros((n, n))
    E[:n1, :n1] = E11

    G = rng.standard_normal((n, n))
    J = 0.5 * (G - G.T)
    F = rng.standard_normal((n, n + 2))
    R = F @ F.T / n

    Q = np.eye(n)
    Q[n1:, :n1] = rng.standard_normal((n2, n1))
    Q[n1:, n1:] = _random_spd(rng, n2) + np.eye(n2)
    # make Q^T E symmetric PSD: Q11 = I keeps Q^T E = E11 in the corner
    B = rng.standard_normal((n, m))
    sys = PHDAESystem(E=E, J=J, R=R, Q=Q, B=B)
    if not scrambled:
        return sys
    from phmor import transform

    U = _random_orthogonal(rng, n)
    V = np.linalg.inv(U).T
    return transform(sys, U, V)


def _random_spd(rng, n):
    F = rng.standard_normal((n, n + 2))
    return F @ F.T / n + 0.1 * np.eye(n)


def _random_orthogonal(rng, n):
    Qm, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Qm


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
