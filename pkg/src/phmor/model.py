"""Data model for linear port-Hamiltonian descriptor systems.

A system is described by the coefficient matrices (E, J, R, Q, B, P, S, N)
of

    E x' = (J - R) Q x + (B - P) u,
      y  = (B + P)^T Q x + (S + N) u,

together with the quadratic Hamiltonian H(x) = 1/2 x^T Q^T E x.  The
structural conditions (skew-adjointness of J, symmetry and semidefiniteness
of Q^T E and of the passivity matrix W) are checked by ``validate_phdae``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, IllConditionedError

__all__ = [
    "PHDAESystem",
    "BlockPHDAE",
    "ValidationReport",
    "CheckResult",
    "validate_phdae",
    "hamiltonian",
    "transform",
    "assemble_block",
]


def _as_matrix(a, rows, cols, name):
    a = np.ascontiguousarray(np.atleast_2d(np.asarray(a, dtype=float)))
    if a.shape != (rows, cols):
        raise DimensionError(
            "%s has shape %s, expected (%d, %d)" % (name, a.shape, rows, cols)
        )
    return a


@dataclass(frozen=True)
class PHDAESystem:
    """Coefficient set of a linear constant-coefficient pHDAE."""

    E: np.ndarray
    J: np.ndarray
    R: np.ndarray
    Q: np.ndarray
    B: np.ndarray
    P: np.ndarray = None
    S: np.ndarray = None
    N: np.ndarray = None

    def __post_init__(self):
        E = np.asarray(self.E, dtype=float)
        if E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise DimensionError("E must be square, got shape %s" % (E.shape,))
        n = E.shape[0]
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(n, 1)
        m = B.shape[1]
        object.__setattr__(self, "E", np.ascontiguousarray(E))
        object.__setattr__(self, "J", _as_matrix(self.J, n, n, "J"))
        object.__setattr__(self, "R", _as_matrix(self.R, n, n, "R"))
        object.__setattr__(self, "Q", _as_matrix(self.Q, n, n, "Q"))
        object.__setattr__(self, "B", _as_matrix(B, n, m, "B"))
        for name, rows in (("P", n), ("S", m), ("N", m)):
            val = getattr(self, name)
            if val is None:
                val = np.zeros((rows, m))
            object.__setattr__(self, name, _as_matrix(val, rows, m, name))

    @property
    def n(self):
        return self.E.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    def passivity_matrix(self):
        """The matrix W = [[Q^T R Q, Q^T P], [P^T Q, S]]."""
        QtRQ = self.Q.T @ self.R @ self.Q
        QtP = self.Q.T @ self.P
        return np.block([[QtRQ, QtP], [QtP.T, self.S]])


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a single structural check."""

    residual: float
    reference: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    """Residuals of the structural conditions of a pHDAE."""

    checks: dict
    tol: float

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def summary(self):
        lines = []
        for name, c in self.checks.items():
            lines.append(
                "%-22s %-4s residual=%.3e reference=%.3e"
                % (name, "pass" if c.passed else "FAIL", c.residual, c.reference)
            )
        lines.append("overall: %s (tol=%.1e)" % ("pass" if self.passed else "FAIL", self.tol))
        return "\n".join(lines)


def _relative_check(residual, reference, tol):
    if reference == 0.0:
        return CheckResult(residual, reference, residual == 0.0)
    return CheckResult(residual, reference, residual <= tol * reference)


def _min_eig_check(A, reference, tol):
    """PSD check: smallest eigenvalue of sym(A) must be >= -tol*reference."""
    sym = 0.5 * (A + A.T)
    if sym.size == 0:
        return CheckResult(0.0, reference, True)
    lam_min = float(np.linalg.eigvalsh(sym)[0])
    residual = max(0.0, -lam_min)
    if reference == 0.0:
        reference = 1.0
    return CheckResult(residual, reference, lam_min >= -tol * reference)


def validate_phdae(sys, tol=1e-10):
    """Check the structural conditions of a pHDAE.

    Returns a ValidationReport with one CheckResult per condition:
    skew-adjointness of Q^T J Q, symmetry and positive semidefiniteness
    of Q^T E, symmetry and positive semidefiniteness of the passivity
    matrix W, symmetry of S and skew-symmetry of N.  All residuals are
    measured relative to the Frobenius norm of the tested matrix.
    """
    checks = {}

    # residuals of congruence products are measured against the product
    # of the factor norms: cancellation can make the product norm itself
    # arbitrarily small, in which case round-off of the evaluation (not
    # of the stored data) would dominate a result-relative residual
    nQ = float(np.linalg.norm(sys.Q))

    QtJQ = sys.Q.T @ sys.J @ sys.Q
    ref = nQ * float(np.linalg.norm(sys.J)) * nQ
    checks["skew_adjoint"] = _relative_check(float(np.linalg.norm(QtJQ + QtJQ.T)), ref, tol)

    QtE = sys.Q.T @ sys.E
    ref = nQ * float(np.linalg.norm(sys.E))
    checks["QtE_symmetric"] = _relative_check(float(np.linalg.norm(QtE - QtE.T)), ref, tol)
    checks["QtE_psd"] = _min_eig_check(QtE, ref, tol)

    W = sys.passivity_matrix()
    ref = (
        nQ * float(np.linalg.norm(sys.R)) * nQ
        + 2.0 * nQ * float(np.linalg.norm(sys.P))
        + float(np.linalg.norm(sys.S))
    )
    checks["W_symmetric"] = _relative_check(float(np.linalg.norm(W - W.T)), ref, tol)
    checks["W_psd"] = _min_eig_check(W, ref, tol)

    ref = float(np.linalg.norm(sys.S))
    checks["S_symmetric"] = _relative_check(float(np.linalg.norm(sys.S - sys.S.T)), ref, tol)
    ref = float(np.linalg.norm(sys.N))
    checks["N_skew"] = _relative_check(float(np.linalg.norm(sys.N + sys.N.T)), ref, tol)

    return ValidationReport(checks=checks, tol=tol)


def hamiltonian(sys, x):
    """Evaluate H(x) = 1/2 x^T Q^T E x."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != sys.n:
        raise DimensionError("state has length %d, expected %d" % (x.shape[0], sys.n))
    return 0.5 * float(x @ (sys.Q.T @ (sys.E @ x)))


def transform(sys, U, V, cond_limit=None):
    """Apply the congruence change of variables x = V x~ with row scaling U.

    The transformed coefficients are E~ = U^T E V, J~ = U^T J U,
    R~ = U^T R U, B~ = U^T B, P~ = U^T P, Q~ = U^{-1} Q V; S and N are
    unchanged.  The result is again a pHDAE with the same Hamiltonian:
    H~(V^{-1} x) = H(x).

    Condition numbers of U and V are estimated; if cond_limit is given
    and exceeded, IllConditionedError is raised.
    """
    n = sys.n
    U = _as_matrix(U, n, n, "U")
    V = _as_matrix(V, n, n, "V")
    for name, M in (("U", U), ("V", V)):
        cond = float(np.linalg.cond(M))
        if not np.isfinite(cond) or (cond_limit is not None and cond > cond_limit):
            raise IllConditionedError(
                "transformation matrix %s has condition number %.3e" % (name, cond),
                cond=cond,
            )
    Ut = U.T
    return PHDAESystem(
        E=Ut @ sys.E @ V,
        J=Ut @ sys.J @ U,
        R=Ut @ sys.R @ U,
        Q=np.linalg.solve(U, sys.Q @ V),
        B=Ut @ sys.B,
        P=Ut @ sys.P,
        S=sys.S.copy(),
        N=sys.N.copy(),
    )


@dataclass(frozen=True)
class BlockPHDAE:
    """Three-block decoupled pHDAE with E = diag(I_{n1}, I_{n2}, 0).

    The state splits into a dynamic part x1 (positive-definite energy),
    a kernel part x2 (no energy), and an algebraic part x3.  Q has the
    shape [[Q11, 0, 0], [0, 0, 0], [Q31, Q32, Q33]] with Q11 symmetric
    positive definite and Q33 nonsingular; there is no direct
    dynamic-algebraic flow coupling: (J - R) has zero (1,3) and (2,3)
    blocks.
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

    def __post_init__(self):
        n = self.n1 + self.n2 + self.n3
        object.__setattr__(self, "J", _as_matrix(self.J, n, n, "J"))
        object.__setattr__(self, "R", _as_matrix(self.R, n, n, "R"))
        object.__setattr__(self, "Q11", _as_matrix(self.Q11, self.n1, self.n1, "Q11"))
        object.__setattr__(self, "Q31", _as_matrix(self.Q31, self.n3, self.n1, "Q31"))
        object.__setattr__(self, "Q32", _as_matrix(self.Q32, self.n3, self.n2, "Q32"))
        object.__setattr__(self, "Q33", _as_matrix(self.Q33, self.n3, self.n3, "Q33"))
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(n, 1)
        object.__setattr__(self, "B", _as_matrix(B, n, B.shape[1], "B"))

    @property
    def n(self):
        return self.n1 + self.n2 + self.n3

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def s1(self):
        return slice(0, self.n1)

    @property
    def s2(self):
        return slice(self.n1, self.n1 + self.n2)

    @property
    def s3(self):
        return slice(self.n1 + self.n2, self.n)

    def assembled_E(self):
        E = np.zeros((self.n, self.n))
        d = np.arange(self.n1 + self.n2)
        E[d, d] = 1.0
        return E

    def assembled_Q(self):
        Q = np.zeros((self.n, self.n))
        Q[self.s1, self.s1] = self.Q11
        Q[self.s3, self.s1] = self.Q31
        Q[self.s3, self.s2] = self.Q32
        Q[self.s3, self.s3] = self.Q33
        return Q


def assemble_block(b, tol=1e-10):
    """Assemble a BlockPHDAE into a dense PHDAESystem.

    Checks the block invariants: the (1,3) and (2,3) blocks of (J - R)
    vanish, Q11 is symmetric positive definite, and Q33 is nonsingular.
    """
    L = b.J - b.R
    scale = max(float(np.linalg.norm(L)), 1.0)
    L13 = L[b.s1, b.s3]
    L23 = L[b.s2, b.s3]
    if max(float(np.linalg.norm(L13)), float(np.linalg.norm(L23))) > tol * scale:
        raise DimensionError("dynamic-algebraic coupling (J-R)[1:2,3] is not zero")
    if b.n1 > 0:
        sym_res = float(np.linalg.norm(b.Q11 - b.Q11.T))
        if sym_res > tol * max(float(np.linalg.norm(b.Q11)), 1.0):
            raise DimensionError("Q11 is not symmetric")
        if float(np.linalg.eigvalsh(0.5 * (b.Q11 + b.Q11.T))[0]) <= 0.0:
            raise DimensionError("Q11 is not positive definite")
    if b.n3 > 0 and np.linalg.matrix_rank(b.Q33) < b.n3:
        raise DimensionError("Q33 is singular")
    return PHDAESystem(E=b.assembled_E(), J=b.J, R=b.R, Q=b.assembled_Q(), B=b.B)
