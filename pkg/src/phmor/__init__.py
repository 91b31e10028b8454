"""Structure-preserving model order reduction for linear
port-Hamiltonian differential-algebraic systems.

The package decouples dynamic and algebraic variables of index-1/2
pHDAEs, reduces the dynamic state with the effort/flow constraint
reduction methods (ECRM/FCRM) or structure-preserving moment matching,
and provides frequency/time-domain analysis plus benchmark model
families (Stokes/Oseen flow, constrained mass-spring chains).
"""

import numpy as _np

# Large benchmark instances allocate multi-GB zero-initialised arrays of
# which only structured blocks are ever written.  With transparent huge
# pages a single write commits 2 MiB at a time, which multiplies the
# resident footprint of banded/diagonal writes by ~500 and the build
# time with it; plain 4 KiB pages keep both proportional to the data
# actually touched.
try:  # private numpy knob; absence is harmless
    _np._core.multiarray._set_madvise_hugepage(False)
except AttributeError:  # pragma: no cover - older numpy layouts
    try:
        _np.core.multiarray._set_madvise_hugepage(False)
    except AttributeError:
        pass

from .analysis import (
    ErrorCurve,
    FrequencyGrid,
    NormEstimate,
    SimulationResult,
    StateSpace,
    h2_norm,
    hinf_estimate,
    proper_part,
    relative_error_curve,
    simulate_dissipation,
    transfer_eval,
)
from .decoupling import (
    HiddenConstraints,
    Index1Decoupling,
    decouple_index1,
    reduce_index2,
    split_kernel,
)
from .errors import (
    ConfigError,
    DimensionError,
    IllConditionedError,
    IndefiniteMatrixError,
    IndexTooHighError,
    NotApplicableError,
    NotHurwitzError,
    NotStableError,
    NotSymmetricError,
    PhmorError,
    PoleError,
    RankAmbiguityError,
    ShiftAtPoleError,
    UnboundedError,
)
from .kernels import (
    KrylovBasis,
    OrderedSpectralFactorization,
    arnoldi,
    cholesky_spd,
    ordered_psd_factorization,
    solve_lyapunov,
    svd_full,
)
from .model import (
    BlockPHDAE,
    CheckResult,
    PHDAESystem,
    ValidationReport,
    assemble_block,
    hamiltonian,
    transform,
    validate_phdae,
)
from .reduction import (
    BalancingSplit,
    OpenPortRepresentation,
    ReducedModel,
    balance_split,
    compute_moments,
    ecrm,
    fcrm,
    moment_match,
    open_resistive_port,
)
from .serialize import load_system, save_system

__version__ = "0.1.0"
