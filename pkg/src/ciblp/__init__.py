"""Constructive-interference block-level precoding for the MU-MISO downlink.

One precoding matrix per block of PSK symbol slots, designed by maximizing
the minimum symbol-scaling margin under a pooled block power budget; the
design reduces to a quadratic program over the probability simplex.  The
package also ships ZF/RZF and per-slot CI baselines, an independent primal
oracle, estimator-style wrappers, and a Monte Carlo SER/timing harness with
a CLI.
"""

from .baselines import SCHEMES, ci_slp_precoder, rzf_precoder, zf_precoder
from .constellation import (
    PskConstellation,
    boundary_decomposition,
    decompose_received,
)
from .dual import (
    DualSolution,
    Precoder,
    coupling_matrix,
    power_split_matrices,
    recover_mu,
    recover_precoder,
    solve_ci_blp,
)
from .estimators import (
    CiBlockPrecoder,
    CiSlotPrecoder,
    RegularizedZFPrecoder,
    ZeroForcingPrecoder,
)
from .exceptions import (
    CiblpError,
    ConfigError,
    DegenerateDualError,
    DegenerateGeometryError,
    InfeasibleProblemError,
    SingularGramError,
    SolverBudgetError,
    SolverError,
)
from .geometry import (
    SlotGeometry,
    block_geometry,
    block_scaling,
    build_slot_geometry,
    scaling_vector,
)
from .gram import BlockGram, build_block_gram, gram_matrix
from .lifting import (
    LiftingOperators,
    SymbolBlock,
    complexify_precoder,
    expand_precoder,
    extend_symbols,
    realify_precoder,
)
from .oracle import PrimalSolution, brute_force_tiny, solve_primal_p1
from .simplex_qp import (
    SimplexQpProblem,
    SimplexQpSolution,
    certify,
    project_simplex,
)
from .simplex_qp import solve as solve_simplex_qp
from .simulate import (
    ExperimentConfig,
    SerPoint,
    SerResult,
    TimingResult,
    detect_psk,
    rayleigh_channel,
    run_blocklen,
    run_ser,
    run_timing,
)

__version__ = "0.1.0"

__all__ = [
    "SCHEMES",
    "BlockGram",
    "CiBlockPrecoder",
    "CiSlotPrecoder",
    "CiblpError",
    "ConfigError",
    "DegenerateDualError",
    "DegenerateGeometryError",
    "DualSolution",
    "ExperimentConfig",
    "InfeasibleProblemError",
    "LiftingOperators",
    "Precoder",
    "PrimalSolution",
    "PskConstellation",
    "RegularizedZFPrecoder",
    "SerPoint",
    "SerResult",
    "SimplexQpProblem",
    "SimplexQpSolution",
    "SingularGramError",
    "SlotGeometry",
    "SolverBudgetError",
    "SolverError",
    "SymbolBlock",
    "TimingResult",
    "ZeroForcingPrecoder",
    "block_geometry",
    "block_scaling",
    "boundary_decomposition",
    "brute_force_tiny",
    "build_block_gram",
    "build_slot_geometry",
    "certify",
    "ci_slp_precoder",
    "complexify_precoder",
    "coupling_matrix",
    "decompose_received",
    "detect_psk",
    "expand_precoder",
    "extend_symbols",
    "gram_matrix",
    "power_split_matrices",
    "project_simplex",
    "rayleigh_channel",
    "realify_precoder",
    "recover_mu",
    "recover_precoder",
    "run_blocklen",
    "run_ser",
    "run_timing",
    "rzf_precoder",
    "scaling_vector",
    "solve_ci_blp",
    "solve_primal_p1",
    "solve_simplex_qp",
    "zf_precoder",
    "__version__",
]
