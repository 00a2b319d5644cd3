"""Exception types raised by the precoding library."""


class CiblpError(Exception):
    """Base class for all library-specific errors."""


class ConfigError(CiblpError, ValueError):
    """Experiment configuration is missing, malformed, or inconsistent."""


class DegenerateGeometryError(CiblpError, ValueError):
    """The symbol-scaling decomposition basis is singular (e.g. BPSK)."""


class SingularGramError(CiblpError, ValueError):
    """The block Gram matrix is singular or too ill-conditioned to invert."""


class DegenerateDualError(CiblpError, ValueError):
    """The dual quadratic form vanishes; the multiplier cannot be recovered."""


class InfeasibleProblemError(CiblpError, ValueError):
    """The primal problem has no feasible point (degenerate channel)."""


class SolverError(CiblpError, RuntimeError):
    """An iterative solver failed to converge to the requested tolerance."""


class SolverBudgetError(CiblpError, RuntimeError):
    """Too many solver failures during a Monte Carlo run (> 0.1%)."""
