"""Exception hierarchy shared by the solvers."""


class PTSpectraError(Exception):
    """Base class for all solver errors."""


class SolverError(PTSpectraError):
    """Numerical failure inside a solver (maps to CLI exit code 2)."""


class Overflow(SolverError):
    """A growing Airy solution exceeds the floating-point range."""


class NonFinite(SolverError):
    """Non-finite input or non-finite function value."""


class ToleranceNotMet(SolverError):
    pass


class NoConvergence(SolverError):
    pass


class RootOnContour(SolverError):
    pass


class LostRoot(SolverError):
    """Continuation lost the tracked root; carries the last good (g, E)."""

    def __init__(self, msg, last_g=None, last_E=None):
        super().__init__(msg)
        self.last_g = last_g
        self.last_E = last_E


class SeedMismatch(SolverError):
    pass


class InconsistentC(SolverError):
    pass


class PoleAtAiZero(SolverError):
    pass


class InsufficientData(SolverError):
    pass


class DegenerateDenominator(SolverError):
    pass
