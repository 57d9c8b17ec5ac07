"""Exception types shared across the package."""


class DegenerateStateError(ValueError):
    """Requested state has zero norm (e.g. a nonzero phase index at mu = 0)."""


class TruncationError(RuntimeError):
    """A photon-number cutoff is too small for the requested tolerance."""


class NumericalDiagnosticError(RuntimeError):
    """A quantity that should be real/bounded exceeded its residue tolerance."""
