"""Exception hierarchy shared by the algebra, catalog, solver and numeric layers."""


class MHDBlowupError(Exception):
    """Base class for all package errors."""


class DomainError(MHDBlowupError, ValueError):
    """A field was evaluated outside its admissible domain.

    Raised at or past the singular time, on the symmetry axis when a term
    needs ``x1**2 + x2**2 > 0``, or when a coefficient denominator vanishes.
    """


class FrameError(MHDBlowupError, ValueError):
    """An operator was applied to a vector field in the wrong frame."""


class ParamError(MHDBlowupError, ValueError):
    """Parameters fall in a family's exclusion set."""


class NoSolution(MHDBlowupError):
    """An ansatz balance has no (unique) solution."""


class UnsupportedField(MHDBlowupError, ValueError):
    """A field lies outside the class an operation can represent exactly."""
