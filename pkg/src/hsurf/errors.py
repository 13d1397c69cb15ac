"""Exception hierarchy shared by every module."""


class HsurfError(Exception):
    """Base class for all package errors."""


class ExprSyntaxError(HsurfError, ValueError):
    """Malformed expression text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


class DomainError(HsurfError, ArithmeticError):
    """A pole or branch point was hit while evaluating an expression."""


class ExprOverflowError(HsurfError, ArithmeticError):
    """An elementary function overflowed to a non-finite value."""


class IntegrationError(HsurfError, ArithmeticError):
    """Contour quadrature failed: pole on the path or no convergence."""


class DegeneratePointError(HsurfError, ArithmeticError):
    """S = <eta, eta> vanished (or g' = 0): X and N are undefined here."""


class SingularPointError(HsurfError, ArithmeticError):
    """The point is singular for the requested curvature quantity."""


class GridError(HsurfError, ValueError):
    """Invalid sampling grid or stencil configuration."""


class ExportError(HsurfError):
    """Mesh or profile export failed."""
