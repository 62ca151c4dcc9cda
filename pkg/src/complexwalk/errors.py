"""Exception types shared across the package."""


class InvalidOrderError(ValueError):
    """Order N outside the supported range."""


class OrderMismatchError(ValueError):
    """Lattice points of different order combined."""


class ResourceCapError(RuntimeError):
    """An enumeration would exceed its configured state cap."""


class NumericalRangeError(ArithmeticError):
    """A value would overflow double precision."""


class UnsupportedError(ValueError):
    """Operation not available for these parameters."""


class InvalidSymmetryError(ValueError):
    """Map does not send the roots of unity onto themselves."""


class InvalidExtensionError(ValueError):
    """Requested parity conflicts with the supplied half-line data."""


class UnsupportedCombinationError(UnsupportedError):
    """Boundary condition not preserved by the generator for this order."""
