"""Exception types shared across the package."""


class PositiveLPError(Exception):
    """Base class for all errors raised by this package."""


class ZeroColumn(PositiveLPError):
    """A constraint matrix column has no entries (packing objective unbounded)."""

    def __init__(self, col: int, reason: str = ""):
        self.col = col
        super().__init__(
            reason or f"column {col} has no entries; packing LP is unbounded in that variable"
        )


class NonFinite(PositiveLPError):
    """A matrix entry is NaN or infinite."""

    def __init__(self, row: int, col: int, value: float):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"non-finite entry {value!r} at ({row}, {col})")


class ParseError(PositiveLPError):
    """Malformed Matrix Market input."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")


class NegativeEntry(PositiveLPError):
    """A matrix entry is negative (only non-negative coefficients are supported)."""

    def __init__(self, row: int, col: int):
        self.row, self.col = row, col
        super().__init__(f"negative entry at ({row}, {col})")


class DuplicateEntry(PositiveLPError):
    """The same (row, col) coordinate appears more than once."""

    def __init__(self, row: int, col: int):
        self.row, self.col = row, col
        super().__init__(f"duplicate entry at ({row}, {col})")


class EpsilonOutOfRange(PositiveLPError):
    """Approximation parameter outside the accepted domain."""


class NumericalOverflow(PositiveLPError):
    """An exponential penalty exceeded the representable range.

    Signals that the trajectory invariant Ax <= (1+eps)1 was violated upstream.
    """

    def __init__(self, row: int, iteration: int = -1):
        self.row, self.iteration = row, iteration
        where = f" at iteration {iteration}" if iteration >= 0 else ""
        super().__init__(f"penalty exponent for row {row} exceeds the overflow guard{where}")


class GradientBelowMinusOne(PositiveLPError):
    """A gradient entry below -1, which the smoothed objective cannot produce."""

    def __init__(self, index: int, value: float):
        self.index, self.value = index, value
        super().__init__(f"gradient[{index}] = {value!r} < -1; gradient computation is broken")


class OutOfDomain(PositiveLPError):
    """Argument outside the documented domain of an operation."""


class MonotonicityViolation(PositiveLPError):
    """The smoothed objective increased between iterations (strict mode only)."""

    def __init__(self, iteration: int, increase: float):
        self.iteration, self.increase = iteration, increase
        super().__init__(
            f"objective increased by {increase:.3e} at iteration {iteration} (beyond 1e-9 slack)"
        )


class EmptyAccumulator(PositiveLPError):
    """Dual average requested before any penalties were accumulated."""


class SizeLimit(PositiveLPError):
    """Instance too large for the exact oracle."""


class CycleLimit(PositiveLPError):
    """Simplex pivot budget exhausted (cycling should be impossible with Bland's rule)."""
