"""Exception types shared across the package."""


class FlowReconError(ValueError):
    """Base class for every domain error raised by flowrecon."""


class OddLength(FlowReconError):
    """Signal length must be even for a single transform level; no implicit padding."""


class LengthMismatch(FlowReconError):
    """Paired vectors (coefficients or signals) have incompatible lengths."""


class NotDyadicallyDivisible(FlowReconError):
    """2**levels does not divide the signal length."""

    def __init__(self, levels: int, length: int):
        super().__init__(f"2**{levels} does not divide signal length {length}")
        self.levels = levels
        self.length = length


class LevelOutOfRange(FlowReconError):
    """Decomposition/aggregation level outside the supported ladder."""


class LevelMismatch(FlowReconError):
    """Aggregation level of the input does not match the detail bank."""


class MissingColumn(FlowReconError):
    """A required CSV column is absent from the header."""


class EmptyInput(FlowReconError):
    """The input stream holds no CSV header at all."""


class MixedSensors(FlowReconError):
    """Records from more than one sensor where a single sensor is required."""


class NoTypicalDays(FlowReconError):
    """No fault-free day matched the selection criteria."""


class EmptyDayList(FlowReconError):
    """A profile cannot be built from zero days."""


class ZeroDailyTotal(FlowReconError):
    """Percent normalization needs a positive daily total."""


class ConstantInput(FlowReconError):
    """Correlation is undefined for a constant vector."""


class AllZeroOriginal(FlowReconError):
    """Relative error is undefined when every original slot is zero."""


class EmptyResults(FlowReconError):
    """No day results to summarize."""


class InvalidParams(FlowReconError):
    """Synthetic profile parameters violate their invariants."""
