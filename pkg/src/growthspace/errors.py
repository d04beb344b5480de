"""Exception types raised by the numerical engines."""


class GrowthSpaceError(Exception):
    """Base class for every error raised by this package."""


class BracketFailure(GrowthSpaceError):
    """No finite bracket around an interior minimum was found."""


class NonFinite(GrowthSpaceError):
    """A log-evaluation produced NaN or -inf where a finite value was required."""


class UnboundedObjective(GrowthSpaceError):
    """A maximisation objective kept increasing past the expansion budget."""


class TruncationBudgetExceeded(GrowthSpaceError):
    """A power series did not certify its tail within the term cap."""


class MinimizerNotBracketed(GrowthSpaceError):
    """The global minimiser of a function could not be located on the grid."""


class PrecisionLoss(GrowthSpaceError):
    """Two evaluations at different working precisions disagreed."""


class WeightUnavailable(GrowthSpaceError):
    """A norm weight could not be computed for some degree."""


class DegreeCapExceeded(GrowthSpaceError):
    """An operation would produce a chaos expansion above the degree cap."""


class EnvelopeMissing(GrowthSpaceError):
    """A growth function carries no exponential envelope constants."""


class ConfigError(GrowthSpaceError):
    """A configuration document or CLI specification is invalid."""
