"""Error hierarchy for qcd.

Every error carries the CLI exit code it maps to: 2 for usage, configuration
and precondition failures, 3 for numerical breakdown.
"""


class QcdError(Exception):
    """Base class for all qcd errors."""

    exit_code = 2


class ConfigError(QcdError, ValueError):
    """Invalid run configuration or unreadable operator/weight input."""


class NotSymmetric(QcdError):
    """Two quaternions are not axially symmetric."""


class DimensionMismatch(QcdError):
    """Operands have incompatible shapes."""


class NotAQuaternionicRep(QcdError):
    """A complex matrix lacks the [[A1, -conj(A2)], [A2, conj(A1)]] block pattern."""


class PatchTooLarge(QcdError):
    """The truncation does not contain the operator's finite patch."""


class ZeroWeight(QcdError):
    """A shift weight vanishes where a nonzero weight is required."""


class RealS(QcdError):
    """A real spectral parameter was given where a non-real one is required."""


class SizeMismatch(QcdError):
    """Canonical representations of different size or base point."""


class NumericalBreakdown(QcdError):
    """A numerical procedure could not produce a trustworthy answer."""

    exit_code = 3


class DependentInput(NumericalBreakdown):
    """Vectors are right-linearly dependent over the quaternions."""


class EmptyKernel(NumericalBreakdown):
    """No kernel where a frame was requested."""


class IllConditioned(NumericalBreakdown):
    """Spectral gap or truncation guard below threshold."""


class RankMismatch(NumericalBreakdown):
    """Frames of different rank, or a rank that the operation cannot handle."""


class VanishingSection(NumericalBreakdown):
    """A cross-section vanishes near the evaluation point."""


class NoIntertwiner(NumericalBreakdown):
    """A proposed intertwiner fails to intertwine on the jet span."""
