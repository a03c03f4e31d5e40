"""Exception types raised by t1helix."""


class T1HelixError(Exception):
    """Base class for all library errors."""


class ConfigError(T1HelixError):
    """Malformed or inconsistent run configuration."""


class PointOutsideChart(T1HelixError):
    pass


class DegenerateMetric(T1HelixError):
    pass


class InsufficientSamples(T1HelixError):
    pass


class NoEmbedding(T1HelixError):
    pass


class InvalidCase(T1HelixError):
    pass


class StepUnstable(T1HelixError):
    pass


class ChartExit(T1HelixError):
    pass


class CausalTypeChanges(T1HelixError):
    pass


class NullCurve(T1HelixError):
    pass


class NullGeodesic(T1HelixError):
    pass


class NotNull(T1HelixError):
    pass


class NotPseudoArc(T1HelixError):
    pass


class NonConstantSpeed(T1HelixError):
    pass


class UnknownFixture(T1HelixError):
    pass


class FrameDegenerate(T1HelixError):
    pass


class LightlikeNormal(T1HelixError):
    pass


class ZeroTorsion(T1HelixError):
    pass


class NotAHelix(T1HelixError):
    pass


class UnnormalizedCurve(T1HelixError):
    pass


class AmbiguousFamily(T1HelixError):
    pass
