"""
Exception hierarchy shared by every module.

Class names are part of the public contract: the cli reports them verbatim in
its machine-readable error records.
"""
from typing import Optional


class CausalGroupsError(ValueError):
    """Base class for all toolkit errors"""


class DimensionTooSmall(CausalGroupsError):
    pass


class DimensionMismatch(CausalGroupsError):
    pass


class NonFiniteInput(CausalGroupsError):
    pass


class IndexOutOfRange(CausalGroupsError):
    pass


class DegenerateFeature(CausalGroupsError):
    """A feature has zero spread, so its distance matrix cannot be normalized"""

    def __init__(self, feature: int, message: Optional[str] = None):
        self.feature = feature
        super().__init__(message or f"feature {feature} is constant (zero mean distance)")


class OutOfDomain(CausalGroupsError):
    pass


class ZeroNorm(CausalGroupsError):
    """A mapping matrix has zero Frobenius norm"""

    def __init__(self, sample_index: Optional[int] = None, message: Optional[str] = None):
        self.sample_index = sample_index
        if message is None:
            where = f" for sample {sample_index}" if sample_index is not None else ""
            message = f"mapping matrix has zero Frobenius norm{where}"
        super().__init__(message)


class FeatureCountMismatch(CausalGroupsError):
    pass


class BadK(CausalGroupsError):
    pass


class EmptyInput(CausalGroupsError):
    pass


class GraphTooLarge(CausalGroupsError):
    pass


class NodeCountMismatch(CausalGroupsError):
    pass


class ShapeMismatch(CausalGroupsError):
    pass


class CyclicGraph(CausalGroupsError):
    pass


class LengthMismatch(CausalGroupsError):
    pass


class ZeroDenominator(CausalGroupsError):
    """A metric is undefined because its denominator is zero"""

    def __init__(self, metric: str):
        self.metric = metric
        super().__init__(f"{metric} is undefined: zero denominator")


class WindowOutOfRange(CausalGroupsError):
    pass


class TooFewEmbeddedSamples(CausalGroupsError):
    pass


class TooFewYears(CausalGroupsError):
    pass


class ZeroVariance(CausalGroupsError):
    pass


class AllSubgroupsTooSmall(CausalGroupsError):
    pass


class TooFewSubgroups(CausalGroupsError):
    pass


class ParseError(CausalGroupsError):
    """A CSV cell is missing or not numeric"""

    def __init__(self, row: int, col: int, value: object = None, path: Optional[str] = None):
        self.row = row
        self.col = col
        self.value = value
        self.path = path
        where = f"{path}: " if path else ""
        super().__init__(f"{where}cannot parse cell at row {row}, column {col}: {value!r}")


class TooFewRows(CausalGroupsError):
    pass
