"""Exception hierarchy shared across the package.

Every error carries a single human-readable message so callers can
re-raise with extra context (e.g. an image id) without losing the type.
"""


class GraspFusionError(Exception):
    """Base class for all errors raised by this package."""


class LengthMismatchError(GraspFusionError):
    """A vector's length does not match its taxonomy."""


class AllZeroError(GraspFusionError):
    """A weight vector sums to zero and cannot be normalized."""


class TaxonomyMismatchError(GraspFusionError):
    """Two values that must share a taxonomy do not."""


class InconsistentPriorError(GraspFusionError):
    """The prior is zero where the fused numerator is positive."""


class DegenerateFusionError(GraspFusionError):
    """The cues have disjoint support; the fused product is all-zero."""


class ZeroSubsetMassError(GraspFusionError):
    """A restriction selects entries whose total mass is zero."""


class UnknownLabelError(GraspFusionError):
    """A grasp label is absent from the taxonomy it is used with."""


class EmptyNameError(GraspFusionError):
    """An object name is empty after normalization."""


class UnknownGraspLabelError(GraspFusionError):
    """An affordance record carries a label outside the taxonomy."""


class EmptyInputError(GraspFusionError):
    """An operation that needs at least one record received none."""


class UnknownObjectError(GraspFusionError):
    """Lookup of an object absent from the database under policy=error."""


class SchemaError(GraspFusionError):
    """A file does not conform to its declared schema."""


class NegativeScoreError(GraspFusionError):
    """A score file contains a negative probability."""


class DuplicateImageIdError(GraspFusionError):
    """A score file repeats an image id."""


class HeaderMissingError(GraspFusionError):
    """A score file lacks the leading header line."""


class NonFiniteError(GraspFusionError):
    """A logit vector contains NaN or infinity."""


class MissingTruthError(GraspFusionError):
    """Evaluation requires ground-truth labels that are absent."""


class ImpossibleObservationError(GraspFusionError):
    """A queried observation has zero probability under the world."""


class BadParameterError(GraspFusionError):
    """A simulator parameter is outside its supported range."""
