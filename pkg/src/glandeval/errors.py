"""Exception types shared across the package."""


class GlandevalError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(GlandevalError, ValueError):
    """Input grid is ragged, non-2D, or dimensions do not match."""


class LabelNotFoundError(GlandevalError, KeyError):
    """Requested object label is not present in the map."""


class FormatError(GlandevalError, ValueError):
    """File content is not in a supported format."""


class ValidationError(GlandevalError, ValueError):
    """Manifest, score table, or configuration failed validation."""


class InvalidScoreError(GlandevalError, ValueError):
    """A score handed to the ranker is NaN or otherwise unusable."""


class UndefinedInputError(GlandevalError, ValueError):
    """Metric is mathematically undefined for this input (e.g. empty set)."""


class NoCounterpartError(GlandevalError, LookupError):
    """An unmatched object has no candidate counterpart in its image."""


class PlacementError(GlandevalError, RuntimeError):
    """Synthetic gland placement failed within the retry budget."""


class EvaluationError(GlandevalError, RuntimeError):
    """A per-image evaluation failed; message names the offending image."""
