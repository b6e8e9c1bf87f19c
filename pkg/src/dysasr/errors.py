"""Exception types shared across the toolkit."""


class DysasrError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(DysasrError, ValueError):
    """An argument or configuration value is out of its documented range."""


class LexiconError(DysasrError, KeyError):
    """A word cannot be mapped to a phone sequence."""


class DegenerateInputError(DysasrError, ValueError):
    """Input is formally valid but unusable (e.g. zero-power signal)."""


class UnsupportedFormatError(DysasrError, ValueError):
    """A file is readable but not in a supported encoding."""


class ManifestError(DysasrError, ValueError):
    """A manifest file is malformed or violates its invariants."""


class GeometryError(DysasrError, ValueError):
    """Tensor shapes are inconsistent with a layer's declared geometry."""


class NotTrainedError(DysasrError, RuntimeError):
    """A model was used before `fit` was called."""


class DivergenceError(DysasrError, RuntimeError):
    """Training produced non-finite loss values."""
