class CornerFLMError(Exception):
    """Base class for every error raised by cornerflm."""


class SeriesError(CornerFLMError):
    """Precondition violated in exact series arithmetic."""


class LatticeSizeError(CornerFLMError):
    """Brute-force or transfer-matrix size budget exceeded."""


class UnsupportedBoundaryError(CornerFLMError):
    """JS boundary requested for a model other than the selfdual square Potts model."""


class MissingTableEntryError(CornerFLMError):
    """An FLM assembly needs a finite-lattice free energy that was not supplied."""

    def __init__(self, key):
        self.key = key
        super().__init__(f"missing finite-lattice entry {key}")


class InvalidConfigError(CornerFLMError):
    """Bad model/boundary id, side list, angle list or run configuration."""


class ClassificationError(CornerFLMError):
    """Asymptotic operation applied outside its precondition."""
