"""Exception types shared across the package."""


class SizeLimitError(Exception):
    """A requested computation exceeds a configured resource cap."""


class ContractionError(ValueError):
    """A partition/motif contraction would produce a self-loop."""


class CriticalRegimeError(ValueError):
    """No bound is available on the critical boundary between regimes."""


class DegenerateSampleError(ValueError):
    """A sample statistic is undefined (e.g. zero variance)."""
