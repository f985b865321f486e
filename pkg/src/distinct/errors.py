"""Exception types shared across the engine."""


class DistinctError(Exception):
    """Base class for all engine errors."""


class TableFormatError(DistinctError):
    """Malformed embedding table file or invalid record content."""


class DegenerateBandwidthError(DistinctError):
    """Median pairwise distance is zero; no usable RBF bandwidth exists."""


class GramBudgetExceeded(DistinctError):
    """Estimated Gram matrix memory exceeds the configured budget.

    Callers should fall back to on-the-fly kernel evaluation.
    """

    def __init__(self, needed_mb: float, budget_mb: float):
        super().__init__(
            f"Gram matrix needs ~{needed_mb:.1f} MB but budget is {budget_mb:.1f} MB"
        )
        self.needed_mb = needed_mb
        self.budget_mb = budget_mb
