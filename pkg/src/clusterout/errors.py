class InstanceError(ValueError):
    """Invalid instance document or parameters.

    ``path`` names the offending field (``"distance_matrix[1][2]"``, ``"z"``).
    """

    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}" if path else reason)


class MoveError(ValueError):
    """A swap violates its preconditions (overlap, budget, empty result)."""


class BudgetExceeded(RuntimeError):
    """Combinatorial enumeration would exceed its configured cap."""
