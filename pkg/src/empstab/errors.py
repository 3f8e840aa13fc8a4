"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside its admissible range."""


class GridMismatchError(ParameterError):
    """Two grid-indexed objects live on different grids."""


class UnsupportedOperationError(RuntimeError):
    """The map lacks the data (derivative, branch partition) the operation needs."""


class SingularityError(ArithmeticError):
    """log|f'| hit a zero derivative on a cell that carries mass."""


class UndersamplingError(RuntimeError):
    """Too little orbit data to trust the deepest requested block depth."""

    def __init__(self, message, largest_reliable_depth):
        super().__init__(message)
        self.largest_reliable_depth = largest_reliable_depth
