"""Exception hierarchy shared by all modules."""


class HetLassoError(Exception):
    """Base class for every error raised by this package."""


class InsufficientDataError(HetLassoError):
    pass


class EmptyDesignError(HetLassoError):
    pass


class DegenerateColumnError(HetLassoError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"column {column} has zero variance")


class InvalidWeightsError(HetLassoError):
    pass


class InvalidInputError(HetLassoError):
    pass


class MaxPivotsError(HetLassoError):
    pass


class DegenerateScaleError(HetLassoError):
    pass


class InfiniteCriterionError(HetLassoError):
    """Residual variance is zero, so log(sigma^2) is -inf."""


class NumericFailureError(HetLassoError):
    def __init__(self, message, iteration=None):
        self.iteration = iteration
        if iteration is not None:
            message = f"iteration {iteration}: {message}"
        super().__init__(message)


class ExplosivePathError(HetLassoError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"simulated path became non-finite at time index {index}")


class ParseError(HetLassoError):
    def __init__(self, message, path=None, row=None, column=None):
        self.path, self.row, self.column = path, row, column
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ConfigError(HetLassoError):
    pass
