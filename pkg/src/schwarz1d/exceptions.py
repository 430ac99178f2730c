class SingularMatrixError(ArithmeticError):
    pass


class ConvergenceError(RuntimeError):
    """An iteration hit its iteration cap before meeting the tolerance."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class BreakdownError(ConvergenceError):
    pass


class StagnationError(ConvergenceError):
    pass
