"""Exception types shared across planelab."""


class PlanelabError(Exception):
    pass


class StructuralError(PlanelabError, TypeError):
    """Operands live in different algebras or have the wrong shape."""


class DivisionByZeroError(PlanelabError, ZeroDivisionError):
    pass


class ParameterError(PlanelabError, ValueError):
    """A family parameter or identifier is outside its admissible range."""


class UnsupportedError(PlanelabError, NotImplementedError):
    pass


class DegenerateInputError(PlanelabError, ValueError):
    """Join of a point with itself, meet of a line with itself, and similar."""


class SolverError(PlanelabError, ArithmeticError):
    """A numerical solve missed its tolerance.

    ``best_residual`` holds the smallest residual seen before giving up.
    """

    def __init__(self, message, best_residual=float("nan")):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = float(best_residual)


class NotFoundError(PlanelabError, LookupError):
    pass
