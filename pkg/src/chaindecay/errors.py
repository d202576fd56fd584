"""Exception hierarchy shared by the analysis modules."""


class ChainDecayError(Exception):
    """Base class for every error raised by :mod:`chaindecay`."""


class DomainError(ChainDecayError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class PreconditionError(ChainDecayError, ValueError):
    """A documented precondition of an operation is violated."""


class PoleEvaluationError(ChainDecayError, ZeroDivisionError):
    """The Green function was evaluated exactly on one of its poles."""


class RegimeError(ChainDecayError):
    """The model is outside the parameter regime an analysis is valid for.

    Raised e.g. when the resonance pole cannot be located, when no
    amplitude crossover exists, or when a closed-form estimate leaves its
    range of validity.
    """


class NoRootError(RegimeError):
    """A root (or peak) search finished without finding what it looked for."""


class QuadratureError(ChainDecayError):
    """Adaptive quadrature did not converge within its budget.

    Attributes
    ----------
    residual : float
        Largest error estimate among the panels that failed.
    panel : tuple of float
        Energy interval of the worst panel.
    """

    def __init__(self, message, residual, panel):
        super().__init__(message)
        self.residual = residual
        self.panel = panel
