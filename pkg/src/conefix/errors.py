"""Exception types raised by conefix."""


class InvalidArgument(ValueError):
    """Raised on precondition violations (shape mismatch, bad parameters)."""


class NoCertificateError(RuntimeError):
    """No grid entry produced a weak-contraction constant in (0, 1).

    Carries the best ``(delta, L)`` pair found and the sample pair that
    attained the worst ratio for it.
    """

    def __init__(self, message, best_delta, best_L, worst_pair=None):
        super().__init__(message)
        self.best_delta = best_delta
        self.best_L = best_L
        self.worst_pair = worst_pair


class EmptyFixedPointSetError(RuntimeError):
    """No multistart run converged, so no fixed point was found."""
