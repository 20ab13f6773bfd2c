"""Exception types shared across the package."""


class VemcutError(Exception):
    """Base class for all package-specific errors."""


class DegenerateElement(VemcutError):
    """Polygon too degenerate to support the element kernels."""


class ParseError(VemcutError):
    """Mesh file could not be parsed; message carries file context."""


class ValidationError(VemcutError):
    """Mesh or polygon violates a structural invariant."""


class SolverStalled(VemcutError):
    """Iterative solve failed to reach the requested residual.

    Carries the best iterate seen so far and its relative residual so
    callers can inspect semi-converged states.
    """

    def __init__(self, message, iterate=None, residual=None, iterations=None):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual
        self.iterations = iterations
