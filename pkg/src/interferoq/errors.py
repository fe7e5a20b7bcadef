"""Exception hierarchy shared across interferoq."""


class InterferoqError(Exception):
    """Base class for all library errors."""


class DomainError(InterferoqError, ValueError):
    """A numeric argument lies outside the domain of the function."""


class SizeError(DomainError):
    """Number of qubits (or Hilbert-space dimension) out of the supported range."""


class SymmetryError(InterferoqError, ValueError):
    """An operator that must be Hermitian is not."""


class StateError(InterferoqError, ValueError):
    """A matrix or vector violates the invariants of a quantum state."""


class UnsupportedGeneratorError(InterferoqError, ValueError):
    pass


class DerivativeConsistencyError(InterferoqError, ValueError):
    """The derivative of a density matrix does not have (near) zero trace."""


class StencilError(InterferoqError, ArithmeticError):
    """Eigenvalues cross or are degenerate within a finite-difference stencil."""


class NoOptimumError(DomainError):
    """F/tau has no interior maximum (time exponent <= 1/2)."""


class UnsupportedCombinationError(InterferoqError, ValueError):
    pass


class TruncationError(InterferoqError, ArithmeticError):
    """Non-negligible wave-packet weight would leave the retained mode window."""


class InfiniteRateError(InterferoqError, ArithmeticError):
    pass


class ConfigError(InterferoqError, ValueError):
    """Invalid CLI configuration. ``path`` locates the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
