"""Exception types shared across the package."""


class DskernelError(Exception):
    """Base class for all package errors."""


class SpecError(DskernelError):
    """Malformed input: bad JSON spec, inconsistent fields, broken invariant."""


class ConvergenceRegionError(DskernelError):
    """Evaluation requested at or below the certified convergence abscissa."""


class CollisionError(DskernelError):
    """Two merged exponents coincide numerically; injectivity hypothesis violated."""


class HermitianError(DskernelError):
    """Operation requires a self-adjoint coefficient matrix."""


class RecoveryError(DskernelError):
    """Black-box coefficient recovery failed to stabilise."""


class CertificationError(DskernelError):
    """A certificate hypothesis fails; the requested certification is refused."""


class InternalCheckError(DskernelError):
    """Two independent certificates disagree: an implementation bug, not an input problem."""


class OutsideDomainError(DskernelError):
    """Point lies outside the half-plane an operation is defined on."""
