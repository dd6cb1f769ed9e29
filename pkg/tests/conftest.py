import numpy as np
import pytest

from dskernel import (
    DenseMatrix,
    DiagonalMatrix,
    DirichletKernel,
    HalfPlane,
    RankOneMatrix,
    SequenceRule,
)


def random_psd_dense(rng, n: int, scale: float = 0.5) -> np.ndarray:
    """Random complex PSD matrix B B* of order n."""
    B = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return B @ B.conj().T


def random_hermitian_with_negative(rng, n: int, floor: float = 0.5) -> np.ndarray:
    """Random Hermitian matrix with at least one planted negative eigenvalue."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(Z)
    ev = np.abs(rng.standard_normal(n)) + 0.2
    ev[rng.integers(0, n)] = -(floor + abs(rng.standard_normal()))
    A = (Q * ev) @ Q.conj().T
    return 0.5 * (A + A.conj().T)


@pytest.fixture
def diag_ones_kernel() -> DirichletKernel:
    """The zeta kernel sum n**(-s-conj(u)) on Re > 1/2."""
    return DirichletKernel(DiagonalMatrix(SequenceRule("constant", scale=1.0)), HalfPlane(0.5))


def dense_kernel(entries: np.ndarray, rho: float = 0.0) -> DirichletKernel:
    return DirichletKernel(DenseMatrix(np.asarray(entries, dtype=complex)), HalfPlane(rho))


def rank_one_kernel(fhat, rho: float = 0.0) -> DirichletKernel:
    return DirichletKernel(RankOneMatrix(np.asarray(fhat, dtype=complex)), HalfPlane(rho))
