"""Finite models of the reproducing kernel Hilbert space of a kernel.

For a PSD coefficient matrix the column series A_n(s) = sum_m a_{m,n} m**(-s)
(the analytic symbols) span the space, and their Grammian is the matrix
itself: <A_n, A_m> = a_{m,n}.  That identity makes the truncated coefficient
matrix a faithful finite Gram model, which is all the computable content the
space has.  Everything here works in symbol coordinates over that model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import CertificationError, SpecError
from .kernel import DirichletKernel, kernel_eval, psd_check
from .matrices import (
    CoefficientMatrix,
    DeflatedMatrix,
    DenseMatrix,
    DiagonalMatrix,
    RankOneMatrix,
)
from .series import Envelope, GeneralDirichletSeries, evaluate

DEFAULT_SYMBOL_ORDER = 64


@dataclass(frozen=True)
class AnalyticSymbol:
    """Column n of the coefficient matrix, packaged as an ordinary series."""

    index: int
    series: GeneralDirichletSeries


def analytic_symbol(
    matrix: CoefficientMatrix, n: int, order: Optional[int] = None
) -> AnalyticSymbol:
    """Column-n series sum_m a_{m,n} m**(-s), with the matrix envelope inherited.

    For finitely supported matrices the symbol is an exact Dirichlet
    polynomial; otherwise a prefix of the requested order is taken.
    """
    if n < 1:
        raise SpecError("symbol index is 1-based")
    if matrix.order is not None:
        length = matrix.order
        finite = True
    else:
        length = order if order is not None else DEFAULT_SYMBOL_ORDER
        finite = False
    coeffs = matrix.column_prefix(n, max(length, 1))
    env = matrix.envelope
    series_env = None
    if env is not None:
        series_env = Envelope(env.C * max(1.0, float(n)) ** env.alpha, env.alpha)
    series = GeneralDirichletSeries.ordinary(coeffs, envelope=series_env, finite=finite)
    return AnalyticSymbol(n, series)


@dataclass(frozen=True, eq=False)
class GramModel:
    """Truncated Gram matrix of the symbols: G[m-1, n-1] = a_{m,n} = <A_n, A_m>.

    Inner products of symbol-coordinate vectors f = sum c_n A_n,
    g = sum d_m A_m are <f, g> = d* G c.  The section must be PSD within a
    scale-aware tolerance for the model to be a legitimate Hilbert space
    stand-in.
    """

    matrix: CoefficientMatrix
    order: int
    tol: float = 1e-9

    def __post_init__(self):
        if isinstance(self.matrix, DiagonalMatrix):
            # diagonal sections: eigenvalues are the diagonal itself
            d = np.real(self.matrix.diagonal_prefix(self.order))
            G = np.diag(d.astype(complex))
            w = np.sort(d)
        else:
            G = self.matrix.truncation(self.order)
            G = 0.5 * (G + G.conj().T)
            w = np.linalg.eigvalsh(G)
        scale = float(np.max(np.abs(w))) if w.size else 0.0
        if w.size and w[0] < -self.tol * (1.0 + scale):
            raise CertificationError(
                f"Gram section is not PSD at order {self.order}: min eig {w[0]}"
            )
        object.__setattr__(self, "gram", G)
        object.__setattr__(self, "min_eigenvalue", float(w[0]) if w.size else 0.0)

    def inner(self, c: Sequence[complex], d: Sequence[complex]) -> complex:
        """<sum_n c_n A_n, sum_m d_m A_m> over the model."""
        c = np.asarray(c, dtype=complex)
        d = np.asarray(d, dtype=complex)
        if c.size != self.order or d.size != self.order:
            raise SpecError("coordinate vectors must match the model order")
        return complex(np.conj(d) @ self.gram @ c)

    def section_value(self, t: complex) -> np.ndarray:
        """Symbol coordinates of the kernel section kappa_t = sum_n n**(-conj(t)) A_n."""
        n = np.arange(1, self.order + 1, dtype=float)
        return n ** (-np.conj(complex(t)))

    def value_at(self, c: Sequence[complex], p: complex) -> complex:
        """Pointwise value (sum_n c_n A_n)(p) through the truncated columns."""
        c = np.asarray(c, dtype=complex)
        weights = self.gram @ c  # row m: sum_n a_{m,n} c_n
        m = np.arange(1, self.order + 1, dtype=float)
        return complex(np.sum(weights * m ** (-complex(p))))


def expansion_check(kernel: DirichletKernel, s: complex, u: complex, order: int) -> float:
    """Residual of the symbol expansion kappa(s,u) = sum_n A_n(s) n**(-conj(u)).

    Both sides are the same truncated double sum regrouped, so the residual
    is pure floating-point noise; a large value signals an implementation
    inconsistency, not a mathematical one.
    """
    lhs = kernel_eval(kernel, s, u, order).value
    ub = np.conj(complex(u))
    total = 0.0 + 0.0j
    for n in range(1, order + 1):
        sym = analytic_symbol(kernel.matrix, n, order=order)
        val = evaluate(sym.series, s, order).value
        total += val * float(n) ** (-ub)
    return abs(lhs - total)


def reproducing_check(
    model: GramModel, kernel: DirichletKernel, t: complex, s: complex, order: int
) -> float:
    """Residual of <kappa_t, kappa_s> = kappa(s, t) over the Gram model.

    The model side expands both sections in symbol coordinates; the kernel
    side is a direct truncated evaluation.
    """
    lhs = model.inner(model.section_value(t), model.section_value(s))
    rhs = kernel_eval(kernel, s, t, min(order, model.order)).value
    return abs(lhs - rhs)


def limit_at_infinity_check(
    model: GramModel, coeffs: Sequence[complex], p_grid: Sequence[float]
) -> tuple[float, list[float]]:
    """Check <f, A_1> = lim_{p->inf} f(p) on the model.

    Returns the residual at the largest grid point together with the whole
    trace |<f, A_1> - f(p)| along the grid; for honest models the trace
    decreases like 2**(-p).
    """
    c = np.asarray(coeffs, dtype=complex)
    e1 = np.zeros(model.order, dtype=complex)
    e1[0] = 1.0
    target = model.inner(c, e1)
    ps = sorted(float(p) for p in p_grid)
    if not ps:
        raise SpecError("p_grid must be non-empty")
    trace = [abs(target - model.value_at(c, p)) for p in ps]
    return trace[-1], trace


def infinity_kernel(matrix: CoefficientMatrix) -> CoefficientMatrix:
    """Coefficient matrix of the subspace of functions vanishing at +infinity.

    b_{m,n} = a_{m,n} - a_{m,1} a_{1,n} / a_{1,1}; requires a_{1,1} != 0
    (equivalently, the kernel's iterated limit at infinity is nonzero).
    The output is PSD whenever the input is, being a rank-one Cholesky
    downdate.  A rank-one input collapses exactly to the zero matrix.
    """
    a11 = complex(matrix.entry(1, 1))
    if a11 == 0:
        raise CertificationError(
            "hypothesis fails: a_{1,1} = 0, no vanishing-at-infinity deflation"
        )
    if isinstance(matrix, RankOneMatrix):
        return DenseMatrix(np.zeros((matrix.order, matrix.order), dtype=complex))
    return DeflatedMatrix(matrix)


@dataclass(frozen=True)
class MembershipResult:
    """Order-relative membership verdict for a Dirichlet series in the space.

    member=True certifies (c_star**2 * a - fhat fhat*) is PSD at the stated
    truncation order; the verdict says nothing beyond that order, and
    c_star is an upper estimate for the norm at this truncation only.
    """

    member: bool
    c_star: Optional[float]
    order: int
    c_max: float
    resolution: float
    #: min eigenvalue of the c-normalised test matrix a - (fhat/c)(fhat/c)*
    min_eig_at_c_star: Optional[float] = None
    #: bisection trace of (c, min eigenvalue) pairs, in evaluation order
    eig_trace: tuple = ()


def membership_test(
    matrix: CoefficientMatrix,
    fhat: Sequence[complex],
    order: int,
    tol: float = 1e-9,
    c_max: float = 1e6,
    resolution: float = 1e-6,
) -> MembershipResult:
    """Bisect for the smallest c with (c**2 a - fhat fhat*) PSD at the truncation.

    The matrix must itself be PSD-certified at the order.  If even c_max
    fails, the series is reported non-member up to c_max at this order.
    """
    cert = psd_check(matrix, order, tol)
    if not cert.is_psd:
        raise CertificationError("matrix is not PSD at this order; membership undefined")
    A = matrix.truncation(order)
    A = 0.5 * (A + A.conj().T)
    f = np.zeros(order, dtype=complex)
    fv = np.asarray(fhat, dtype=complex).ravel()
    f[: min(order, fv.size)] = fv[:order]
    F = np.outer(f, np.conj(f))

    def is_psd_at(c: float) -> tuple[bool, float]:
        # test the c-normalised form a - (f/c)(f/c)* so the tolerance scale
        # stays O(||a|| + ||F||) instead of growing like c**2
        if c == 0.0:
            M = -F
        else:
            M = A - F / (c * c)
        w = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
        scale = float(np.max(np.abs(w))) if w.size else 0.0
        return bool(w[0] >= -tol * (1.0 + scale)), float(w[0])

    trace = []

    def probe(c: float) -> tuple[bool, float]:
        ok, eig = is_psd_at(c)
        trace.append((c, eig))
        return ok, eig

    ok0, eig0 = probe(0.0)
    if ok0:
        return MembershipResult(True, 0.0, order, c_max, resolution, eig0, tuple(trace))
    ok_max, _ = probe(c_max)
    if not ok_max:
        return MembershipResult(False, None, order, c_max, resolution, None, tuple(trace))
    lo, hi = 0.0, c_max
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        ok, _ = probe(mid)
        if ok:
            hi = mid
        else:
            lo = mid
    _, eig = is_psd_at(hi)
    return MembershipResult(True, hi, order, c_max, resolution, eig, tuple(trace))
