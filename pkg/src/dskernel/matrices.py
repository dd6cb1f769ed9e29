"""Coefficient matrices behind Dirichlet series kernels.

A coefficient matrix is the doubly-indexed array a = (a_{m,n}) defining the
kernel sum a_{m,n} m**(-s) n**(-conj(u)).  Structured variants (diagonal,
banded, rank-one, arrowhead) keep the entry accessor cheap and make the
envelope |a_{m,n}| <= C m**alpha n**alpha derivable from their rules, which
is what certifies kernel tails.  Matrices with ``order`` set are finitely
supported and their tails are computed exactly instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SpecError
from .rules import SequenceRule, power_tail_bound
from .series import Envelope


class CoefficientMatrix:
    """Abstract coefficient matrix; indices are 1-based as in the math.

    Subclasses provide entry/truncation plus prefix accessors used by the
    kernel evaluator's per-variant fast paths.  ``order`` is the support
    bound for finitely supported variants, None when the matrix extends
    forever.
    """

    envelope: Optional[Envelope]
    order: Optional[int]

    def entry(self, m: int, n: int) -> complex:
        raise NotImplementedError

    def truncation(self, N: int) -> np.ndarray:
        """Leading principal N x N section as a dense complex array."""
        out = np.zeros((N, N), dtype=complex)
        for m in range(1, N + 1):
            for n in range(1, N + 1):
                out[m - 1, n - 1] = self.entry(m, n)
        return out

    def column_prefix(self, n: int, N: int) -> np.ndarray:
        """Entries a_{1..N, n}."""
        return np.array([self.entry(m, n) for m in range(1, N + 1)], dtype=complex)

    def row_prefix(self, m: int, N: int) -> np.ndarray:
        """Entries a_{m, 1..N}."""
        return np.array([self.entry(m, n) for n in range(1, N + 1)], dtype=complex)

    # -- absolute tail sums (exact for finite support, envelope otherwise) --

    def abs_row_tail(self, k: int, l: int, r: float) -> float:
        """sum_{n > l} |a_{k,n}| n**(-r)."""
        if self.order is not None:
            if l >= self.order:
                return 0.0
            ns = np.arange(l + 1, self.order + 1, dtype=float)
            row = np.abs(self.row_prefix(k, self.order)[l:])
            return float(np.sum(row * ns ** (-r)))
        env = self.envelope
        if env is None:
            return math.inf
        return env.C * k**env.alpha * power_tail_bound(l, r - env.alpha)

    def abs_col_tail(self, k: int, l: int, r: float) -> float:
        """sum_{m > k} |a_{m,l}| m**(-r)."""
        if self.order is not None:
            if k >= self.order:
                return 0.0
            ms = np.arange(k + 1, self.order + 1, dtype=float)
            col = np.abs(self.column_prefix(l, self.order)[k:])
            return float(np.sum(col * ms ** (-r)))
        env = self.envelope
        if env is None:
            return math.inf
        return env.C * l**env.alpha * power_tail_bound(k, r - env.alpha)

    def abs_corner_tail(self, k: int, l: int, r: float) -> float:
        """sum_{m > k, n > l} |a_{m,n}| m**(-r) n**(-r)."""
        if self.order is not None:
            if k >= self.order or l >= self.order:
                return 0.0
            T = np.abs(self.truncation(self.order)[k:, l:])
            ms = np.arange(k + 1, self.order + 1, dtype=float) ** (-r)
            ns = np.arange(l + 1, self.order + 1, dtype=float) ** (-r)
            return float(ms @ T @ ns)
        env = self.envelope
        if env is None:
            return math.inf
        return env.C * power_tail_bound(k, r - env.alpha) * power_tail_bound(l, r - env.alpha)


def _auto_envelope(entries: np.ndarray) -> Envelope:
    return Envelope(float(np.max(np.abs(entries))) if entries.size else 0.0, 0.0)


@dataclass(frozen=True, eq=False)
class DenseMatrix(CoefficientMatrix):
    """Finitely supported matrix stored as a dense block."""

    entries: np.ndarray
    envelope: Optional[Envelope] = None

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise SpecError("dense matrix entries must be square")
        object.__setattr__(self, "entries", e)
        if self.envelope is None:
            object.__setattr__(self, "envelope", _auto_envelope(e))

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def entry(self, m: int, n: int) -> complex:
        N = self.order
        if m <= N and n <= N:
            return complex(self.entries[m - 1, n - 1])
        return 0.0 + 0.0j

    def truncation(self, N: int) -> np.ndarray:
        out = np.zeros((N, N), dtype=complex)
        k = min(N, self.order)
        out[:k, :k] = self.entries[:k, :k]
        return out

    def column_prefix(self, n: int, N: int) -> np.ndarray:
        out = np.zeros(N, dtype=complex)
        if n <= self.order:
            k = min(N, self.order)
            out[:k] = self.entries[:k, n - 1]
        return out

    def row_prefix(self, m: int, N: int) -> np.ndarray:
        out = np.zeros(N, dtype=complex)
        if m <= self.order:
            k = min(N, self.order)
            out[:k] = self.entries[m - 1, :k]
        return out


@dataclass(frozen=True, eq=False)
class BandedMatrix(CoefficientMatrix):
    """Dense storage with a validated bandwidth: a_{m,n} = 0 for |m-n| > k."""

    bandwidth: int
    entries: np.ndarray
    envelope: Optional[Envelope] = None

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise SpecError("banded matrix entries must be square")
        if self.bandwidth < 0:
            raise SpecError("bandwidth must be >= 0")
        m, n = np.indices(e.shape)
        if np.any(e[np.abs(m - n) > self.bandwidth] != 0):
            raise SpecError("entries outside the declared band are nonzero")
        object.__setattr__(self, "entries", e)
        if self.envelope is None:
            object.__setattr__(self, "envelope", _auto_envelope(e))

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def entry(self, m: int, n: int) -> complex:
        if abs(m - n) > self.bandwidth:
            return 0.0 + 0.0j
        N = self.order
        if m <= N and n <= N:
            return complex(self.entries[m - 1, n - 1])
        return 0.0 + 0.0j

    def truncation(self, N: int) -> np.ndarray:
        out = np.zeros((N, N), dtype=complex)
        k = min(N, self.order)
        out[:k, :k] = self.entries[:k, :k]
        return out


@dataclass(frozen=True, eq=False)
class DiagonalMatrix(CoefficientMatrix):
    """Diagonal coefficient matrix a_{n,n} = rule(n), optionally support-masked."""

    rule: SequenceRule
    support: Optional[object] = None  # anything with .contains(n) and .indices_up_to(M)
    envelope: Optional[Envelope] = None

    def __post_init__(self):
        if self.envelope is None:
            pb = self.rule.poly_bound()
            if pb is not None:
                C, p = pb
                object.__setattr__(self, "envelope", Envelope(C, p / 2.0))

    @property
    def order(self) -> Optional[int]:
        return len(self.rule.values) if self.rule.is_finite else None

    def _on_support(self, n: int) -> bool:
        return self.support is None or self.support.contains(n)

    def entry(self, m: int, n: int) -> complex:
        if m != n or not self._on_support(n):
            return 0.0 + 0.0j
        return self.rule.value(n)

    def diagonal_prefix(self, N: int) -> np.ndarray:
        d = self.rule.prefix(N)
        if self.support is not None:
            mask = np.zeros(N, dtype=bool)
            mask[self.support.indices_up_to(N) - 1] = True
            d = np.where(mask, d, 0.0)
        return d

    def truncation(self, N: int) -> np.ndarray:
        return np.diag(self.diagonal_prefix(N))

    def column_prefix(self, n: int, N: int) -> np.ndarray:
        out = np.zeros(N, dtype=complex)
        if n <= N:
            out[n - 1] = self.entry(n, n)
        return out

    def row_prefix(self, m: int, N: int) -> np.ndarray:
        return self.column_prefix(m, N)


@dataclass(frozen=True, eq=False)
class RankOneMatrix(CoefficientMatrix):
    """a_{m,n} = fhat(m) * conj(fhat(n)) for a finitely supported vector fhat."""

    fhat: np.ndarray
    envelope: Optional[Envelope] = None

    def __post_init__(self):
        f = np.asarray(self.fhat, dtype=complex).ravel()
        if f.size == 0:
            raise SpecError("rank-one factor must be non-empty")
        object.__setattr__(self, "fhat", f)
        if self.envelope is None:
            object.__setattr__(self, "envelope", Envelope(float(np.max(np.abs(f)) ** 2), 0.0))

    @property
    def order(self) -> int:
        return self.fhat.size

    def entry(self, m: int, n: int) -> complex:
        f = self.fhat
        fm = f[m - 1] if m <= f.size else 0.0
        fn = f[n - 1] if n <= f.size else 0.0
        return complex(fm * np.conj(fn))

    def factor_prefix(self, N: int) -> np.ndarray:
        out = np.zeros(N, dtype=complex)
        out[: min(N, self.fhat.size)] = self.fhat[:N]
        return out

    def truncation(self, N: int) -> np.ndarray:
        f = self.factor_prefix(N)
        return np.outer(f, np.conj(f))


@dataclass(frozen=True, eq=False)
class ArrowheadMatrix(CoefficientMatrix):
    """Arrowhead structure: k x k head, constant-column coupling, diagonal tail.

    Entries: a = [[head, c], [c*, diag(d)]] where every head row couples to
    the tail through the same sequence c_{k+l} = coupling(l) and the tail is
    diag(d_{k+l}) = diag(tail(l)).  tail_overrides carries pointwise
    replacements of tail values (used by diagonal perturbations) keyed by
    matrix index m > k.
    """

    k: int
    head: np.ndarray
    coupling: SequenceRule
    tail: SequenceRule
    envelope: Optional[Envelope] = None
    tail_overrides: tuple = ()

    def __post_init__(self):
        h = np.asarray(self.head, dtype=complex)
        if h.shape != (self.k, self.k):
            raise SpecError("head block must be k x k")
        if self.k < 1:
            raise SpecError("k must be >= 1")
        object.__setattr__(self, "head", h)
        if not self.tail.is_positive():
            raise SpecError("tail rule must be positive")
        if self.envelope is None:
            object.__setattr__(self, "envelope", self._derive_envelope())

    def _derive_envelope(self) -> Optional[Envelope]:
        cb = self.coupling.poly_bound()
        db = self.tail.poly_bound()
        if cb is None or db is None:
            return None
        head_max = float(np.max(np.abs(self.head))) if self.head.size else 0.0
        alpha = max(0.0, cb[1], db[1] / 2.0)
        C = max(head_max, cb[0], db[0])
        return Envelope(C, alpha)

    @property
    def order(self) -> Optional[int]:
        if self.tail.is_finite and self.coupling.is_finite:
            return self.k + max(len(self.tail.values), len(self.coupling.values))
        return None

    def tail_value(self, m: int) -> float:
        """Tail diagonal entry at matrix index m > k, override-aware."""
        for idx, val in self.tail_overrides:
            if idx == m:
                return val
        return complex(self.tail.value(m - self.k)).real

    def coupling_value(self, n: int) -> complex:
        """Coupling entry c_n at matrix index n > k."""
        return self.coupling.value(n - self.k)

    def entry(self, m: int, n: int) -> complex:
        k = self.k
        if m <= k and n <= k:
            return complex(self.head[m - 1, n - 1])
        if m <= k < n:
            return self.coupling_value(n)
        if n <= k < m:
            return complex(np.conj(self.coupling_value(m)))
        if m == n:
            return complex(self.tail_value(m))
        return 0.0 + 0.0j

    def with_tail_override(self, m: int, value: float) -> "ArrowheadMatrix":
        if m <= self.k:
            raise SpecError("tail override index must exceed k")
        overrides = tuple(o for o in self.tail_overrides if o[0] != m) + ((m, value),)
        return ArrowheadMatrix(
            self.k, self.head, self.coupling, self.tail, self.envelope, overrides
        )

    def with_head_perturbation(self, idx: int, eps: float) -> "ArrowheadMatrix":
        if not (1 <= idx <= self.k):
            raise SpecError("head perturbation index must lie in the head block")
        h = self.head.copy()
        h[idx - 1, idx - 1] -= eps
        return ArrowheadMatrix(self.k, h, self.coupling, self.tail, None, self.tail_overrides)

    def truncation(self, N: int) -> np.ndarray:
        k = self.k
        out = np.zeros((N, N), dtype=complex)
        kk = min(k, N)
        out[:kk, :kk] = self.head[:kk, :kk]
        if N > k:
            c = np.array([self.coupling_value(n) for n in range(k + 1, N + 1)], dtype=complex)
            d = np.array([self.tail_value(m) for m in range(k + 1, N + 1)], dtype=float)
            out[:k, k:] = np.tile(c, (k, 1))
            out[k:, :k] = np.conj(out[:k, k:]).T
            out[k:, k:] = np.diag(d)
        return out


@dataclass(frozen=True, eq=False)
class DeflatedMatrix(CoefficientMatrix):
    """b_{m,n} = a_{m,n} - a_{m,1} a_{1,n} / a_{1,1}: first symbol deflated away.

    This is the coefficient matrix of the kernel restricted to functions
    vanishing at +infinity; its first row and column are exactly zero and it
    stays formally PSD whenever the parent is (a rank-one Cholesky downdate).
    """

    parent: CoefficientMatrix

    def __post_init__(self):
        a11 = complex(self.parent.entry(1, 1))
        if a11 == 0:
            raise SpecError("deflation needs a_{1,1} != 0")
        object.__setattr__(self, "_a11", a11)

    @property
    def order(self) -> Optional[int]:
        return self.parent.order

    @property
    def envelope(self) -> Optional[Envelope]:
        env = self.parent.envelope
        if env is None:
            return None
        a11 = abs(self._a11)
        return Envelope(env.C + env.C**2 / a11, env.alpha)

    def entry(self, m: int, n: int) -> complex:
        p = self.parent
        return p.entry(m, n) - p.entry(m, 1) * p.entry(1, n) / self._a11

    def truncation(self, N: int) -> np.ndarray:
        T = self.parent.truncation(N)
        return T - np.outer(T[:, 0], T[0, :]) / self._a11

    def column_prefix(self, n: int, N: int) -> np.ndarray:
        p = self.parent
        return p.column_prefix(n, N) - p.column_prefix(1, N) * (p.entry(1, n) / self._a11)

    def row_prefix(self, m: int, N: int) -> np.ndarray:
        p = self.parent
        return p.row_prefix(m, N) - p.row_prefix(1, N) * (p.entry(m, 1) / self._a11)
