"""Closed-form sequence rules.

A handful of rule shapes (constant, geometric, power, explicit list) cover
every sequence this package needs to reason about rigorously: series
coefficients, diagonal kernel entries, and the coupling/tail sequences of
arrowhead matrices.  Restricting to these shapes is what makes summability
conditions certifiable: each rule admits a polynomial envelope and the
weighted ratio sums below have closed forms or certified remainders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import zeta as _zeta

from .errors import CertificationError, SpecError

RULE_KINDS = ("constant", "geometric", "power", "explicit")


@dataclass(frozen=True)
class SequenceRule:
    """One-indexed sequence ``l -> value(l)`` with a declared closed form.

    kinds:
      constant   value(l) = scale
      geometric  value(l) = scale * ratio**l
      power      value(l) = scale * l**exponent
      explicit   value(l) = values[l-1], zero beyond the stored list
    """

    kind: str
    scale: complex = 1.0
    ratio: float = 1.0
    exponent: float = 0.0
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise SpecError(f"unknown rule kind {self.kind!r}")
        if self.kind == "geometric" and self.ratio <= 0:
            raise SpecError("geometric rule needs ratio > 0")
        if self.kind == "explicit" and len(self.values) == 0:
            raise SpecError("explicit rule needs at least one value")

    # -- evaluation ---------------------------------------------------------

    def value(self, l: int) -> complex:
        if l < 1:
            raise SpecError("rules are one-indexed")
        if self.kind == "constant":
            return self.scale
        if self.kind == "geometric":
            return self.scale * self.ratio**l
        if self.kind == "power":
            return self.scale * float(l) ** self.exponent
        return self.values[l - 1] if l <= len(self.values) else 0.0

    def prefix(self, n: int) -> np.ndarray:
        """Values at l = 1..n as a complex array."""
        ls = np.arange(1, n + 1, dtype=float)
        if self.kind == "constant":
            return np.full(n, complex(self.scale))
        if self.kind == "geometric":
            return complex(self.scale) * self.ratio**ls
        if self.kind == "power":
            return complex(self.scale) * ls**self.exponent
        out = np.zeros(n, dtype=complex)
        m = min(n, len(self.values))
        out[:m] = np.asarray(self.values[:m], dtype=complex)
        return out

    @property
    def is_finite(self) -> bool:
        return self.kind == "explicit"

    def is_positive(self) -> bool:
        """True if every value is provably > 0 (finite lists are scanned)."""
        if self.kind == "explicit":
            return all(complex(v).imag == 0 and complex(v).real > 0 for v in self.values)
        s = complex(self.scale)
        return s.imag == 0 and s.real > 0

    def poly_bound(self) -> Optional[tuple[float, float]]:
        """(C, p) with |value(l)| <= C * l**p for all l >= 1, or None."""
        if self.kind == "constant":
            return abs(self.scale), 0.0
        if self.kind == "power":
            return abs(self.scale), self.exponent
        if self.kind == "geometric":
            if self.ratio <= 1.0:
                return abs(self.scale) * self.ratio, 0.0
            return None
        return (max(abs(complex(v)) for v in self.values), 0.0)


def rule_from_spec(spec: dict) -> SequenceRule:
    """Build a rule from its JSON form, e.g. {"kind": "geometric", "ratio": 4}."""
    kind = spec.get("kind")
    if kind == "constant":
        return SequenceRule("constant", scale=spec.get("value", spec.get("scale", 1.0)))
    if kind == "geometric":
        return SequenceRule("geometric", scale=spec.get("scale", 1.0), ratio=float(spec["ratio"]))
    if kind == "power":
        return SequenceRule("power", scale=spec.get("scale", 1.0), exponent=float(spec["exponent"]))
    if kind == "explicit":
        return SequenceRule("explicit", values=tuple(spec["values"]))
    raise SpecError(f"unknown rule kind {kind!r}")


@dataclass(frozen=True)
class RatioSum:
    """Result of summing t(l) = |num(l)|^2 * l**extra / den(l) over l >= 1.

    The true sum lies within remainder_bound of total (zero when exact).
    """

    total: float
    exact: bool
    partial_terms: int
    remainder_bound: float

    @property
    def upper(self) -> float:
        return self.total + self.remainder_bound


def _normal_form(num: SequenceRule, den: SequenceRule, extra: float) -> tuple[float, float, float]:
    """Write t(l) = A * q**l * l**gamma for non-explicit rule pairs."""
    A, q, gamma = 1.0, 1.0, extra
    if num.kind == "constant":
        A *= abs(num.scale) ** 2
    elif num.kind == "geometric":
        A *= abs(num.scale) ** 2
        q *= num.ratio**2
    elif num.kind == "power":
        A *= abs(num.scale) ** 2
        gamma += 2 * num.exponent
    if den.kind == "constant":
        A /= abs(den.scale)
    elif den.kind == "geometric":
        A /= abs(den.scale)
        q /= den.ratio
    elif den.kind == "power":
        A /= abs(den.scale)
        gamma -= den.exponent
    return A, q, gamma


def weighted_ratio_sum(num: SequenceRule, den: SequenceRule, extra: float = 0.0) -> RatioSum:
    """Certified value of sum_{l>=1} |num(l)|^2 * l**extra / den(l).

    Closed forms: pure geometric (q < 1, gamma = 0) and pure power
    (q = 1, gamma < -1, via the Hurwitz-free zeta).  Mixed shapes fall back
    to a partial sum plus a certified geometric-ratio remainder.  Raises
    CertificationError when the sum provably diverges or cannot be
    certified finite.
    """
    if not den.is_positive():
        raise CertificationError("denominator sequence is not certifiably positive")
    if den.kind == "explicit" or num.kind == "explicit":
        if num.kind != "explicit" and den.kind == "explicit":
            # numerator extends beyond the stored denominators: undefined tail
            raise CertificationError("explicit denominator shorter than numerator support")
        # numerator has finite support: exact finite sum
        L = len(num.values)
        total = 0.0
        for l in range(1, L + 1):
            d = complex(den.value(l)).real
            if d <= 0:
                raise CertificationError(f"denominator value at l={l} is not positive")
            total += abs(num.value(l)) ** 2 * float(l) ** extra / d
        return RatioSum(total=total, exact=True, partial_terms=L, remainder_bound=0.0)

    A, q, gamma = _normal_form(num, den, extra)
    if A == 0.0:
        return RatioSum(0.0, True, 0, 0.0)
    if q > 1.0 or (q == 1.0 and gamma >= -1.0):
        raise CertificationError("ratio sum diverges: hypothesis (finite coupling sum) fails")
    if q == 1.0:
        # sum l**gamma = zeta(-gamma), gamma < -1
        return RatioSum(A * float(_zeta(-gamma, 1)), True, 0, 0.0)
    if gamma == 0.0:
        # geometric: sum q**l = q/(1-q)
        return RatioSum(A * q / (1.0 - q), True, 0, 0.0)
    # mixed geometric * power with q < 1: partial sum + ratio-test remainder
    L = 64
    ls = np.arange(1, L + 1, dtype=float)
    partial = A * float(np.sum(q**ls * ls**gamma))
    # for l >= L the term ratio is at most q * ((L+1)/L)**gamma (gamma > 0)
    # or q (gamma <= 0); both < 1 for reasonable L
    rho = q * ((L + 1) / L) ** max(gamma, 0.0)
    while rho >= 1.0:
        L *= 2
        ls = np.arange(1, L + 1, dtype=float)
        partial = A * float(np.sum(q**ls * ls**gamma))
        rho = q * ((L + 1) / L) ** max(gamma, 0.0)
    t_next = A * q ** (L + 1) * float(L + 1) ** gamma
    remainder = t_next / (1.0 - rho)
    # true sum lies in [partial, partial + remainder]; report the midpoint
    return RatioSum(partial + remainder / 2, False, L, remainder / 2)


def power_tail_bound(start: float, beta: float) -> float:
    """Upper bound for sum_{n > start} n**(-beta) via the midpoint integral test.

    x**(-beta) is convex and decreasing, so each term is at most the
    integral over the centred unit interval: the tail is bounded by the
    integral from start + 1/2.  Requires beta > 1; returns math.inf
    otherwise.
    """
    if beta <= 1.0:
        return math.inf
    return (start + 0.5) ** (1.0 - beta) / (beta - 1.0)
