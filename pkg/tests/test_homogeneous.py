"""Translate spans, exact homogeneity, Gram matrices, adjoint diagnostics."""

import math
from fractions import Fraction

import numpy as np
import pytest

from dskernel import (
    AdmissibleSupport,
    ExactComplex,
    SequenceRule,
    SpecError,
    TranslateSpan,
    adjoint_condition_check,
    adjoint_domain_probe,
    admissibility_check,
    apply_generator,
    apply_shift,
    delta,
    homogeneity_residual,
    span_vector,
    translate_gram,
)


def ones_span(offsets, order=10000, a=1.0) -> TranslateSpan:
    return TranslateSpan(
        a=a,
        offsets=tuple(Fraction(o) for o in offsets),
        diagonal=SequenceRule("constant", scale=1.0),
        support=AdmissibleSupport("all"),
        order=order,
        rho=0.5,
    )


class TestAdmissibility:
    def test_full_support(self):
        rep = admissibility_check(AdmissibleSupport("all"), 50)
        assert rep.admissible_up_to and rep.multiplicatively_closed
        assert rep.coprime_pair == (2, 3)

    def test_powers_of_two_lack_coprime_pair(self):
        rep = admissibility_check(AdmissibleSupport("powers", base=2), 64)
        assert rep.multiplicatively_closed
        assert rep.coprime_pair is None
        assert not rep.admissible_up_to

    def test_two_three_generated(self):
        rep = admissibility_check(AdmissibleSupport("generated", generators=(2, 3)), 48)
        assert rep.admissible_up_to
        assert rep.coprime_pair == (2, 3)

    def test_explicit_non_closed(self):
        rep = admissibility_check(AdmissibleSupport("explicit", elements=(2, 3, 5)), 10)
        assert not rep.multiplicatively_closed  # 2*3 = 6 missing


class TestTranslateGram:
    def test_single_offset_matches_zeta2(self):
        span = ones_span(["0"], order=2_000_000)
        gram = translate_gram(span)
        assert abs(gram.matrix[0, 0].real - math.pi**2 / 6.0) < 1e-6
        assert gram.entry_radius < 1e-6

    def test_duplicate_offsets_refused(self):
        with pytest.raises(SpecError):
            ones_span(["1/2", "1/2"])

    def test_independence_at_four_offsets(self):
        span = ones_span(["0", "3/2", "-7/3", "5"], order=20000)
        gram = translate_gram(span)
        assert gram.min_eigenvalue > 0
        assert gram.independent

    def test_shift_leaves_gram_invariant(self):
        offsets = ["0", "3/2", "-7/3", "5"]
        span = ones_span(offsets, order=5000)
        shifted = ones_span([Fraction(o) + Fraction(9, 7) for o in offsets], order=5000)
        g0 = translate_gram(span).matrix
        g1 = translate_gram(shifted).matrix
        assert np.max(np.abs(g0 - g1)) < 1e-12

    def test_conditioning_decays_as_offsets_cluster(self):
        eigs = []
        for eps in (Fraction(1), Fraction(1, 10), Fraction(1, 100)):
            span = ones_span([0, eps, 2 * eps, 3 * eps], order=2000)
            eigs.append(translate_gram(span).min_eigenvalue)
        assert eigs[0] > eigs[1] > eigs[2] > 0


class TestSpanOperators:
    def test_generator_eigenvalue(self):
        span = ones_span(["2"], order=16)
        out = apply_generator(span, delta(2))
        assert out == {Fraction(2): ExactComplex(Fraction(0), Fraction(2))}

    def test_generator_kills_zero_offset(self):
        span = ones_span(["0"], order=16)
        assert apply_generator(span, delta(0)) == {}

    def test_generator_linear_combination(self):
        span = ones_span(["1", "-1"], order=16)
        v = span_vector({Fraction(1): 1, Fraction(-1): 1})
        out = apply_generator(span, v)
        assert out == {
            Fraction(1): ExactComplex(Fraction(0), Fraction(1)),
            Fraction(-1): ExactComplex(Fraction(0), Fraction(-1)),
        }

    def test_generator_refuses_unknown_label(self):
        span = ones_span(["1"], order=16)
        with pytest.raises(SpecError):
            apply_generator(span, delta(2))

    def test_shift_moves_labels(self):
        v = delta(2)
        assert apply_shift(1, v) == delta(3)
        assert apply_shift(0, v) == v

    def test_shift_group_law(self):
        v = span_vector({Fraction(1, 3): 2 + 1j, Fraction(-5, 7): -1})
        c = Fraction(9, 11)
        assert apply_shift(-c, apply_shift(c, v)) == v


class TestHomogeneity:
    def test_worked_pair(self):
        # U_1 T d_2 = 2i d_3; (T - i) d_3 = 3i d_3 - i d_3 = 2i d_3
        assert homogeneity_residual(1, 2) == {}

    def test_zero_shift(self):
        assert homogeneity_residual(0, 5) == {}

    def test_thousand_random_rationals_exact(self):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            c = Fraction(int(rng.integers(-60, 61)), int(rng.integers(1, 17)))
            b = Fraction(int(rng.integers(-60, 61)), int(rng.integers(1, 17)))
            assert homogeneity_residual(c, b) == {}

    def test_float_offsets_are_exactified(self):
        # binary floats carry exact Fraction values, so the identity survives
        assert homogeneity_residual(0.3, 0.1) == {}


class TestAdjointCondition:
    def test_ones_quarter_delta(self):
        rep = adjoint_condition_check(
            SequenceRule("constant", scale=1.0), AdmissibleSupport("all"),
            a=1.0, delta=0.25, M=1000, rho=0.5,
        )
        assert rep.verdict == "finite"
        # oracle: sum n**-1.5 ~ zeta(3/2) = 2.612...
        from scipy.special import zeta

        assert abs(rep.partial_sum + rep.remainder_bound / 1 - float(zeta(1.5, 1))) < rep.remainder_bound
        assert rep.identity_residual is not None and rep.identity_residual < 1e-10
        assert rep.kernel_radius is not None
        assert abs(rep.partial_sum - rep.kernel_value.real) <= rep.kernel_radius + 1e-12

    def test_divergent_boundary(self):
        rep = adjoint_condition_check(
            SequenceRule("constant", scale=1.0), AdmissibleSupport("all"),
            a=1.0, delta=0.6, M=500, rho=0.5,
        )
        assert rep.verdict == "divergent"
        assert abs(rep.exponent - (-0.8)) < 1e-15

    def test_zero_on_support_rejected(self):
        with pytest.raises(SpecError):
            adjoint_condition_check(
                SequenceRule("explicit", values=(1.0, 0.0, 1.0)),
                AdmissibleSupport("all"), a=1.0, delta=0.25, M=3,
            )


class TestAdjointProbe:
    def test_zero_vector_fits_perfectly(self):
        rep = adjoint_domain_probe([0.0, 0.0], a=1.0, b_grid=np.linspace(-5, 5, 41))
        assert max(abs(v) for v in rep.functional) == 0.0
        assert rep.fit_residual == 0.0

    def test_first_symbol_leaves_residual(self):
        rep = adjoint_domain_probe([1.0], a=1.0, b_grid=np.linspace(-5, 5, 41))
        # Lambda(b) = -ib: linear growth cannot be matched by a Dirichlet
        # polynomial in ib; the misfit must be visible
        assert rep.relative_fit_residual > 1e-3
        assert rep.growth_ratio > 1.5

    def test_linearity_in_h(self):
        grid = np.linspace(-4, 4, 33)
        r1 = adjoint_domain_probe([1.0, 0.5], a=1.0, b_grid=grid)
        r2 = adjoint_domain_probe([2.0, 1.0], a=1.0, b_grid=grid)
        f1 = np.array(r1.functional)
        f2 = np.array(r2.functional)
        assert np.max(np.abs(f2 - 2.0 * f1)) < 1e-12
