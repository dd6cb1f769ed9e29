"""Symbols, Gram models, deflation and membership."""

import math

import numpy as np
import pytest
from scipy.special import zeta

from dskernel import (
    ArrowheadMatrix,
    CertificationError,
    DenseMatrix,
    DiagonalMatrix,
    GramModel,
    RankOneMatrix,
    SequenceRule,
    analytic_symbol,
    example_arrowhead,
    expansion_check,
    infinity_kernel,
    limit_at_infinity_check,
    membership_test,
    psd_check,
    reproducing_check,
)
from conftest import dense_kernel, random_psd_dense


def diag_ones() -> DiagonalMatrix:
    return DiagonalMatrix(SequenceRule("constant", scale=1.0))


class TestAnalyticSymbol:
    def test_diagonal_single_term(self):
        m = DiagonalMatrix(SequenceRule("power", scale=1.0, exponent=-1.0))
        sym = analytic_symbol(m, 3, order=8)
        coeffs = np.asarray(sym.series.coefficients)
        assert abs(coeffs[2] - (1.0 / 3.0)) < 1e-15
        assert np.all(coeffs[np.arange(8) != 2] == 0)

    def test_arrowhead_tail_column_is_polynomial(self):
        m, _ = example_arrowhead()
        sym = analytic_symbol(m, 5, order=12)
        coeffs = np.asarray(sym.series.coefficients)
        # rows 1..k carry the coupling value, row 5 the tail diagonal 4**3
        assert np.allclose(coeffs[:2], 1.0)
        assert abs(coeffs[4] - 4.0**3) < 1e-12
        assert np.all(coeffs[5:] == 0) and coeffs[2] == 0 and coeffs[3] == 0

    def test_zero_matrix(self):
        sym = analytic_symbol(DenseMatrix(np.zeros((4, 4))), 2)
        assert np.all(np.asarray(sym.series.coefficients) == 0)
        assert sym.series.finite


class TestExpansion:
    def test_diagonal_ones_regrouping(self, diag_ones_kernel):
        assert expansion_check(diag_ones_kernel, 2.0, 2.0, 1000) < 1e-12

    def test_rank_one_e2(self):
        kern = dense_kernel(RankOneMatrix(np.array([0.0, 1.0])).truncation(2))
        assert expansion_check(kern, 1.5, 1.2, 2) == 0.0

    def test_random_psd_dense(self):
        rng = np.random.default_rng(9)
        A = random_psd_dense(rng, 6)
        kern = dense_kernel(A)
        assert expansion_check(kern, 1.8 + 0.4j, 2.2 - 1.1j, 6) < 1e-10


class TestReproducing:
    def test_diagonal_ones_matches_zeta6(self, diag_ones_kernel):
        model = GramModel(diag_ones(), 4000)
        res = reproducing_check(model, diag_ones_kernel, 3.0, 3.0, 4000)
        assert res < 1e-12
        # and the inner product itself is the zeta(6) partial sum
        v = model.inner(model.section_value(3.0), model.section_value(3.0))
        assert abs(v.real - float(zeta(6, 1))) < 1e-4

    def test_order_one_model_exact(self, diag_ones_kernel):
        model = GramModel(diag_ones(), 1)
        assert reproducing_check(model, diag_ones_kernel, 2.5, 2.0, 1) == 0.0

    def test_random_psd_order5(self):
        rng = np.random.default_rng(10)
        A = random_psd_dense(rng, 5)
        kern = dense_kernel(A)
        model = GramModel(kern.matrix, 5)
        assert reproducing_check(model, kern, 2.0 + 1j, 1.7 - 0.3j, 5) < 1e-8

    def test_refuses_non_psd_model(self):
        with pytest.raises(CertificationError):
            GramModel(DenseMatrix(np.array([[1.0, 2.0], [2.0, 1.0]])), 2)


class TestLimitAtInfinity:
    def test_first_symbol_on_diagonal_ones(self):
        model = GramModel(diag_ones(), 8)
        c = np.zeros(8, dtype=complex)
        c[0] = 1.0  # f = A_1 = 1
        residual, trace = limit_at_infinity_check(model, c, [5.0, 10.0, 20.0])
        assert residual < 1e-6
        assert trace == sorted(trace, reverse=True)

    def test_second_symbol_decays_to_zero(self):
        model = GramModel(diag_ones(), 8)
        c = np.zeros(8, dtype=complex)
        c[1] = 1.0  # f = A_2 = 2**-s, <f, A_1> = 0, f(p) = 2**-p
        residual, trace = limit_at_infinity_check(model, c, [10.0, 20.0, 40.0])
        assert residual < 2.0**-40 * 1.01
        assert trace == sorted(trace, reverse=True)

    def test_random_model_converges(self):
        rng = np.random.default_rng(31)
        A = random_psd_dense(rng, 4)
        model = GramModel(DenseMatrix(A), 4)
        c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        residual, _ = limit_at_infinity_check(model, c, [10.0, 20.0, 40.0])
        assert residual < 1e-6


class TestInfinityKernel:
    def test_rank_one_collapses_exactly(self):
        m = RankOneMatrix(np.array([1.0, 0.5, 0.25]))
        out = infinity_kernel(m)
        assert np.all(out.truncation(3) == 0)

    def test_diagonal_ones_drops_first(self):
        out = infinity_kernel(diag_ones())
        T = out.truncation(5)
        assert np.allclose(T, np.diag([0.0, 1.0, 1.0, 1.0, 1.0]))

    def test_example_arrowhead_stays_psd_with_zero_first_row(self):
        m, _ = example_arrowhead()
        out = infinity_kernel(m)
        T = out.truncation(12)
        assert np.allclose(T[0, :], 0) and np.allclose(T[:, 0], 0)
        assert psd_check(out, 12).is_psd

    def test_psd_preserved_on_random_inputs(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            A = random_psd_dense(rng, 6)
            if abs(A[0, 0]) < 1e-9:
                continue
            out = infinity_kernel(DenseMatrix(A))
            assert psd_check(out, 6).is_psd

    def test_refuses_zero_corner(self):
        with pytest.raises(CertificationError):
            infinity_kernel(DenseMatrix(np.zeros((2, 2))))


class TestMembership:
    def test_unit_vector_in_diagonal_ones(self):
        res = membership_test(diag_ones(), [0.0, 1.0], order=6)
        assert res.member
        # diagonal oracle: c**2 * 1 >= 1, so c_star = 1
        assert abs(res.c_star - 1.0) <= 2e-6

    def test_zero_vector(self):
        res = membership_test(diag_ones(), [0.0, 0.0], order=4)
        assert res.member and res.c_star == 0.0

    def test_heavy_tail_not_member(self):
        # diagonal 2**-n against constant coefficients needs c**2 >= 2**n,
        # so c_star grows without bound in the order and eventually clears
        # any c_max
        m = DiagonalMatrix(SequenceRule("geometric", scale=1.0, ratio=0.5))
        stars = [membership_test(m, [1.0] * n, order=n, c_max=1e4).c_star for n in (6, 10, 14)]
        assert all(c is not None for c in stars)
        assert stars[0] >= 2.0**3 - 1e-3
        assert stars[1] > 3.5 * stars[0] and stars[2] > 3.5 * stars[1]
        res = membership_test(m, [1.0] * 40, order=40, c_max=1e3)
        assert not res.member
        assert res.c_star is None

    def test_c_star_monotone_in_order(self):
        rng = np.random.default_rng(23)
        A = random_psd_dense(rng, 8) + 0.5 * np.eye(8)
        f = 0.3 * (rng.standard_normal(8) + 1j * rng.standard_normal(8))
        m = DenseMatrix(A)
        c4 = membership_test(m, f, order=4).c_star
        c8 = membership_test(m, f, order=8).c_star
        assert c4 is not None and c8 is not None
        assert c4 <= c8 + 2e-6

    def test_refuses_non_psd_matrix(self):
        with pytest.raises(CertificationError):
            membership_test(DenseMatrix(np.array([[1.0, 2.0], [2.0, 1.0]])), [1.0], 2)


class TestTotalityProxy:
    def test_nonsingular_gram_has_trivial_nullspace(self):
        model = GramModel(diag_ones(), 6)
        w = np.linalg.eigvalsh(model.gram)
        assert w[0] > 0.99  # identity section: strictly positive definite
        # the only coordinate vector orthogonal to every symbol is zero
        sol = np.linalg.solve(model.gram, np.zeros(6))
        assert np.all(sol == 0)
