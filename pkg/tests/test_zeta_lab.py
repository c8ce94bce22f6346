import cmath

import mpmath
import numpy as np
import pytest

from app.errors import DomainError, PoleError, UnsupportedOrderError, UsageError
from app.services.zeta_lab import (
    ComplexValue,
    LaurentExpansionAtOne,
    lambda_series_partial,
    neg_zeta_prime_over_zeta_sq,
    stieltjes_constants,
    zeta_em,
    zeta_prime_em,
    zeta_prime_taylor_eval,
    zeta_taylor_eval,
)

mpmath.mp.dps = 30


def _oracle(s):
    return complex(mpmath.zeta(s))


def _oracle_prime(s):
    return complex(mpmath.zeta(s, 1, 1))


@pytest.fixture(scope="module")
def expansion():
    """gamma_0..gamma_4 com N = 10^5."""
    return stieltjes_constants(4, 100_000)


class TestZetaEM:
    """Testes para Euler-Maclaurin em Re(s) > 1."""

    def test_zeta_two(self):
        """zeta(2) = pi^2/6."""
        result = zeta_em(2.0)
        assert result.value.re == pytest.approx(np.pi ** 2 / 6, abs=1e-10)
        assert abs(result.value.im) < 1e-15
        assert abs(result.value.re - 1.6449341) < 1e-6

    @pytest.mark.parametrize("s", [1.5, 3.0, 2 + 10j, 1.1 + 30j, 4 - 2j])
    def test_against_mpmath(self, s):
        result = zeta_em(ComplexValue.of(s))
        assert abs(result.value.to_complex() - _oracle(s)) < 1e-9

    def test_tail_bound_shrinks(self):
        """O limite do resto diminui com N."""
        assert zeta_em(2.0, 100).tail_bound > zeta_em(2.0, 1000).tail_bound

    def test_domain(self):
        """Re(s) <= 1 e a vizinhança do polo são recusados."""
        with pytest.raises(DomainError):
            zeta_em(ComplexValue(0.5, 14.0))
        with pytest.raises(DomainError):
            zeta_em(1.2)
        with pytest.raises(UsageError):
            zeta_em(2.0, 0)

    @pytest.mark.parametrize("re", [1e40, 1e45, 1e60, 1e300])
    def test_large_real_part(self, re):
        """Re(s) enorme: zeta(s) = 1 e zeta'(s) = 0, com resto finito."""
        result = zeta_em(ComplexValue(re, 0.0))
        assert result.value == ComplexValue(1.0, 0.0)
        assert result.tail_bound == 0.0
        assert zeta_prime_em(ComplexValue(re, 0.0)).value == ComplexValue(0.0, 0.0)

    def test_terms_follow_imaginary_part(self):
        """Sem N explícito, N >= |Im s| / pi."""
        s = 2 + 1e5j
        result = zeta_em(ComplexValue.of(s))
        assert result.terms_used >= 1e5 / np.pi
        reference = zeta_em(ComplexValue.of(s), 100_000)
        assert abs(result.value.to_complex() - reference.value.to_complex()) < 1e-6
        assert result.tail_bound < 1e-5
        assert zeta_em(ComplexValue.of(s), 1000).tail_bound > 1.0

    def test_explicit_terms_kept(self):
        assert zeta_em(ComplexValue(2.0, 1e5), 1000).terms_used == 1000

    @pytest.mark.parametrize("s", [2.0, 1.5 + 2j, 3.0])
    def test_derivative(self, s):
        result = zeta_prime_em(ComplexValue.of(s))
        assert abs(result.value.to_complex() - _oracle_prime(s)) < 1e-8


class TestStieltjes:
    """Testes para as constantes de Stieltjes."""

    def test_euler_gamma(self, expansion):
        """gamma_0 = constante de Euler-Mascheroni."""
        assert abs(expansion.stieltjes[0] - 0.57721566490153286) < 1e-8

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_against_mpmath(self, expansion, k):
        assert abs(expansion.stieltjes[k] - float(mpmath.stieltjes(k))) < 1e-8

    def test_minimum_order(self):
        """k_max < 2 ainda produz gamma_0..gamma_2."""
        result = stieltjes_constants(0, 10_000)
        assert result.order == 2

    def test_unsupported_order(self):
        with pytest.raises(UnsupportedOrderError):
            stieltjes_constants(5)

    def test_too_few_terms(self):
        with pytest.raises(UsageError):
            stieltjes_constants(2, 1000)

    def test_expansion_invariants(self):
        """A expansão exige K >= 2 e gamma_0 correto."""
        with pytest.raises(ValueError):
            LaurentExpansionAtOne(stieltjes=(0.5772156649, -0.0728158))
        with pytest.raises(ValueError):
            LaurentExpansionAtOne(stieltjes=(0.5, -0.0728158, -0.0096904))

    def test_taylor_coefficients(self, expansion):
        """a_n = (-1)^n gamma_n / n!."""
        coefficients = expansion.taylor_coefficients()
        assert coefficients[0] == expansion.stieltjes[0]
        assert coefficients[1] == -expansion.stieltjes[1]
        assert coefficients[2] == pytest.approx(expansion.stieltjes[2] / 2)


class TestLaurent:
    """Testes para a avaliação perto do polo."""

    @pytest.mark.parametrize("s", [1.1, 1.3, 0.8 + 0.1j, 1 + 0.4j, 1.45])
    def test_zeta_against_mpmath(self, expansion, s):
        value = zeta_taylor_eval(ComplexValue.of(s), expansion)
        assert abs(value.to_complex() - _oracle(s)) < 1e-6

    @pytest.mark.parametrize("s", [1.2, 0.9 - 0.2j])
    def test_derivative_against_mpmath(self, expansion, s):
        value = zeta_prime_taylor_eval(ComplexValue.of(s), expansion)
        assert abs(value.to_complex() - _oracle_prime(s)) < 1e-6

    @pytest.mark.parametrize("theta", [-1.2, -0.6, 0.0, 0.6, 1.2])
    def test_overlap_with_euler_maclaurin(self, expansion, theta):
        """Na circunferência |s - 1| = 0.5 os dois métodos concordam."""
        direction = cmath.exp(1j * theta)
        outside = ComplexValue.of(1 + (0.5 + 1e-12) * direction)
        inside = ComplexValue.of(1 + (0.5 - 1e-12) * direction)
        em = zeta_em(outside).value.to_complex()
        laurent = zeta_taylor_eval(inside, expansion).to_complex()
        assert abs(em - laurent) < 1e-6

    def test_pole(self, expansion):
        with pytest.raises(PoleError):
            zeta_taylor_eval(1.0, expansion)

    def test_outside_disk(self, expansion):
        with pytest.raises(DomainError):
            zeta_taylor_eval(2.0, expansion)


class TestNegZetaPrimeOverZetaSq:
    """Testes para -zeta'(s)/zeta(s)^2."""

    def test_exact_at_one(self, expansion):
        assert neg_zeta_prime_over_zeta_sq(1.0, expansion) == ComplexValue(1.0, 0.0)

    def test_near_one(self, expansion):
        value = neg_zeta_prime_over_zeta_sq(1 + 1e-6, expansion)
        assert abs(value.to_complex() - 1) < 1e-4

    @pytest.mark.parametrize("s", [1.2, 1 + 0.3j, 1.49, 1.51, 2.0, 3 + 5j])
    def test_against_mpmath(self, expansion, s):
        expected = -_oracle_prime(s) / _oracle(s) ** 2
        value = neg_zeta_prime_over_zeta_sq(ComplexValue.of(s), expansion)
        assert abs(value.to_complex() - expected) < 1e-6

    def test_pole_cancellation(self, expansion):
        """Em s = 1 + 10^-k, k = 1..6, o valor converge a 1 monotonicamente."""
        gaps = [
            abs(neg_zeta_prime_over_zeta_sq(1 + 10.0 ** -k, expansion).to_complex() - 1)
            for k in range(1, 7)
        ]
        assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-5

    def test_left_half_plane(self, expansion):
        with pytest.raises(DomainError):
            neg_zeta_prime_over_zeta_sq(0.9, expansion)


class TestLambdaSeries:
    """Testes para sum Lambda(n) n^-s."""

    def test_matches_log_derivative(self, tables):
        """sum_{n<=10^6} Lambda(n)/n^2 contra -zeta'(2)/zeta(2)."""
        result = lambda_series_partial(2.0, 1_000_000, tables)
        expected = -_oracle_prime(2) / _oracle(2)
        assert abs(result.value.re - expected.real) < 1e-4
        assert abs(result.value.re - expected.real) <= result.tail_bound

    @pytest.mark.parametrize("s", [2.0, 3.0, 4.0])
    def test_identity_residual(self, tables, s):
        """sum Lambda(n) n^-s zeta(s) + zeta'(s) ~ 0, com zeta' por diferença finita."""
        h = 1e-5
        zeta = zeta_em(s).value.re
        zeta_prime = (zeta_em(s + h).value.re - zeta_em(s - h).value.re) / (2 * h)
        partial = lambda_series_partial(s, 1_000_000, tables).value.re
        assert abs(partial * zeta + zeta_prime) < 1e-4

    def test_identity_residual_shrinks(self, tables):
        """O resíduo em s = 2 diminui de N = 10^4 para N = 10^6."""
        zeta = zeta_em(2.0).value.re
        zeta_prime = zeta_prime_em(2.0).value.re
        residuals = [
            abs(lambda_series_partial(2.0, n, tables).value.re * zeta + zeta_prime)
            for n in (10_000, 1_000_000)
        ]
        assert residuals[1] < residuals[0]

    def test_complex_point(self, small_tables):
        s = 3 + 2j
        result = lambda_series_partial(ComplexValue.of(s), small_tables.limit, small_tables)
        expected = -_oracle_prime(s) / _oracle(s)
        assert abs(result.value.to_complex() - expected) <= result.tail_bound

    def test_domain(self, small_tables):
        with pytest.raises(DomainError):
            lambda_series_partial(1.0, 100, small_tables)
        with pytest.raises(UsageError):
            lambda_series_partial(2.0, small_tables.limit + 1, small_tables)
