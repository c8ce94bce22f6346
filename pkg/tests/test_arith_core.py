import math

import pytest

from app.errors import RangeError, SizeError
from app.services.arith_core import (
    Factorization,
    build_sieve,
    divisors,
    euler_phi,
    factorize,
    is_prime_small,
    mangoldt,
    mobius,
    mobius_small,
    ramanujan_sum_expsum,
    ramanujan_sum_holder,
)


def _naive_factor(n):
    factors = []
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            factors.append((p, e))
        p += 1
    if n > 1:
        factors.append((n, 1))
    return factors


def _naive_mobius(n):
    factors = _naive_factor(n)
    if any(e > 1 for _, e in factors):
        return 0
    return (-1) ** len(factors)


def _naive_mangoldt(n):
    factors = _naive_factor(n)
    if len(factors) == 1:
        return math.log(factors[0][0])
    return 0.0


class TestBuildSieve:
    """Testes para a construção das tabelas do crivo."""

    def test_limit_one(self):
        """Testa o crivo mínimo N = 1."""
        tables = build_sieve(1)
        assert tables.limit == 1
        assert mobius(1, tables) == 1
        assert mangoldt(1, tables) == 0.0
        assert tables.primes.size == 0

    def test_limit_zero_rejected(self):
        """Testa que N = 0 é rejeitado."""
        with pytest.raises(SizeError):
            build_sieve(0)

    def test_above_ceiling_rejected(self, monkeypatch):
        """Testa o teto configurável e a válvula allow_large."""
        from app.config import get_settings

        monkeypatch.setenv("SIEVE_CEILING", "100")
        get_settings.cache_clear()
        try:
            with pytest.raises(SizeError, match="allow-large"):
                build_sieve(101)
            assert build_sieve(101, allow_large=True).limit == 101
        finally:
            monkeypatch.delenv("SIEVE_CEILING")
            get_settings.cache_clear()

    def test_small_values(self, small_tables):
        """Testa valores conhecidos de mu e Lambda."""
        assert mobius(2, small_tables) == -1
        assert mobius(4, small_tables) == 0
        assert mobius(30, small_tables) == -1
        assert mangoldt(8, small_tables) == pytest.approx(math.log(2), abs=1e-12)
        assert mangoldt(6, small_tables) == 0.0

    def test_against_trial_division(self, small_tables):
        """Compara mu e Lambda com divisão experimental até 10^4."""
        for n in range(1, small_tables.limit + 1):
            assert mobius(n, small_tables) == _naive_mobius(n)
            assert mangoldt(n, small_tables) == pytest.approx(_naive_mangoldt(n), abs=1e-12)

    def test_lambda_witness(self, small_tables):
        """Testa a testemunha exata (p, k) de Lambda."""
        assert small_tables.lambda_tag(1) is None
        assert small_tables.lambda_tag(12) is None
        assert small_tables.lambda_tag(9) == (3, 2)
        assert small_tables.lambda_tag(1024) == (2, 10)
        assert small_tables.lambda_tag(9973) == (9973, 1)

    def test_spf_invariant(self, small_tables):
        """spf(n) = n exatamente nos primos."""
        for n in range(2, 2000):
            assert small_tables.is_prime(n) == (int(small_tables.spf[n]) == n)
            assert small_tables.is_prime(n) == is_prime_small(n)

    def test_prime_count_million(self, tables):
        """pi(10^6) = 78498."""
        assert tables.primes.size == 78498
        assert int(tables.primes[-1]) == 999983

    def test_tables_are_read_only(self, small_tables):
        """As tabelas não podem ser alteradas."""
        with pytest.raises(ValueError):
            small_tables.mu[1] = 0

    def test_out_of_range(self, small_tables):
        """Índices fora de 1..N levantam RangeError."""
        with pytest.raises(RangeError):
            mobius(0, small_tables)
        with pytest.raises(RangeError):
            mangoldt(small_tables.limit + 1, small_tables)


class TestFactorize:
    """Testes para fatoração e divisores."""

    def test_factorize(self, small_tables):
        """Fatoração pela cadeia de spf."""
        assert factorize(1, small_tables).factors == ()
        assert factorize(360, small_tables).factors == ((2, 3), (3, 2), (5, 1))
        assert factorize(9973, small_tables).factors == ((9973, 1),)

    def test_factorization_invariant(self):
        """Factorization rejeita produtos inconsistentes."""
        with pytest.raises(ValueError):
            Factorization(n=12, factors=((2, 1), (3, 1)))
        with pytest.raises(ValueError):
            Factorization(n=6, factors=((3, 1), (2, 1)))

    def test_divisors(self, small_tables):
        """Divisores em ordem crescente."""
        assert divisors(1, small_tables) == [1]
        assert divisors(12, small_tables) == [1, 2, 3, 4, 6, 12]
        for n in range(1, 500):
            assert divisors(n, small_tables) == [d for d in range(1, n + 1) if n % d == 0]

    def test_mangoldt_divisor_sum(self, small_tables):
        """sum_{d|n} Lambda(d) = log n."""
        for n in range(1, 3000):
            total = math.fsum(mangoldt(d, small_tables) for d in divisors(n, small_tables))
            assert total == pytest.approx(math.log(n), abs=1e-9)

    def test_mobius_divisor_sum(self, small_tables):
        """sum_{d|n} mu(d) = [n = 1]."""
        for n in range(1, 3000):
            total = sum(mobius(d, small_tables) for d in divisors(n, small_tables))
            assert total == (1 if n == 1 else 0)


class TestEulerPhi:
    """Testes para a função totiente."""

    def test_values(self):
        assert [euler_phi(q) for q in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]

    def test_brute_force(self):
        for q in range(1, 200):
            assert euler_phi(q) == sum(1 for a in range(1, q + 1) if math.gcd(a, q) == 1)

    def test_invalid(self):
        with pytest.raises(RangeError):
            euler_phi(0)

    def test_mobius_small(self, small_tables):
        """mu por divisão experimental concorda com o crivo."""
        for n in range(1, 2000):
            assert mobius_small(n) == mobius(n, small_tables)


class TestRamanujanSum:
    """Testes para as somas de Ramanujan."""

    def test_known_values(self):
        """Valores de referência."""
        assert ramanujan_sum_holder(1, 5) == 1
        assert ramanujan_sum_holder(4, 1) == 0
        assert ramanujan_sum_holder(6, 0) == 2
        assert ramanujan_sum_holder(12, 0) == euler_phi(12)

    def test_holder_matches_definition(self):
        """Forma de Hölder igual à soma exponencial para q <= 50, 0 <= a <= q."""
        for q in range(1, 51):
            for a in range(0, q + 1):
                exact = ramanujan_sum_holder(q, a)
                assert abs(ramanujan_sum_expsum(q, a) - exact) < 1e-9

    def test_zero_argument_is_phi(self):
        """c_q(0) = phi(q)."""
        for q in range(1, 51):
            assert ramanujan_sum_holder(q, 0) == euler_phi(q)

    def test_coprime_argument_is_mobius(self):
        """c_q(a) = mu(q) quando gcd(a, q) = 1."""
        for q in range(1, 51):
            for a in range(1, q):
                if math.gcd(a, q) == 1:
                    assert ramanujan_sum_holder(q, a) == mobius_small(q)

    def test_periodic_in_a(self):
        """c_q(a + q) = c_q(a)."""
        for q in range(1, 30):
            for a in range(0, q):
                assert ramanujan_sum_holder(q, a + q) == ramanujan_sum_holder(q, a)

    def test_invalid_modulus(self):
        with pytest.raises(RangeError):
            ramanujan_sum_holder(0, 1)
        with pytest.raises(RangeError):
            ramanujan_sum_expsum(-1, 1)
