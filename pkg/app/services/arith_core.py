"""
Funções aritméticas via crivo: mu(n), Lambda(n), phi(q), divisores e somas
de Ramanujan c_q(a).

O crivo de menor fator primo (spf) é construído à moda de Eratóstenes com
fatias vetorizadas do numpy; mu e Lambda são derivados do spf numa única
passada, em faixas [lo, 2 lo) onde n / spf(n) < lo já está calculado.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from sympy import factorint, isprime

from app.config import get_settings
from app.errors import RangeError, SizeError

logger = logging.getLogger(__name__)

# fatia máxima processada de uma vez na derivação de mu/Lambda
_SLAB = 1 << 22


@dataclass(frozen=True)
class SieveTables:
    """
    Tabelas imutáveis por inteiro até ``limit``.

    Atributos:
        limit: N >= 1
        spf: menor fator primo (int32), spf[n] = n sse n é primo; 0 em 0 e 1
        mu: função de Möbius (int8) em 1..N
        lambda_val: Lambda(n) em unidades de log natural (float64)
        lambda_base: primo p quando n = p^k, senão 0 (int32)
        lambda_exp: expoente k quando n = p^k, senão 0 (int8)
        primes: primos <= N em ordem crescente (int64)
    """

    limit: int
    spf: np.ndarray = field(repr=False)
    mu: np.ndarray = field(repr=False)
    lambda_val: np.ndarray = field(repr=False)
    lambda_base: np.ndarray = field(repr=False)
    lambda_exp: np.ndarray = field(repr=False)
    primes: np.ndarray = field(repr=False)

    def lambda_tag(self, n: int) -> Optional[Tuple[int, int]]:
        """Testemunha exata (p, k) de n = p^k, ou None."""
        _check_index(n, self)
        p = int(self.lambda_base[n])
        if p == 0:
            return None
        return p, int(self.lambda_exp[n])

    def is_prime(self, n: int) -> bool:
        _check_index(n, self)
        return n >= 2 and int(self.spf[n]) == n


@dataclass(frozen=True)
class Factorization:
    """Fatoração n = prod p^e com primos estritamente crescentes."""

    n: int
    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        product = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"Fatoração inválida para {self.n}: {self.factors}")
            product *= p ** e
            last = p
        if product != self.n:
            raise ValueError(f"Fatores não reproduzem {self.n}: {self.factors}")


def _check_index(n: int, tables: SieveTables) -> None:
    if not 1 <= n <= tables.limit:
        raise RangeError(f"n={n} fora do intervalo 1..{tables.limit}")


def build_sieve(limit: int, allow_large: bool = False) -> SieveTables:
    """
    Constrói as tabelas spf, mu e Lambda até ``limit``.

    Args:
        limit: N >= 1
        allow_large: Ignora o teto configurado (SIEVE_CEILING), mantendo o
            teto rígido da tabela int32

    Returns:
        SieveTables imutável

    Raises:
        SizeError: limite nulo, negativo ou acima do teto
    """
    settings = get_settings()
    if limit < 1:
        raise SizeError(f"Limite do crivo deve ser >= 1, recebido {limit}")
    if limit > settings.hard_sieve_ceiling:
        raise SizeError(f"Limite {limit} excede o teto rígido {settings.hard_sieve_ceiling}")
    if limit > settings.sieve_ceiling and not allow_large:
        raise SizeError(
            f"Limite {limit} excede o teto {settings.sieve_ceiling}; use --allow-large"
        )

    started = time.perf_counter()
    size = limit + 1

    spf = np.zeros(size, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            multiples = spf[p * p::p]
            multiples[multiples == 0] = p
    primes = np.flatnonzero(spf[2:] == 0).astype(np.int64) + 2
    spf[primes] = primes

    mu = np.zeros(size, dtype=np.int8)
    base = np.zeros(size, dtype=np.int32)
    exp = np.zeros(size, dtype=np.int8)
    mu[1] = 1

    lo = 2
    while lo <= limit:
        hi = min(2 * lo, size)
        for start in range(lo, hi, _SLAB):
            stop = min(start + _SLAB, hi)
            n = np.arange(start, stop, dtype=np.int64)
            p = spf[start:stop]
            m = n // p
            repeated = spf[m] == p
            mu[start:stop] = np.where(repeated, 0, -mu[m])
            power = (m == 1) | (base[m] == p)
            base[start:stop] = np.where(power, p, 0)
            exp[start:stop] = np.where(power, exp[m] + 1, 0)
        lo = hi

    lambda_val = np.zeros(size, dtype=np.float64)
    nonzero = base > 0
    lambda_val[nonzero] = np.log(base[nonzero].astype(np.float64))

    for arr in (spf, mu, lambda_val, base, exp, primes):
        arr.flags.writeable = False

    logger.info(
        "Crivo construído até %d (%d primos) em %.2fs",
        limit, primes.size, time.perf_counter() - started,
    )
    return SieveTables(
        limit=limit,
        spf=spf,
        mu=mu,
        lambda_val=lambda_val,
        lambda_base=base,
        lambda_exp=exp,
        primes=primes,
    )


def mobius(n: int, tables: SieveTables) -> int:
    """Retorna mu(n)."""
    _check_index(n, tables)
    return int(tables.mu[n])


def mangoldt(n: int, tables: SieveTables) -> float:
    """Retorna Lambda(n): log p se n = p^k, senão 0."""
    _check_index(n, tables)
    return float(tables.lambda_val[n])


def factorize(n: int, tables: SieveTables) -> Factorization:
    """
    Fatora n seguindo a cadeia de menores fatores primos.

    Args:
        n: Inteiro em 1..tables.limit
        tables: Tabelas do crivo

    Returns:
        Factorization com primos crescentes
    """
    _check_index(n, tables)
    factors: List[Tuple[int, int]] = []
    m = n
    while m > 1:
        p = int(tables.spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        factors.append((p, e))
    return Factorization(n=n, factors=tuple(factors))


def mobius_small(n: int) -> int:
    """mu(n) pela fatoração do sympy, sem depender do crivo (módulos q e d fora da tabela)."""
    result = 1
    for e in factorint(n).values():
        if e > 1:
            return 0
        result = -result
    return result


def is_prime_small(n: int) -> bool:
    """Primalidade de um módulo q, sem depender do crivo."""
    return bool(isprime(n))


def euler_phi(q: int) -> int:
    """
    Função totiente de Euler.

    Args:
        q: Inteiro >= 1

    Returns:
        Quantidade de 1 <= a <= q com gcd(a, q) = 1
    """
    if q < 1:
        raise RangeError(f"phi(q) exige q >= 1, recebido {q}")
    phi = 1
    for p, e in factorint(q).items():
        phi *= (p - 1) * p ** (e - 1)
    return phi


def ramanujan_sum_expsum(q: int, a: int) -> float:
    """
    Soma de Ramanujan pela definição exponencial.

    Soma cos(2 pi a x / q) sobre 1 <= x <= q com gcd(x, q) = 1; as partes
    imaginárias se cancelam aos pares conjugados. O produto a x é reduzido
    mod q em inteiros antes do cosseno. Mantida como oráculo de teste.
    """
    if q < 1:
        raise RangeError(f"c_q(a) exige q >= 1, recebido {q}")
    x = np.arange(1, q + 1, dtype=np.int64)
    coprime = x[np.gcd(x, q) == 1]
    residues = (coprime * (a % q)) % q
    angles = 2.0 * math.pi * residues.astype(np.float64) / q
    return math.fsum(np.cos(angles).tolist())


def ramanujan_sum_holder(q: int, a: int) -> int:
    """
    Soma de Ramanujan pela forma fechada de Hölder.

    c_q(a) = mu(q/g) phi(q) / phi(q/g), com g = gcd(a, q).
    """
    if q < 1:
        raise RangeError(f"c_q(a) exige q >= 1, recebido {q}")
    m = q // math.gcd(a, q)
    mu_m = mobius_small(m)
    if mu_m == 0:
        return 0
    return mu_m * (euler_phi(q) // euler_phi(m))


def divisors(n: int, tables: SieveTables) -> List[int]:
    """Todos os divisores positivos de n em ordem crescente."""
    result = [1]
    for p, e in factorize(n, tables).factors:
        result = [d * p ** k for d in result for k in range(e + 1)]
    return sorted(result)
