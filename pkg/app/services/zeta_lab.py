"""
Numérica da função zeta: Euler-Maclaurin para Re(s) > 1, expansão de
Laurent em s = 1 com constantes de Stieltjes, a razão -zeta'(s)/zeta(s)^2 e
a série de Dirichlet de Lambda.

Aritmética complexa em precisão dupla. Polo com coeficiente +1:
zeta(s) = 1/(s-1) + sum_n (-1)^n gamma_n (s-1)^n / n!.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial

from app.config import get_settings
from app.errors import DomainError, PoleError, UnsupportedOrderError, UsageError
from app.services.arith_core import SieveTables
from app.utils.kahan import compensated_sum

logger = logging.getLogger(__name__)

# B_2, B_4, B_6 e o seguinte, usado só no limite do resto
BERNOULLI = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0)
BERNOULLI_NEXT = -1.0 / 30.0
POLE_RADIUS = 0.5
MAX_STIELTJES_ORDER = 4
MIN_STIELTJES_TERMS = 10_000
EULER_GAMMA_TOLERANCE = 1e-6
# termos automáticos: N >= |Im s| / pi, até este teto
MAX_AUTO_TERMS = 10_000_000
# exp() sai do intervalo de float fora de [_LOG_TINY, _LOG_HUGE]
_LOG_TINY = -745.0
_LOG_HUGE = 709.0


@dataclass(frozen=True)
class ComplexValue:
    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError(f"Valor complexo não finito: ({self.re}, {self.im})")

    @classmethod
    def of(cls, value: Union["ComplexValue", complex, float, int]) -> "ComplexValue":
        if isinstance(value, ComplexValue):
            return value
        z = complex(value)
        return cls(re=z.real, im=z.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return abs(self.to_complex())


@dataclass(frozen=True)
class LaurentExpansionAtOne:
    """
    Coeficientes da expansão de zeta em s = 1.

    ``stieltjes`` guarda gamma_0..gamma_K pela definição de limite; o fator
    (-1)^n / n! é aplicado no avaliador.
    """

    stieltjes: Tuple[float, ...]
    pole_coefficient: float = 1.0

    def __post_init__(self):
        if len(self.stieltjes) < 3:
            raise ValueError("A expansão precisa de gamma_0..gamma_K com K >= 2")
        if abs(self.stieltjes[0] - np.euler_gamma) > EULER_GAMMA_TOLERANCE:
            raise ValueError(
                f"gamma_0 = {self.stieltjes[0]} difere da constante de Euler-Mascheroni"
            )

    @property
    def order(self) -> int:
        return len(self.stieltjes) - 1

    def taylor_coefficients(self) -> Tuple[float, ...]:
        """a_n = (-1)^n gamma_n / n!, coeficientes da parte regular."""
        return tuple(
            (-1) ** n * g / math.factorial(n) for n, g in enumerate(self.stieltjes)
        )


@dataclass(frozen=True)
class SeriesEvaluation:
    s: ComplexValue
    terms_used: int
    value: ComplexValue
    tail_bound: float

    def __post_init__(self):
        if self.terms_used < 1:
            raise ValueError("terms_used deve ser >= 1")
        if not self.tail_bound >= 0:
            raise ValueError("tail_bound deve ser >= 0")


def _power_sum(s: complex, stop: int, weight_log: bool = False) -> complex:
    """sum_{n < stop} n^-s (ou -log n n^-s) com soma compensada por parte."""
    if stop <= 1:
        return 0j
    n = np.arange(1, stop, dtype=np.float64)
    logs = np.log(n)
    terms = np.exp(-s * logs)
    if weight_log:
        terms = -logs * terms
    return complex(compensated_sum(terms.real), compensated_sum(terms.imag))


def _rising_over_power(s: complex, count: int, log_n: float) -> complex:
    """
    s (s+1) ... (s+count-1) N^-(s+count), calculado em escala logarítmica.

    Para Re(s) grande o produto estoura e a potência zera; o logaritmo da
    combinação continua finito e o resultado simplesmente vai a 0.
    """
    log_value = sum(cmath.log(s + i) for i in range(count)) - (s + count) * log_n
    if log_value.real < _LOG_TINY:
        return 0j
    if log_value.real > _LOG_HUGE:
        return complex(math.inf, 0.0)
    return cmath.exp(log_value)


def _em_zeta(s: complex, terms: int) -> Tuple[complex, float]:
    """Euler-Maclaurin com B_2, B_4, B_6; sem checagem de região."""
    big_n = float(terms)
    log_n = math.log(big_n)
    n_pow = cmath.exp(-s * log_n)
    value = _power_sum(s, terms)
    value += big_n * n_pow / (s - 1) + n_pow / 2
    for j, b in enumerate(BERNOULLI, start=1):
        order = 2 * j
        value += b / math.factorial(order) * _rising_over_power(s, order - 1, log_n)
    next_term = (
        abs(BERNOULLI_NEXT / math.factorial(8))
        * abs(_rising_over_power(s, 7, log_n))
        * abs(s + 7)
        / (s.real + 7)
    )
    return value, next_term


def _em_zeta_prime(s: complex, terms: int) -> Tuple[complex, float]:
    """Derivada analítica da fórmula de Euler-Maclaurin."""
    big_n = float(terms)
    log_n = math.log(big_n)
    n_pow = cmath.exp(-s * log_n)
    value = _power_sum(s, terms, weight_log=True)
    tail = big_n * n_pow / (s - 1)
    value += -log_n * tail - tail / (s - 1) - log_n * n_pow / 2
    for j, b in enumerate(BERNOULLI, start=1):
        order = 2 * j
        log_derivative = sum(1.0 / (s + i) for i in range(order - 1))
        value += (
            b / math.factorial(order)
            * _rising_over_power(s, order - 1, log_n)
            * (log_derivative - log_n)
        )
    next_term = (
        abs(BERNOULLI_NEXT / math.factorial(8))
        * abs(_rising_over_power(s, 7, log_n))
        * (log_n + 8)
        * abs(s + 7)
        / (s.real + 7)
    )
    return value, next_term


def _check_em_region(s: complex) -> None:
    if s.real <= 1:
        raise DomainError(f"Euler-Maclaurin exige Re(s) > 1, recebido s={s}")
    if abs(s - 1) < POLE_RADIUS:
        raise DomainError(
            f"s={s} está na vizinhança do polo (|s-1| < {POLE_RADIUS}); use zeta_taylor_eval"
        )


def _check_terms(terms: int) -> None:
    if terms < 1:
        raise UsageError(f"Número de termos deve ser >= 1, recebido {terms}")


def _resolve_terms(z: complex, terms: Optional[int]) -> int:
    """
    N explícito ou o padrão ZETA_TERMS, elevado a |Im s| / pi quando
    necessário (limitado a MAX_AUTO_TERMS).
    """
    if terms is not None:
        _check_terms(terms)
        return terms
    terms = get_settings().zeta_terms
    needed = math.ceil(abs(z.imag) / math.pi) + 1
    if needed > MAX_AUTO_TERMS:
        logger.warning(
            "|Im s| = %g pede N = %d; usando o teto %d (o limite do resto reflete a perda)",
            abs(z.imag), needed, MAX_AUTO_TERMS,
        )
        needed = MAX_AUTO_TERMS
    return max(terms, needed)


def _finite_evaluation(s: ComplexValue, terms: int, value: complex, bound: float) -> SeriesEvaluation:
    if not (cmath.isfinite(value) and math.isfinite(bound)):
        raise DomainError(f"Euler-Maclaurin com N={terms} não converge em s={s.to_complex()}")
    return SeriesEvaluation(s=s, terms_used=terms, value=ComplexValue.of(value), tail_bound=bound)


def zeta_em(s: ComplexValue, terms: Optional[int] = None) -> SeriesEvaluation:
    """
    zeta(s) por soma truncada mais correção de Euler-Maclaurin.

    Args:
        s: Ponto com Re(s) > 1 e |s - 1| >= 0.5
        terms: Quantidade N de termos da soma direta

    Returns:
        SeriesEvaluation com o valor e um limite para o resto
    """
    s = ComplexValue.of(s)
    z = s.to_complex()
    _check_em_region(z)
    terms = _resolve_terms(z, terms)
    value, bound = _em_zeta(z, terms)
    return _finite_evaluation(s, terms, value, bound)


def zeta_prime_em(s: ComplexValue, terms: Optional[int] = None) -> SeriesEvaluation:
    """zeta'(s) pela derivada analítica de Euler-Maclaurin (mesma região de zeta_em)."""
    s = ComplexValue.of(s)
    z = s.to_complex()
    _check_em_region(z)
    terms = _resolve_terms(z, terms)
    value, bound = _em_zeta_prime(z, terms)
    return _finite_evaluation(s, terms, value, bound)


def _log_power_derivative(k: int, order: int) -> Polynomial:
    """
    Derivada de ordem ``order`` de f(t) = log(t)^k / t escrita como
    t^-(order+1) P(log t); devolve P.
    """
    poly = Polynomial([0.0] * k + [1.0])
    m = 1
    for _ in range(order):
        poly = poly.deriv() - m * poly
        m += 1
    return poly


def stieltjes_constants(k_max: int, terms: Optional[int] = None) -> LaurentExpansionAtOne:
    """
    Constantes de Stieltjes gamma_0..gamma_K pela definição de limite.

    gamma_k = lim [sum_{n<=N} log^k n / n - log^{k+1} N / (k+1)], com a
    correção de Euler-Maclaurin no extremo N (meio termo e B_2, B_4, B_6).
    Para k_max < 2 ainda são calculadas gamma_0..gamma_2.

    Args:
        k_max: Ordem máxima, 0..4
        terms: N >= 10^4

    Raises:
        UnsupportedOrderError: k_max > 4
    """
    if k_max > MAX_STIELTJES_ORDER:
        raise UnsupportedOrderError(
            f"Ordem {k_max} não suportada (máximo {MAX_STIELTJES_ORDER}); a precisão degrada"
        )
    if k_max < 0:
        raise UsageError(f"k_max deve ser >= 0, recebido {k_max}")
    terms = get_settings().stieltjes_terms if terms is None else terms
    if terms < MIN_STIELTJES_TERMS:
        raise UsageError(f"São necessários >= {MIN_STIELTJES_TERMS} termos, recebido {terms}")

    n = np.arange(1, terms + 1, dtype=np.float64)
    logs = np.log(n)
    log_n = math.log(terms)
    gammas = []
    for k in range(max(k_max, 2) + 1):
        head = compensated_sum(logs ** k / n)
        value = head - log_n ** (k + 1) / (k + 1)
        value -= log_n ** k / terms / 2
        for j, b in enumerate(BERNOULLI, start=1):
            order = 2 * j - 1
            derivative = _log_power_derivative(k, order)(log_n) / terms ** (order + 1)
            value -= b / math.factorial(2 * j) * derivative
        gammas.append(value)
    logger.debug("Constantes de Stieltjes com N=%d: %s", terms, gammas)
    return LaurentExpansionAtOne(stieltjes=tuple(gammas))


def _check_taylor_region(z: complex) -> None:
    if z == 1:
        raise PoleError("zeta tem polo simples em s = 1")
    if abs(z - 1) >= POLE_RADIUS:
        raise DomainError(f"|s-1| >= {POLE_RADIUS} para s={z}; use zeta_em")


def _regular_part(w: complex, expansion: LaurentExpansionAtOne) -> complex:
    return sum(a * w ** n for n, a in enumerate(expansion.taylor_coefficients()))


def _regular_part_derivative(w: complex, expansion: LaurentExpansionAtOne) -> complex:
    coeffs = expansion.taylor_coefficients()
    return sum(n * a * w ** (n - 1) for n, a in enumerate(coeffs) if n >= 1)


def zeta_taylor_eval(s: ComplexValue, expansion: LaurentExpansionAtOne) -> ComplexValue:
    """zeta(s) = 1/(s-1) + sum (-1)^n gamma_n (s-1)^n / n!, para 0 < |s-1| < 0.5."""
    z = ComplexValue.of(s).to_complex()
    _check_taylor_region(z)
    w = z - 1
    return ComplexValue.of(expansion.pole_coefficient / w + _regular_part(w, expansion))


def zeta_prime_taylor_eval(s: ComplexValue, expansion: LaurentExpansionAtOne) -> ComplexValue:
    """Derivada termo a termo: -1/(s-1)^2 + sum n a_n (s-1)^(n-1)."""
    z = ComplexValue.of(s).to_complex()
    _check_taylor_region(z)
    w = z - 1
    return ComplexValue.of(
        -expansion.pole_coefficient / w ** 2 + _regular_part_derivative(w, expansion)
    )


def neg_zeta_prime_over_zeta_sq(
    s: ComplexValue, expansion: LaurentExpansionAtOne, terms: Optional[int] = None
) -> ComplexValue:
    """
    -zeta'(s) / zeta(s)^2 em Re(s) >= 1.

    Perto do polo as formas de Laurent são multiplicadas por (s-1)^2, que se
    cancela; em s = 1 o valor é exatamente o limite 1. Longe do polo usa
    Euler-Maclaurin para zeta e zeta'.
    """
    z = ComplexValue.of(s).to_complex()
    if z.real < 1:
        raise DomainError(f"-zeta'/zeta^2 só é tratada em Re(s) >= 1, recebido s={z}")
    if z == 1:
        return ComplexValue(re=1.0, im=0.0)
    w = z - 1
    if abs(w) < POLE_RADIUS:
        p = expansion.pole_coefficient
        numerator = p - w ** 2 * _regular_part_derivative(w, expansion)
        denominator = (p + w * _regular_part(w, expansion)) ** 2
        return ComplexValue.of(numerator / denominator)
    terms = _resolve_terms(z, terms)
    zeta, _ = _em_zeta(z, terms)
    zeta_prime, _ = _em_zeta_prime(z, terms)
    return ComplexValue.of(-zeta_prime / zeta ** 2)


def lambda_series_partial(s: ComplexValue, N: int, tables: SieveTables) -> SeriesEvaluation:
    """
    Soma parcial sum_{n<=N} Lambda(n) n^-s da série de -zeta'/zeta.

    O limite do resto vem da comparação com a integral de log t t^-sigma,
    decrescente para t >= 3, mais os dois primeiros termos omitidos.
    """
    s = ComplexValue.of(s)
    z = s.to_complex()
    if z.real <= 1:
        raise DomainError(f"A série de Lambda exige Re(s) > 1, recebido s={z}")
    if not 1 <= N <= tables.limit:
        raise UsageError(f"N={N} fora de 1..{tables.limit}")
    lam = tables.lambda_val[:N + 1]
    idx = np.flatnonzero(lam > 0)
    if idx.size:
        terms = lam[idx] * np.exp(-z * np.log(idx.astype(np.float64)))
        value = complex(compensated_sum(terms.real), compensated_sum(terms.imag))
    else:
        value = 0j
    sigma = z.real
    start = N + 1
    integral = start ** (1 - sigma) * (math.log(start) / (sigma - 1) + 1 / (sigma - 1) ** 2)
    head = sum(math.log(t) * t ** (-sigma) for t in (start, start + 1))
    return SeriesEvaluation(
        s=s, terms_used=N, value=ComplexValue.of(value), tail_bound=integral + head
    )
