"""
Funções somatórias, convolução de Dirichlet, estimativa de valor médio,
soma por partes (Abel) e somas de potências em progressões aritméticas.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from app.errors import NormalizationError, RangeError, ShapeError, UsageError
from app.services.arith_core import SieveTables
from app.utils.kahan import compensated_cumsum, compensated_sum, segment_totals

logger = logging.getLogger(__name__)

GRID_START = 1_000


class Checkpoint(NamedTuple):
    x: int
    raw: float
    normalized: float
    deviation: Optional[float]


@dataclass(frozen=True)
class CoefficientSeries:
    """
    Coeficientes de uma série de Dirichlet sum f(n) n^-s, n = 1..N.

    ``coeffs`` tem comprimento N + 1; a posição 0 é sempre zero e não faz
    parte da série.
    """

    limit: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.limit < 1:
            raise RangeError(f"Série precisa de N >= 1, recebido {self.limit}")
        if self.coeffs.shape != (self.limit + 1,):
            raise ShapeError(
                f"Vetor com forma {self.coeffs.shape}, esperado ({self.limit + 1},)"
            )
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("Coeficientes precisam ser finitos")
        if self.coeffs[0] != 0:
            raise ShapeError("Índice 0 não pertence à série")

    def __getitem__(self, n: int) -> float:
        if not 1 <= n <= self.limit:
            raise RangeError(f"n={n} fora de 1..{self.limit}")
        return float(self.coeffs[n])

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "CoefficientSeries":
        """Cria a série a partir de f(1), ..., f(N)."""
        coeffs = np.zeros(len(values) + 1, dtype=np.float64)
        coeffs[1:] = values
        return cls(limit=len(values), coeffs=coeffs)

    @classmethod
    def from_function(cls, limit: int, fn: Callable[[np.ndarray], np.ndarray]) -> "CoefficientSeries":
        """Cria a série avaliando ``fn`` vetorizada em n = 1..N."""
        n = np.arange(1, limit + 1, dtype=np.float64)
        return cls.from_values(np.asarray(fn(n), dtype=np.float64))

    @classmethod
    def ones(cls, limit: int) -> "CoefficientSeries":
        return cls.from_values(np.ones(limit))

    @classmethod
    def unit(cls, limit: int) -> "CoefficientSeries":
        """Indicadora de n = 1 (identidade da convolução)."""
        coeffs = np.zeros(limit + 1, dtype=np.float64)
        coeffs[1] = 1.0
        return cls(limit=limit, coeffs=coeffs)

    @classmethod
    def mobius(cls, tables: SieveTables, limit: Optional[int] = None) -> "CoefficientSeries":
        limit = tables.limit if limit is None else limit
        _check_x(limit, tables)
        return cls.from_values(tables.mu[1:limit + 1].astype(np.float64))

    @classmethod
    def mangoldt(cls, tables: SieveTables, limit: Optional[int] = None) -> "CoefficientSeries":
        limit = tables.limit if limit is None else limit
        _check_x(limit, tables)
        return cls.from_values(tables.lambda_val[1:limit + 1])


@dataclass(frozen=True)
class MobiusPair:
    """Par f(n) = sum_{d|n} g(d), ou seja f = 1 * g."""

    f: CoefficientSeries
    g: CoefficientSeries

    @classmethod
    def from_g(cls, g: CoefficientSeries) -> "MobiusPair":
        return cls(f=dirichlet_convolution(CoefficientSeries.ones(g.limit), g), g=g)


@dataclass(frozen=True)
class ConvergenceReport:
    """
    Grade de pontos (x, bruto, normalizado, desvio) de um experimento.

    O desvio é sempre medido menos previsto (normalized - predicted_limit).
    Sem previsão, o desvio fica vazio, exceto quando o chamador fornece
    uma referência explícita.
    """

    checkpoints: Tuple[Checkpoint, ...]
    predicted_limit: Optional[float]
    description: str

    def __post_init__(self):
        xs = [c.x for c in self.checkpoints]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise UsageError(f"Pontos de controle precisam ser estritamente crescentes: {xs}")
        if self.predicted_limit is not None:
            for c in self.checkpoints:
                if c.deviation != c.normalized - self.predicted_limit:
                    raise ValueError(f"Desvio inconsistente em x={c.x}")

    @classmethod
    def build(
        cls,
        xs: Sequence[int],
        raw: Sequence[float],
        normalized: Sequence[float],
        predicted_limit: Optional[float],
        description: str,
        reference: Optional[float] = None,
    ) -> "ConvergenceReport":
        """
        Monta o relatório calculando os desvios.

        Args:
            reference: Valor contra o qual medir o desvio quando não há
                previsão (por exemplo, o último ponto da grade)
        """
        target = predicted_limit if predicted_limit is not None else reference
        rows = tuple(
            Checkpoint(
                x=int(x),
                raw=float(r),
                normalized=float(v),
                deviation=None if target is None else float(v) - target,
            )
            for x, r, v in zip(xs, raw, normalized)
        )
        return cls(checkpoints=rows, predicted_limit=predicted_limit, description=description)

    @property
    def final(self) -> Checkpoint:
        return self.checkpoints[-1]

    def abs_deviations(self) -> List[float]:
        return [abs(c.deviation) for c in self.checkpoints if c.deviation is not None]


@dataclass(frozen=True)
class PsiCheckpointSeries:
    """Valores de psi(x) ou psi(x; q, a) numa grade de pontos."""

    grid: Tuple[Tuple[int, float], ...]
    modulus: Optional[int] = None
    residue: Optional[int] = None

    def __post_init__(self):
        values = [v for _, v in self.grid]
        if any(v < 0 for v in values):
            raise ValueError("psi não pode ser negativo")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError("psi precisa ser não decrescente em x")


class PowerSumAP(NamedTuple):
    exact: int
    leading: float


def _check_x(x: int, tables: SieveTables, lower: int = 1) -> None:
    if not lower <= x <= tables.limit:
        raise RangeError(f"x={x} fora do intervalo {lower}..{tables.limit}")


def _check_progression(q: int, a: int) -> None:
    if q < 1:
        raise RangeError(f"Módulo q deve ser >= 1, recebido {q}")
    if not 0 <= a < q:
        raise NormalizationError(f"Resíduo deve satisfazer 0 <= a < q, recebido a={a}, q={q}")


def geometric_grid(limit: int, base: int = 10, start: int = GRID_START) -> List[int]:
    """
    Grade geométrica: potências de ``base`` a partir da primeira >= ``start``
    até ``limit``; o próprio limite entra como último ponto.
    """
    if base < 2:
        raise UsageError(f"Base da grade geométrica deve ser >= 2, recebido {base}")
    if limit < 1:
        raise UsageError(f"Limite da grade deve ser >= 1, recebido {limit}")
    grid = []
    x = 1
    while x < start:
        x *= base
    while x <= limit:
        grid.append(x)
        x *= base
    if not grid or grid[-1] != limit:
        grid.append(limit)
    return grid


def validate_checkpoints(checkpoints: Sequence[int], limit: int) -> List[int]:
    """Confere que a grade é não vazia, crescente e cabe no limite."""
    xs = [int(x) for x in checkpoints]
    if not xs:
        raise UsageError("Lista de pontos de controle vazia")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise UsageError(f"Pontos de controle precisam ser estritamente crescentes: {xs}")
    if xs[0] < 1 or xs[-1] > limit:
        raise UsageError(f"Pontos de controle fora de 1..{limit}: {xs}")
    return xs


def chebyshev_psi(x: int, tables: SieveTables) -> float:
    """psi(x) = sum_{n<=x} Lambda(n), com soma compensada."""
    _check_x(x, tables)
    return compensated_sum(tables.lambda_val[1:x + 1])


def psi_ap(x: int, q: int, a: int, tables: SieveTables) -> float:
    """psi(x; q, a) = soma de Lambda(n) sobre n <= x, n = a (mod q)."""
    _check_x(x, tables)
    _check_progression(q, a)
    first = a if a > 0 else q
    return compensated_sum(tables.lambda_val[first:x + 1:q])


def psi_grid(
    checkpoints: Sequence[int],
    tables: SieveTables,
    modulus: Optional[int] = None,
    residue: Optional[int] = None,
) -> PsiCheckpointSeries:
    """psi (ou psi na progressão) em todos os pontos de uma só passada."""
    xs = validate_checkpoints(checkpoints, tables.limit)
    if modulus is None:
        values = segment_totals(tables.lambda_val, xs)
    else:
        _check_progression(modulus, residue)
        masked = np.zeros_like(tables.lambda_val)
        first = residue if residue > 0 else modulus
        masked[first::modulus] = tables.lambda_val[first::modulus]
        values = segment_totals(masked, xs)
    return PsiCheckpointSeries(
        grid=tuple(zip(xs, values)), modulus=modulus, residue=residue
    )


def prime_pi(x: int, tables: SieveTables) -> int:
    """Quantidade exata de primos <= x."""
    _check_x(x, tables, lower=0)
    return int(np.searchsorted(tables.primes, x, side="right"))


def prime_pi_ap(x: int, q: int, a: int, tables: SieveTables) -> int:
    """Quantidade de primos p <= x com p = a (mod q)."""
    _check_x(x, tables)
    _check_progression(q, a)
    primes = tables.primes[:prime_pi(x, tables)]
    return int(np.count_nonzero(primes % q == a))


def pi_via_partial_summation(x: int, tables: SieveTables) -> float:
    """
    pi(x) reconstruído de Lambda por soma parcial.

    sum_{n<=x} Lambda(n)/log n - sum_{p^k<=x, k>=2} Lambda(p^k)/log(p^k).
    As duas expressões são idênticas; a diferença para prime_pi é só erro de
    ponto flutuante.
    """
    _check_x(x, tables, lower=2)
    idx = np.flatnonzero(tables.lambda_val[:x + 1] > 0)
    weights = tables.lambda_val[idx] / np.log(idx.astype(np.float64))
    higher = tables.lambda_exp[idx] >= 2
    return compensated_sum(weights) - compensated_sum(weights[higher])


def mertens(x: int, tables: SieveTables) -> int:
    """M(x) = sum_{n<=x} mu(n), em aritmética inteira."""
    _check_x(x, tables)
    return int(np.sum(tables.mu[1:x + 1], dtype=np.int64))


def mertens_grid(checkpoints: Sequence[int], tables: SieveTables) -> List[int]:
    xs = validate_checkpoints(checkpoints, tables.limit)
    cumulative = np.cumsum(tables.mu[:xs[-1] + 1], dtype=np.int64)
    return [int(cumulative[x]) for x in xs]


def dirichlet_convolution(f: CoefficientSeries, g: CoefficientSeries) -> CoefficientSeries:
    """
    Convolução de Dirichlet h(n) = sum_{d|n} f(d) g(n/d).

    Laço duplo no reticulado de divisores: para cada d, os múltiplos
    d, 2d, ..., recebem f(d) g(1..N/d) de uma vez. Custo O(N log N).
    """
    if f.limit != g.limit:
        raise ShapeError(f"Limites diferentes: {f.limit} e {g.limit}")
    limit = f.limit
    h = np.zeros(limit + 1, dtype=np.float64)
    for d in range(1, limit + 1):
        fd = f.coeffs[d]
        if fd == 0.0:
            continue
        top = limit // d
        h[d:d * top + 1:d] += fd * g.coeffs[1:top + 1]
    return CoefficientSeries(limit=limit, coeffs=h)


def psi_prefix_table(x: int, tables: SieveTables) -> np.ndarray:
    """Tabela prefixa psi(0..x), compensada por blocos."""
    return compensated_cumsum(tables.lambda_val[:x + 1])


def conv_summatory(x: int, tables: SieveTables, psi_table: Optional[np.ndarray] = None) -> float:
    """
    S(x) = sum_{n<=x} (mu * Lambda)(n).

    Usa a reordenação S(x) = sum_{d<=x} mu(d) psi(floor(x/d)), que é uma
    identidade: só a tabela de mu e uma tabela de psi até x ficam em memória,
    sem materializar a convolução.

    Args:
        x: Ponto de avaliação
        tables: Tabelas do crivo
        psi_table: Tabela prefixa de psi já calculada (opcional, >= x)
    """
    _check_x(x, tables)
    if psi_table is None or psi_table.size < x + 1:
        psi_table = psi_prefix_table(x, tables)
    d = np.arange(1, x + 1, dtype=np.int64)
    mu = tables.mu[1:x + 1]
    active = mu != 0
    terms = mu[active].astype(np.float64) * psi_table[x // d[active]]
    return compensated_sum(terms)


def mean_value_estimate(
    f: CoefficientSeries,
    checkpoints: Sequence[int],
    predicted_limit: Optional[float] = None,
    description: str = "",
) -> ConvergenceReport:
    """
    Estimativa do valor médio (1/x) sum_{n<=x} f(n) em cada ponto.

    A acumulação segue a ordem natural de n. Sem ``predicted_limit``, o
    desvio é medido contra o valor do último ponto.
    """
    if len(checkpoints) == 0:
        raise UsageError("Lista de pontos de controle vazia")
    xs = validate_checkpoints(checkpoints, f.limit)
    sums = segment_totals(f.coeffs, xs)
    normalized = [s / x for s, x in zip(sums, xs)]
    return ConvergenceReport.build(
        xs,
        sums,
        normalized,
        predicted_limit,
        description or "valor médio (1/x) sum f(n)",
        reference=normalized[-1],
    )


def power_sum_ap(x: int, q: int, a: int) -> PowerSumAP:
    """
    Soma dos n <= x na progressão {a, a + q, a + 2q, ...}.

    Com M = floor((x - a)/q) a progressão tem M + 1 termos e a soma exata é
    q M (M + 1)/2 + a (M + 1), em aritmética inteira.

    Args:
        x: Limite superior >= 1
        q: Módulo >= 1
        a: Primeiro termo >= 0

    Returns:
        PowerSumAP(exact, leading) com leading = x^2 / 2q
    """
    if q < 1:
        raise RangeError(f"Módulo q deve ser >= 1, recebido {q}")
    if a < 0:
        raise RangeError(f"Resíduo a deve ser >= 0, recebido {a}")
    if x < 1:
        raise RangeError(f"x deve ser >= 1, recebido {x}")
    leading = x * x / (2 * q)
    if a > x:
        return PowerSumAP(exact=0, leading=leading)
    m = (x - a) // q
    exact = q * m * (m + 1) // 2 + a * (m + 1)
    return PowerSumAP(exact=exact, leading=leading)


def power_sum_deviations(x: int, q: int, a: int) -> Tuple[float, float]:
    """
    Desvio |exato - x^2/2q| nas duas normalizações, x^2/q e x/q.

    A primeira corresponde à forma o(x^2/q) e a segunda à forma O(x/q).
    """
    exact, leading = power_sum_ap(x, q, a)
    gap = abs(exact - leading)
    return gap / (x * x / q), gap / (x / q)


def abel_summation(partial_sums: Sequence[float], weights: Optional[Sequence[float]] = None) -> float:
    """
    Soma por partes na forma discreta de Stieltjes.

    Com A(t) = sum_{n<=t} a(n) dado em t = 1..x e o peso w(t),
    sum_{n<=x} a(n) w(n) = w(x) A(x) - sum_{t<x} A(t) (w(t+1) - w(t)).
    Com o peso padrão w(t) = t isso é x R(x) - sum_{t<x} R(t): o termo de
    fronteira -R(1) é cancelado pelo salto de R em t = 1.

    Args:
        partial_sums: A(1), ..., A(x)
        weights: w(1), ..., w(x); padrão w(t) = t

    Returns:
        sum_{n<=x} a(n) w(n)
    """
    values = np.asarray(partial_sums, dtype=np.float64)
    if values.ndim != 1 or values.size < 1:
        raise UsageError("Grade de somas parciais vazia")
    x = values.size
    if weights is None:
        w = np.arange(1, x + 1, dtype=np.float64)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != values.shape:
            raise UsageError(f"Pesos com tamanho {w.size}, esperado {x}")
    increments = np.diff(w)
    return w[-1] * values[-1] - compensated_sum(values[:-1] * increments)


def squarefree_density(checkpoints: Sequence[int], tables: SieveTables) -> ConvergenceReport:
    """
    Q(x)/x com Q(x) = sum_{n<=x} mu(n)^2, contra a densidade 6/pi^2.

    Serve de autoteste das tabelas de mu.
    """
    xs = validate_checkpoints(checkpoints, tables.limit)
    counts = np.cumsum(tables.mu[:xs[-1] + 1] != 0, dtype=np.int64)
    values = [int(counts[x]) for x in xs]
    logger.debug("Q(x) nos pontos %s: %s", xs, values)
    return ConvergenceReport.build(
        xs, values, [v / x for v, x in zip(values, xs)], 6.0 / math.pi ** 2, "Q(x)/x"
    )
