"""
Experimentos numéricos para cada teorema e lema sobre valores médios.

Cada ``verify_*`` produz um ConvergenceReport e um TheoremVerdict. As
tolerâncias são fixas (podem ser sobrescritas explicitamente pelo chamador)
e as regras de tendência comparam os pontos por década. Nenhum experimento
usa aleatoriedade: parâmetros iguais produzem relatórios idênticos.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.errors import UsageError
from app.services.arith_core import (
    SieveTables,
    build_sieve,
    divisors,
    euler_phi,
    is_prime_small,
    mobius_small,
    ramanujan_sum_holder,
)
from app.services.summatory import (
    CoefficientSeries,
    ConvergenceReport,
    MobiusPair,
    abel_summation,
    chebyshev_psi,
    conv_summatory,
    geometric_grid,
    mean_value_estimate,
    mertens_grid,
    power_sum_ap,
    power_sum_deviations,
    prime_pi,
    psi_grid,
    psi_prefix_table,
    validate_checkpoints,
)
from app.utils.kahan import compensated_cumsum, segment_totals

logger = logging.getLogger(__name__)

PNT_MIN_LIMIT = 10_000

TOLERANCES = {
    "pnt": 0.12,
    "psi-mean": 0.01,
    "lemma5": 0.05,
    "lemma6": 1e-3,
    "wintner": 1e-3,
    "axer": 1e-3,
    "thm9": 0.1,
    "dirichlet": 0.05,
    "thm10": 0.1,
    "lemma11": 0.05,
}

RECOVERY_TOLERANCE = 1e-6


@dataclass(frozen=True)
class TheoremVerdict:
    """
    Resultado de um experimento.

    ``passed`` é None no modo consultivo (sem aprovação nem reprovação).
    """

    experiment_name: str
    parameters: Tuple[Tuple[str, Any], ...]
    report: ConvergenceReport
    passed: Optional[bool]
    criteria: str
    advisory: bool = False
    extra_reports: Tuple[Tuple[str, ConvergenceReport], ...] = ()
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.advisory and self.passed is not None:
            raise ValueError("Veredito consultivo não pode aprovar nem reprovar")
        if not self.advisory and self.passed is None:
            raise ValueError("Veredito não consultivo precisa de passed")

    @property
    def params(self) -> Dict[str, Any]:
        return dict(self.parameters)


@dataclass(frozen=True)
class GSpec:
    """
    Regra que gera g(n) para n <= N.

    Args:
        name: Nome do gerador
        generator: Função (limite, tabelas) -> vetor g(1..N)
        absolutely_summable: Se sum |g(n)|/n converge (hipótese de Wintner)
        needs_tables: Se o gerador usa as tabelas do crivo
    """

    name: str
    generator: Callable[[int, Optional[SieveTables]], np.ndarray] = field(repr=False)
    absolutely_summable: bool = True
    needs_tables: bool = False

    def series(self, limit: int, tables: Optional[SieveTables] = None) -> CoefficientSeries:
        if self.needs_tables:
            if tables is None or tables.limit < limit:
                tables = build_sieve(limit)
        values = np.asarray(self.generator(limit, tables), dtype=np.float64)
        if values.shape != (limit,):
            raise UsageError(f"Gerador {self.name} não é total em 1..{limit}")
        return CoefficientSeries.from_values(values)

    @classmethod
    def mobius(cls) -> "GSpec":
        return cls(
            name="mu",
            generator=lambda n, t: t.mu[1:n + 1],
            absolutely_summable=False,
            needs_tables=True,
        )

    @classmethod
    def neg_mobius_log(cls) -> "GSpec":
        def generate(n: int, t: SieveTables) -> np.ndarray:
            k = np.arange(1, n + 1, dtype=np.float64)
            return -t.mu[1:n + 1] * np.log(k)

        return cls(
            name="-mu*log",
            generator=generate,
            absolutely_summable=False,
            needs_tables=True,
        )

    @classmethod
    def reciprocal(cls) -> "GSpec":
        return cls(name="1/d", generator=lambda n, t: 1.0 / np.arange(1, n + 1, dtype=np.float64))

    @classmethod
    def unit(cls) -> "GSpec":
        def generate(n: int, t: Optional[SieveTables]) -> np.ndarray:
            values = np.zeros(n)
            values[0] = 1.0
            return values

        return cls(name="unit", generator=generate)

    @classmethod
    def custom(cls, name: str, values: Sequence[float], absolutely_summable: bool = True) -> "GSpec":
        table = np.asarray(values, dtype=np.float64)

        def generate(n: int, t: Optional[SieveTables]) -> np.ndarray:
            if n > table.size:
                raise UsageError(f"Tabela {name} cobre só 1..{table.size}")
            return table[:n]

        return cls(name=name, generator=generate, absolutely_summable=absolutely_summable)


@dataclass(frozen=True)
class ExperimentInfo:
    name: str
    operation: str
    statement: str
    needs_progression: bool = False
    needs_sieve: bool = True


EXPERIMENTS: Dict[str, ExperimentInfo] = {
    info.name: info
    for info in (
        ExperimentInfo("pnt", "verify_pnt", "pi(x) ~ x / log x"),
        ExperimentInfo("psi-mean", "verify_psi_mean", "psi(x) ~ x"),
        ExperimentInfo("lemma5", "verify_lemma5", "sum (mu * Lambda)(n) = o(x)"),
        ExperimentInfo("lemma6", "verify_lemma6", "sum mu(n)/n convergente implica M(x) = o(x)"),
        ExperimentInfo("wintner", "verify_wintner", "f = 1 * g, sum |g(n)|/n < inf implica média sum g(n)/n"),
        ExperimentInfo("axer", "verify_axer", "sum |g| = O(x) e sum g(n)/n = c implicam média c"),
        ExperimentInfo("thm9", "verify_thm9", "g = -mu log, f = Lambda: média 1"),
        ExperimentInfo(
            "dirichlet", "verify_dirichlet_ap", "psi(x; q, a) ~ x / phi(q)", needs_progression=True
        ),
        ExperimentInfo(
            "thm10", "verify_thm10_formula", "média de Lambda em progressões via c_d(a)",
            needs_progression=True,
        ),
        ExperimentInfo(
            "lemma11", "verify_lemma11", "sum_{n = a (q), n <= x} n ~ x^2 / 2q",
            needs_progression=True, needs_sieve=False,
        ),
    )
}

OUT_OF_SCOPE = "fora de escopo"

# cada enunciado vai para exatamente um experimento (ou operação) ou fica fora de escopo
STATEMENT_ROUTES: Dict[str, str] = {
    **{info.statement: info.name for info in EXPERIMENTS.values()},
    "Lambda(n) n^-s = -zeta'/zeta em Re s > 1": "zeta_lab.lambda_series_partial",
    "-zeta'/zeta^2 -> 1 em s = 1": "zeta_lab.neg_zeta_prime_over_zeta_sq",
    "expansão de zeta em s = 0": OUT_OF_SCOPE,
    "expansões em zeros de zeta": OUT_OF_SCOPE,
    "histórico de regiões livres de zeros": OUT_OF_SCOPE,
    "comparação com Siegel-Walfisz": OUT_OF_SCOPE,
}


def _tolerance(name: str, override: Optional[float]) -> float:
    if override is None:
        return TOLERANCES[name]
    if override <= 0:
        raise UsageError(f"Tolerância deve ser > 0, recebido {override}")
    return override


def _grid(limit: int, checkpoints: Optional[Sequence[int]], ceiling: Optional[int] = None) -> List[int]:
    ceiling = limit if ceiling is None else ceiling
    if limit > ceiling:
        raise UsageError(f"Limite {limit} maior que o crivo disponível ({ceiling})")
    if checkpoints is None:
        return geometric_grid(limit)
    return validate_checkpoints(checkpoints, limit)


def shrinking(values: Sequence[float], steps: int = 2, strict: bool = False) -> bool:
    """
    Regra de tendência: |valores| decrescem nos últimos ``steps`` passos.

    Com menos pontos usa todos os passos disponíveis; um único ponto não
    define tendência.
    """
    magnitudes = [abs(v) for v in values]
    if len(magnitudes) < 2:
        return False
    tail = magnitudes[-(steps + 1):]
    if strict:
        return all(b < a for a, b in zip(tail, tail[1:]))
    return all(b <= a for a, b in zip(tail, tail[1:]))


def _verdict(
    name: str,
    parameters: Dict[str, Any],
    report: ConvergenceReport,
    passed: Optional[bool],
    criteria: str,
    advisory: bool = False,
    extra_reports: Sequence[Tuple[str, ConvergenceReport]] = (),
    notes: Sequence[str] = (),
) -> TheoremVerdict:
    verdict = TheoremVerdict(
        experiment_name=name,
        parameters=tuple(parameters.items()),
        report=report,
        passed=None if advisory else bool(passed),
        criteria=criteria,
        advisory=advisory,
        extra_reports=tuple(extra_reports),
        notes=tuple(notes),
    )
    status = "consultivo" if advisory else ("aprovado" if verdict.passed else "reprovado")
    logger.info("Experimento %s %s: %s", name, parameters, status)
    return verdict


def _psi_mean_report(xs: Sequence[int], tables: SieveTables) -> ConvergenceReport:
    psi = [v for _, v in psi_grid(xs, tables).grid]
    return ConvergenceReport.build(
        xs, psi, [v / x for v, x in zip(psi, xs)], 1.0, "psi(x)/x"
    )


def verify_pnt(
    limit: int,
    tables: SieveTables,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """pi(x) log x / x nos pontos; deve decrescer estritamente em direção a 1."""
    if limit < PNT_MIN_LIMIT:
        raise UsageError(f"verify_pnt exige limite >= {PNT_MIN_LIMIT}, recebido {limit}")
    tol = _tolerance("pnt", tolerance)
    xs = _grid(limit, checkpoints, tables.limit)
    counts = [prime_pi(x, tables) for x in xs]
    ratios = [c * math.log(x) / x for c, x in zip(counts, xs)]
    report = ConvergenceReport.build(xs, counts, ratios, 1.0, "pi(x) log(x) / x")
    decreasing = shrinking(report.abs_deviations(), steps=len(xs), strict=True)
    above = all(r > 1.0 for r in ratios)
    close = abs(report.final.deviation) < tol
    criteria = (
        f"razão estritamente decrescente em todos os pontos, acima de 1, "
        f"e |razão final - 1| < {tol}"
    )
    return _verdict("pnt", {"limit": limit}, report, decreasing and above and close, criteria)


def verify_psi_mean(
    limit: int,
    tables: SieveTables,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """psi(x)/x -> 1."""
    tol = _tolerance("psi-mean", tolerance)
    xs = _grid(limit, checkpoints, tables.limit)
    report = _psi_mean_report(xs, tables)
    passed = abs(report.final.deviation) < tol and shrinking(report.abs_deviations())
    criteria = f"|psi(x)/x - 1| < {tol} no ponto final e |desvio| não crescente nos dois últimos passos"
    return _verdict("psi-mean", {"limit": limit}, report, passed, criteria)


def verify_lemma5(
    limit: int,
    tables: SieveTables,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """S(x)/x com S(x) = sum_{n<=x} (mu * Lambda)(n); deve ser o(x)."""
    tol = _tolerance("lemma5", tolerance)
    xs = _grid(limit, checkpoints, tables.limit)
    psi_table = psi_prefix_table(xs[-1], tables)
    sums = [conv_summatory(x, tables, psi_table=psi_table) for x in xs]
    report = ConvergenceReport.build(
        xs, sums, [s / x for s, x in zip(sums, xs)], 0.0, "S(x)/x, S = sum (mu*Lambda)(n)"
    )
    magnitudes = report.abs_deviations()
    passed = magnitudes[-1] < magnitudes[0] and magnitudes[-1] < tol
    criteria = f"|S(x)|/x final menor que no primeiro ponto e menor que {tol}"
    return _verdict("lemma5", {"limit": limit}, report, passed, criteria)


def verify_lemma6(
    limit: int,
    tables: SieveTables,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """
    Instância f = mu: M(x)/x -> 0.

    Também recupera M(x) das somas parciais R(t) = sum mu(n)/n por soma por
    partes e confere com a soma direta.
    """
    tol = _tolerance("lemma6", tolerance)
    xs = _grid(limit, checkpoints, tables.limit)
    values = mertens_grid(xs, tables)
    report = ConvergenceReport.build(
        xs, values, [m / x for m, x in zip(values, xs)], 0.0, "M(x)/x"
    )

    n = np.arange(1, xs[-1] + 1, dtype=np.float64)
    partial = compensated_cumsum(tables.mu[1:xs[-1] + 1] / n)
    r_values = [partial[x - 1] for x in xs]
    r_report = ConvergenceReport.build(
        xs, r_values, r_values, None, "R(x) = sum mu(n)/n", reference=r_values[-1]
    )
    recovered = abel_summation(partial)
    target = values[-1]
    recovered_ok = abs(recovered - target) <= RECOVERY_TOLERANCE * max(1, abs(target))

    passed = abs(report.final.deviation) < tol and shrinking(report.abs_deviations()) and recovered_ok
    criteria = (
        f"|M(x)|/x < {tol} no ponto final, não crescente nos dois últimos passos, "
        f"e M(x) recuperado por soma por partes com erro relativo <= {RECOVERY_TOLERANCE}"
    )
    notes = [f"M({xs[-1]}) recuperado por soma por partes: {recovered:.10g}"]
    return _verdict(
        "lemma6", {"limit": limit}, report, passed, criteria,
        extra_reports=[("R", r_report)], notes=notes,
    )


def verify_wintner(
    g: GSpec,
    predicted_c: float,
    limit: int,
    tables: Optional[SieveTables] = None,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """
    Teorema de Wintner para f = 1 * g com sum |g(n)|/n convergente.

    g sem convergência absoluta (por exemplo mu) não é aceito aqui; vai para
    verify_thm9.
    """
    if not g.absolutely_summable:
        raise UsageError(
            f"g = {g.name} não é absolutamente somável contra 1/n; use verify_thm9"
        )
    tol = _tolerance("wintner", tolerance)
    xs = _grid(limit, checkpoints)
    pair = MobiusPair.from_g(g.series(limit, tables))
    report = mean_value_estimate(
        pair.f, xs, predicted_limit=predicted_c, description=f"(1/x) sum f, f = 1 * ({g.name})"
    )
    remainders = [abs(c.raw - predicted_c * c.x) for c in report.checkpoints]
    root_ratio = [r / math.sqrt(x) for r, x in zip(remainders, xs)]
    root_report = ConvergenceReport.build(
        xs, remainders, root_ratio, None, "|sum f - c x| / sqrt(x)"
    )
    passed = abs(report.final.deviation) < tol
    criteria = f"|(1/x) sum f - c| < {tol} no ponto final"
    return _verdict(
        "wintner",
        {"g": g.name, "c": predicted_c, "limit": limit},
        report, passed, criteria,
        extra_reports=[("sqrt", root_report)],
    )


def verify_axer(
    limit: int,
    tables: SieveTables,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """
    Teorema de Axer na instância g = mu, f = 1 * mu = [n = 1].

    A hipótese sum_{n<=x} |g(n)| = O(x) é medida pela razão sum |mu| / x.
    """
    tol = _tolerance("axer", tolerance)
    xs = _grid(limit, checkpoints, tables.limit)
    g = CoefficientSeries.mobius(tables, limit)
    pair = MobiusPair.from_g(g)
    report = mean_value_estimate(pair.f, xs, predicted_limit=0.0, description="(1/x) sum (1 * mu)")

    squarefree = np.abs(tables.mu[:limit + 1]).astype(np.float64)
    counts = segment_totals(squarefree, xs)
    hypothesis = ConvergenceReport.build(
        xs, counts, [c / x for c, x in zip(counts, xs)], None, "sum |mu(n)| / x"
    )
    n = np.arange(1, limit + 1, dtype=np.float64)
    c_values = segment_totals(np.concatenate(([0.0], tables.mu[1:limit + 1] / n)), xs)
    c_report = ConvergenceReport.build(xs, c_values, c_values, 0.0, "c(x) = sum mu(n)/n")

    hypothesis_ok = all(c.normalized <= 1.0 for c in hypothesis.checkpoints)
    passed = (
        abs(report.final.deviation) < tol
        and abs(c_report.final.deviation) < tol
        and hypothesis_ok
    )
    criteria = (
        f"|(1/x) sum f| < {tol} e |sum mu(n)/n| < {tol} no ponto final, "
        "com sum |mu(n)|/x <= 1 em todos os pontos"
    )
    return _verdict(
        "axer", {"limit": limit}, report, passed, criteria,
        extra_reports=[("hypothesis", hypothesis), ("c", c_report)],
    )


def verify_thm9(
    limit: int,
    tables: SieveTables,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """
    Instância g = -mu log, f = Lambda.

    Mede (a) as somas parciais c0(N) = sum_{n<=N} -mu(n) log(n)/n na ordem
    natural, (b) psi(x)/x, e (c) sum n Lambda(n) / (x^2/2), recuperando
    psi(x) dessa soma ponderada por soma por partes com peso 1/t.
    """
    tol = _tolerance("thm9", tolerance)
    xs = _grid(limit, checkpoints, tables.limit)
    top = xs[-1]

    g = GSpec.neg_mobius_log().series(top, tables)
    n = np.arange(0, top + 1, dtype=np.float64)
    inner = np.zeros(top + 1)
    inner[1:] = g.coeffs[1:] / n[1:]
    c0 = segment_totals(inner, xs)
    report = ConvergenceReport.build(xs, c0, c0, 1.0, "c0(N) = sum -mu(n) log(n) / n")

    psi_report = _psi_mean_report(xs, tables)
    psi_tol = TOLERANCES["psi-mean"]
    psi_ok = abs(psi_report.final.deviation) < psi_tol and shrinking(psi_report.abs_deviations())

    weighted = compensated_cumsum(n * tables.lambda_val[:top + 1])
    weighted_values = [weighted[x] for x in xs]
    weighted_report = ConvergenceReport.build(
        xs,
        weighted_values,
        [w / (x * x / 2.0) for w, x in zip(weighted_values, xs)],
        1.0,
        "sum n Lambda(n) / (x^2/2)",
    )
    recovered = abel_summation(weighted[1:], 1.0 / n[1:])
    psi_direct = chebyshev_psi(top, tables)
    recovered_ok = abs(recovered - psi_direct) <= RECOVERY_TOLERANCE * psi_direct

    passed = (
        abs(report.final.deviation) < tol
        and shrinking(report.abs_deviations())
        and psi_ok
        and recovered_ok
    )
    criteria = (
        f"|c0(N) - 1| < {tol} no ponto final e não crescente nos dois últimos passos; "
        f"|psi(x)/x - 1| < {psi_tol} com a mesma regra de tendência; "
        f"psi recuperado por soma por partes com erro relativo <= {RECOVERY_TOLERANCE}"
    )
    notes = [
        f"psi({top}) direto: {psi_direct:.10g}; recuperado de sum n Lambda(n): {recovered:.10g}",
    ]
    return _verdict(
        "thm9", {"limit": limit}, report, passed, criteria,
        extra_reports=[("psi", psi_report), ("weighted", weighted_report)],
        notes=notes,
    )


def _check_coprime_progression(q: int, a: int) -> None:
    if q < 1:
        raise UsageError(f"Módulo q deve ser >= 1, recebido {q}")
    if not 0 <= a < q:
        raise UsageError(f"Resíduo deve satisfazer 0 <= a < q, recebido a={a}, q={q}")
    if math.gcd(a, q) != 1:
        raise UsageError(f"gcd(a, q) deve ser 1, recebido a={a}, q={q}")


def verify_dirichlet_ap(
    q: int,
    a: int,
    limit: int,
    tables: SieveTables,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """
    psi(x; q, a) phi(q)/x -> 1, junto com a cota inferior psi(x; q, a) q/x.

    A desigualdade do enunciado e a igualdade do valor médio são reportadas
    lado a lado.
    """
    _check_coprime_progression(q, a)
    tol = _tolerance("dirichlet", tolerance)
    xs = _grid(limit, checkpoints, tables.limit)
    phi = euler_phi(q)
    psi = [v for _, v in psi_grid(xs, tables, modulus=q, residue=a).grid]
    report = ConvergenceReport.build(
        xs, psi, [v * phi / x for v, x in zip(psi, xs)], 1.0, f"psi(x;{q},{a}) phi(q)/x"
    )
    lower = ConvergenceReport.build(
        xs, psi, [v * q / x for v, x in zip(psi, xs)], 1.0, f"psi(x;{q},{a}) q/x"
    )
    passed = abs(report.final.deviation) < tol and lower.final.normalized > 1.0 - tol
    criteria = (
        f"|psi phi(q)/x - 1| < {tol} e psi q/x > {1.0 - tol} no ponto final"
    )
    return _verdict(
        "dirichlet", {"q": q, "a": a, "limit": limit}, report, passed, criteria,
        extra_reports=[("lower-bound", lower)],
    )


def _inner_series(d: int, terms: int, tables: SieveTables, checkpoints: Sequence[int]) -> List[float]:
    """
    Somas parciais de sum_{n<=N} g(dn)/n para g = -mu log.

    mu(dn) = mu(d) mu(n) quando gcd(d, n) = 1 e 0 caso contrário, então só
    mu até N é necessário.
    """
    mu_d = mobius_small(d)
    values = np.zeros(terms + 1)
    if mu_d != 0:
        n = np.arange(1, terms + 1, dtype=np.int64)
        mu_n = tables.mu[1:terms + 1].astype(np.float64)
        coprime = np.gcd(n, d) == 1
        nf = n.astype(np.float64)
        values[1:] = np.where(coprime, -mu_d * mu_n * (math.log(d) + np.log(nf)) / nf, 0.0)
    return segment_totals(values, checkpoints)


def verify_thm10_formula(
    q: int,
    a: int,
    limit: int,
    series_terms: int,
    tables: SieveTables,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """
    Compara a fórmula do valor médio em progressões com psi(x; q, a)/x.

    Lado da fórmula: (1/q) sum_{d|q} c_d(a)/d sum_{n<=N} g(dn)/n com
    g = -mu log, em somas parciais na ordem natural até ``series_terms``.
    Para q composto o veredito é apenas consultivo.
    """
    _check_coprime_progression(q, a)
    if q > tables.limit:
        raise UsageError(f"Módulo {q} maior que o crivo ({tables.limit})")
    tol = _tolerance("thm10", tolerance)
    advisory = not is_prime_small(q)
    xs = _grid(limit, checkpoints, tables.limit)

    series_tables = tables
    if series_terms > tables.limit:
        logger.info("Crivo próprio para a série interna com N=%d", series_terms)
        series_tables = build_sieve(series_terms)
    term_grid = geometric_grid(series_terms)

    weighted = np.zeros(len(term_grid))
    weighted_mu = np.zeros(len(term_grid))
    d_one_term = 0.0
    for d in divisors(q, tables):
        inner = np.asarray(_inner_series(d, series_terms, series_tables, term_grid))
        weighted += ramanujan_sum_holder(d, a) / d * inner
        weighted_mu += mobius_small(d) / d * inner
        if d == 1:
            d_one_term = inner[-1] / q
    formula = [float(v) for v in weighted / q]
    formula_mu = float(weighted_mu[-1] / q)
    formula_report = ConvergenceReport.build(
        term_grid, formula, formula, 1.0 / euler_phi(q),
        f"fórmula com N termos, q={q}, a={a}",
    )

    psi = [v for _, v in psi_grid(xs, tables, modulus=q, residue=a).grid]
    report = ConvergenceReport.build(
        xs, psi, [v / x for v, x in zip(psi, xs)], formula[-1],
        f"psi(x;{q},{a})/x contra a fórmula",
    )
    passed = None if advisory else abs(report.final.deviation) < tol
    criteria = f"|fórmula - psi(x;q,a)/x| < {tol} no ponto final (q primo)"
    if advisory:
        criteria = "q composto: modo consultivo, só a diferença medida é reportada"
    notes = [
        f"fórmula com c_d(a): {formula[-1]:.10g}; com mu(d): {formula_mu:.10g}",
        f"termo d = 1: {d_one_term:.10g} (previsto 1/q = {1.0 / q:.10g})",
    ]
    return _verdict(
        "thm10",
        {"q": q, "a": a, "limit": limit, "series_terms": series_terms},
        report, passed, criteria, advisory=advisory,
        extra_reports=[("formula", formula_report)], notes=notes,
    )


def verify_lemma11(
    q: int,
    a: int,
    limit: int,
    checkpoints: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> TheoremVerdict:
    """
    Soma de n <= x na progressão contra x^2/2q.

    Reporta |exato - x^2/2q| / (x^2/q) e, à parte, a normalização por x/q.
    """
    if q < 1 or a < 0:
        raise UsageError(f"Exige q >= 1 e a >= 0, recebido q={q}, a={a}")
    tol = _tolerance("lemma11", tolerance)
    xs = _grid(limit, checkpoints)
    exact = [power_sum_ap(x, q, a).exact for x in xs]
    ratios = [power_sum_deviations(x, q, a) for x in xs]
    report = ConvergenceReport.build(
        xs, exact, [r[0] for r in ratios], 0.0, f"|sum - x^2/2q| / (x^2/q), q={q}, a={a}"
    )
    linear = ConvergenceReport.build(
        xs, exact, [r[1] for r in ratios], None, "|sum - x^2/2q| / (x/q)"
    )
    passed = report.final.deviation < tol and shrinking(report.abs_deviations())
    criteria = f"desvio normalizado por x^2/q < {tol} no ponto final e não crescente nos dois últimos passos"
    return _verdict(
        "lemma11", {"q": q, "a": a, "limit": limit}, report, passed, criteria,
        extra_reports=[("linear", linear)],
    )
