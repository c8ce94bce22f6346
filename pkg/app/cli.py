"""
Linha de comando: crivos, funções somatórias, zeta e os experimentos.

Cada comando grava uma tabela CSV (ou TSV) x,raw,normalized,predicted,deviation.
Códigos de saída: 0 aprovado, 1 critério reprovado, 2 uso incorreto, 3 E/S.
"""

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO, Tuple

import numpy as np

from app.config import get_settings
from app.errors import ToolkitError, UsageError
from app.services.arith_core import euler_phi
from app.services.experiment_service import ExperimentService, get_experiment_service
from app.services.summatory import (
    ConvergenceReport,
    geometric_grid,
    mertens_grid,
    prime_pi,
    prime_pi_ap,
    psi_grid,
    squarefree_density,
    validate_checkpoints,
)
from app.services.theorem_harness import EXPERIMENTS
from app.services.zeta_lab import (
    MAX_STIELTJES_ORDER,
    POLE_RADIUS,
    ComplexValue,
    stieltjes_constants,
    zeta_em,
    zeta_taylor_eval,
)
from app.utils.table_writer import format_value, render_report, render_rows, report_rows

logger = logging.getLogger(__name__)

COMMANDS = ("sieve", "psi", "pi", "mertens", "zeta", "stieltjes", "verify")
FORMATS = ("csv", "tsv")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    limit: int
    experiment: Optional[str] = None
    modulus: Optional[int] = None
    residue: Optional[int] = None
    s: Optional[Tuple[float, float]] = None
    terms: Optional[int] = None
    tolerance: Optional[float] = None
    checkpoints: Optional[str] = None
    format: str = "csv"
    output: Optional[str] = None
    allow_large: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"Comando desconhecido: {self.command}")
        if self.command == "verify" and self.experiment not in EXPERIMENTS:
            raise UsageError(f"Experimento desconhecido: {self.experiment}")
        if (self.modulus is None) != (self.residue is None):
            raise UsageError("--modulus e --residue devem ser usados juntos")
        if self.modulus is not None:
            if self.modulus < 1:
                raise UsageError(f"--modulus deve ser >= 1, recebido {self.modulus}")
            if not 0 <= self.residue < self.modulus:
                raise UsageError(
                    f"--residue deve satisfazer 0 <= a < q, recebido a={self.residue}, q={self.modulus}"
                )
        if self.tolerance is not None and not self.tolerance > 0:
            raise UsageError(f"--tolerance deve ser > 0, recebido {self.tolerance}")
        if self.limit < 1:
            raise UsageError(f"--limit deve ser >= 1, recebido {self.limit}")
        if self.format not in FORMATS:
            raise UsageError(f"--format deve ser csv ou tsv, recebido {self.format}")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser que levanta UsageError em vez de encerrar o processo."""

    def error(self, message):
        raise UsageError(message)


def _complex_arg(text: str) -> Tuple[float, float]:
    parts = text.split(",")
    if len(parts) > 2:
        raise argparse.ArgumentTypeError(f"s deve ser RE ou RE,IM, recebido {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"s deve ser RE ou RE,IM, recebido {text!r}")
    if not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"s deve ser finito, recebido {text!r}")
    return values[0], values[1] if len(values) == 2 else 0.0


def _int_arg(text: str) -> int:
    try:
        return int(text.replace("_", ""))
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"inteiro inválido: {text!r}")
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"inteiro inválido: {text!r}")
    return int(value)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False, allow_abbrev=False)
    common.add_argument("--limit", type=_int_arg, help="Limite N (padrão DEFAULT_LIMIT)")
    common.add_argument("--modulus", type=_int_arg, help="Módulo q da progressão")
    common.add_argument("--residue", type=_int_arg, help="Resíduo a da progressão")
    common.add_argument("--s", type=_complex_arg, help="Ponto s como RE ou RE,IM")
    common.add_argument("--terms", type=_int_arg, help="Quantidade de termos das séries")
    common.add_argument("--tolerance", type=float, help="Substitui a tolerância do experimento")
    common.add_argument("--checkpoints", help="geometric:B ou lista separada por vírgulas")
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--output", help="Arquivo de saída (padrão: saída padrão)")
    common.add_argument("--allow-large", action="store_true", dest="allow_large",
                        help="Permite crivos acima de SIEVE_CEILING")

    parser = _Parser(
        prog="python -m app",
        description="Experimentos numéricos de teoria analítica dos números",
        allow_abbrev=False,
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = commands.add_parser(name, parents=[common], allow_abbrev=False)
        if name == "verify":
            sub.add_argument("experiment", choices=list(EXPERIMENTS))
    return parser


def parse_args(argv: Sequence[str]) -> RunConfig:
    """
    Converte argumentos em RunConfig.

    Raises:
        UsageError: flags desconhecidas, valores inválidos ou combinação
            inconsistente (por exemplo --residue sem --modulus)
    """
    args = build_parser().parse_args(list(argv))
    limit = get_settings().default_limit if args.limit is None else args.limit
    return RunConfig(
        command=args.command,
        limit=limit,
        experiment=getattr(args, "experiment", None),
        modulus=args.modulus,
        residue=args.residue,
        s=args.s,
        terms=args.terms,
        tolerance=args.tolerance,
        checkpoints=args.checkpoints,
        format=args.format,
        output=args.output,
        allow_large=args.allow_large,
    )


def resolve_checkpoints(text: Optional[str], limit: int) -> List[int]:
    """
    Grade de pontos a partir de "geometric:B" ou "x1,x2,...".

    Examples:
        >>> resolve_checkpoints(None, 100000)
        [1000, 10000, 100000]
        >>> resolve_checkpoints("10,20,30", 100)
        [10, 20, 30]
    """
    if text is None:
        return geometric_grid(limit)
    if text.startswith("geometric:"):
        try:
            base = int(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"Base inválida em --checkpoints {text!r}")
        return geometric_grid(limit, base=base)
    try:
        xs = [_int_arg(part.strip()) for part in text.split(",")]
    except argparse.ArgumentTypeError as e:
        raise UsageError(f"--checkpoints inválido: {e}")
    return validate_checkpoints(xs, limit)


def _summatory_report(config: RunConfig, service: ExperimentService) -> ConvergenceReport:
    xs = resolve_checkpoints(config.checkpoints, config.limit)
    tables = service.tables_for(config.limit, allow_large=config.allow_large)
    q, a = config.modulus, config.residue
    phi = 1 if q is None else euler_phi(q)

    if config.command == "sieve":
        logger.info("Crivo até %d: %d primos", tables.limit, tables.primes.size)
        return squarefree_density(xs, tables)
    if config.command == "psi":
        values = [v for _, v in psi_grid(xs, tables, modulus=q, residue=a).grid]
        label = "psi(x)/x" if q is None else f"psi(x;{q},{a}) phi(q)/x"
        return ConvergenceReport.build(xs, values, [v * phi / x for v, x in zip(values, xs)], 1.0, label)
    if config.command == "pi":
        if q is None:
            counts = [prime_pi(x, tables) for x in xs]
        else:
            counts = [prime_pi_ap(x, q, a, tables) for x in xs]
        normalized = [c * phi * math.log(x) / x for c, x in zip(counts, xs)]
        return ConvergenceReport.build(xs, counts, normalized, 1.0, "pi(x) phi(q) log(x)/x")
    values = mertens_grid(xs, tables)
    return ConvergenceReport.build(xs, values, [m / x for m, x in zip(values, xs)], 0.0, "M(x)/x")


def _zeta_rows(config: RunConfig) -> List[List[str]]:
    if config.s is None:
        raise UsageError("zeta exige --s RE[,IM]")
    s = ComplexValue(*config.s)
    if abs(s.to_complex() - 1) < POLE_RADIUS:
        terms = config.terms or get_settings().stieltjes_terms
        value = zeta_taylor_eval(s, stieltjes_constants(MAX_STIELTJES_ORDER, terms))
    else:
        evaluation = zeta_em(s, config.terms)
        terms, value = evaluation.terms_used, evaluation.value
    return [[str(terms), format_value(value.re), format_value(value.im), "", ""]]


def _stieltjes_rows(config: RunConfig) -> List[List[str]]:
    expansion = stieltjes_constants(MAX_STIELTJES_ORDER, config.terms)
    rows = []
    for k, (gamma, coefficient) in enumerate(zip(expansion.stieltjes, expansion.taylor_coefficients())):
        predicted = float(np.euler_gamma) if k == 0 else None
        deviation = gamma - predicted if predicted is not None else None
        rows.append([str(k), format_value(gamma), format_value(coefficient),
                     format_value(predicted), format_value(deviation)])
    return rows


def _emit(text: str, config: RunConfig, stdout: TextIO) -> None:
    if config.output is None:
        stdout.write(text)
        stdout.flush()
        return
    with open(config.output, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def run(config: RunConfig, stdout: Optional[TextIO] = None,
        service: Optional[ExperimentService] = None) -> int:
    """
    Executa o comando e grava a tabela.

    Returns:
        0 se aprovado (vereditos consultivos não contam), 1 se algum critério
        falhou, 2 em uso incorreto, 3 em falha de E/S
    """
    stdout = sys.stdout if stdout is None else stdout
    service = get_experiment_service() if service is None else service
    status = EXIT_OK
    try:
        if config.command == "verify":
            checkpoints = (
                None if config.checkpoints is None
                else resolve_checkpoints(config.checkpoints, config.limit)
            )
            verdict = service.run_experiment(
                config.experiment,
                limit=config.limit,
                modulus=config.modulus,
                residue=config.residue,
                terms=config.terms,
                tolerance=config.tolerance,
                checkpoints=checkpoints,
                allow_large=config.allow_large,
            )
            text = render_report(verdict.report, config.format)
            logger.info("Critério: %s", verdict.criteria)
            for note in verdict.notes:
                logger.info(note)
            if verdict.advisory:
                logger.info("Veredito consultivo para %s", config.experiment)
            elif not verdict.passed:
                status = EXIT_FAILED
        elif config.command == "zeta":
            text = render_rows(_zeta_rows(config), config.format)
        elif config.command == "stieltjes":
            text = render_rows(_stieltjes_rows(config), config.format)
        else:
            text = render_rows(report_rows(_summatory_report(config, service)), config.format)
    except ToolkitError as e:
        print(f"erro: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        _emit(text, config, stdout)
    except OSError as e:
        print(f"erro de E/S: {e}", file=sys.stderr)
        return EXIT_IO
    return status


def configure_logging():
    logging.basicConfig(
        level=get_settings().log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as e:
        print(f"erro: {e}", file=sys.stderr)
        return EXIT_USAGE
    return run(config)
