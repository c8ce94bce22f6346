"""
Tabelas determinísticas x,raw,normalized,predicted,deviation em CSV ou TSV.

Floats saem com 10 dígitos significativos e campos ausentes ficam vazios;
a mesma entrada gera sempre os mesmos bytes.
"""

import csv
import io
from typing import Iterable, List, Optional, TextIO

from app.errors import UsageError
from app.services.summatory import ConvergenceReport

HEADER = ("x", "raw", "normalized", "predicted", "deviation")
DELIMITERS = {"csv": ",", "tsv": "\t"}


def format_value(value: Optional[float]) -> str:
    """
    Examples:
        >>> format_value(None)
        ''
        >>> format_value(0.5)
        '0.5'
        >>> format_value(212)
        '212'
    """
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{value:.10g}"


def report_rows(report: ConvergenceReport) -> List[List[str]]:
    """Linhas da tabela de um relatório, sem o cabeçalho."""
    return [
        [
            str(c.x),
            format_value(c.raw),
            format_value(c.normalized),
            format_value(report.predicted_limit),
            format_value(c.deviation),
        ]
        for c in report.checkpoints
    ]


def write_rows(rows: Iterable[Iterable[str]], stream: TextIO, fmt: str = "csv") -> None:
    if fmt not in DELIMITERS:
        raise UsageError(f"Formato desconhecido: {fmt}. Use csv ou tsv")
    writer = csv.writer(stream, delimiter=DELIMITERS[fmt], lineterminator="\n")
    writer.writerow(HEADER)
    writer.writerows(rows)


def render_rows(rows: Iterable[Iterable[str]], fmt: str = "csv") -> str:
    buffer = io.StringIO()
    write_rows(rows, buffer, fmt)
    return buffer.getvalue()


def render_report(report: ConvergenceReport, fmt: str = "csv") -> str:
    return render_rows(report_rows(report), fmt)
