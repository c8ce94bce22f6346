"""
Somas compensadas.

As somas do toolkit chegam a 10^8 parcelas e precisam manter ~12 dígitos
significativos. ``math.fsum`` (arredondamento exato) é usado nos blocos
contíguos; os totais dos blocos são acumulados com compensação de Kahan,
sempre na ordem natural dos índices.
"""

import math
from typing import Iterable, Iterator, Sequence

import numpy as np


DEFAULT_BLOCK = 4096
# parcelas convertidas para float Python de uma vez em compensated_sum
FSUM_BLOCK = 1 << 16


def kahan_sum(values: Iterable[float]) -> float:
    """
    Soma compensada de Kahan de um iterável.

    Examples:
        >>> kahan_sum([1.0, 2.0, 3.0, 4.0])
        10.0
    """
    s = 0.0
    c = 0.0
    for e in values:
        y = e - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def kahan_cumsum(values: Iterable[float]) -> Iterator[float]:
    """Gera as somas acumuladas compensadas de ``values``."""
    s = 0.0
    c = 0.0
    for e in values:
        y = e - c
        t = s + y
        c = (t - s) - y
        s = t
        yield s


def compensated_sum(values: np.ndarray) -> float:
    """
    Soma de um vetor numpy com arredondamento exato por bloco.

    Cada bloco de FSUM_BLOCK parcelas passa por ``fsum``; os totais dos
    blocos são combinados com Kahan. A memória temporária fica limitada ao
    bloco, não ao vetor inteiro.

    Args:
        values: Vetor de floats finitos

    Returns:
        A soma como float
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size <= FSUM_BLOCK:
        return math.fsum(values.tolist())
    return kahan_sum(
        math.fsum(values[lo:lo + FSUM_BLOCK].tolist())
        for lo in range(0, values.size, FSUM_BLOCK)
    )


def segment_totals(values: np.ndarray, stops: Sequence[int], start: int = 1) -> list:
    """
    Somas acumuladas de ``values[start:stop + 1]`` em cada ponto de ``stops``.

    Cada trecho entre pontos consecutivos é somado com ``fsum`` e os totais
    dos trechos são acumulados com Kahan, preservando a ordem natural.

    Args:
        values: Vetor indexado por n (posição 0 ignorada quando start=1)
        stops: Pontos x estritamente crescentes
        start: Primeiro índice incluído

    Returns:
        Lista com a soma acumulada até cada x
    """
    pieces = []
    lo = start
    for x in stops:
        pieces.append(compensated_sum(values[lo:x + 1]))
        lo = x + 1
    return list(kahan_cumsum(pieces))


def compensated_cumsum(values: np.ndarray, block: int = DEFAULT_BLOCK) -> np.ndarray:
    """
    Tabela de somas prefixas com compensação por blocos.

    Dentro de cada bloco usa ``np.cumsum`` (erro limitado pelo tamanho do
    bloco); os deslocamentos entre blocos vêm de uma soma de Kahan dos totais
    exatos de cada bloco.

    Args:
        values: Vetor de floats
        block: Tamanho do bloco

    Returns:
        Vetor do mesmo tamanho com out[i] = values[0] + ... + values[i]
    """
    values = np.asarray(values, dtype=np.float64)
    out = np.empty_like(values)
    offset = 0.0
    comp = 0.0
    for lo in range(0, values.size, block):
        chunk = values[lo:lo + block]
        out[lo:lo + chunk.size] = np.cumsum(chunk) + offset
        y = compensated_sum(chunk) - comp
        t = offset + y
        comp = (t - offset) - y
        offset = t
    return out
