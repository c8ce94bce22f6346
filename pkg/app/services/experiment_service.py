import asyncio
import logging
import threading
from collections import OrderedDict
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence

from app.config import get_settings
from app.errors import UsageError
from app.services import theorem_harness as harness
from app.services.arith_core import SieveTables, build_sieve
from app.services.zeta_lab import zeta_em

logger = logging.getLogger(__name__)

WINTNER_INSTANCES = {
    "1/d": harness.GSpec.reciprocal,
    "unit": harness.GSpec.unit,
}


class ExperimentService:
    """Serviço que mantém crivos em cache e executa os experimentos."""

    def __init__(self, cache_size: Optional[int] = None):
        settings = get_settings()
        self.cache_size = settings.sieve_cache_size if cache_size is None else cache_size
        self._cache: "OrderedDict[int, SieveTables]" = OrderedDict()
        self._lock = threading.Lock()
        self._build_locks: Dict[int, threading.Lock] = {}

    def tables_for(self, limit: int, allow_large: bool = False) -> SieveTables:
        """
        Retorna tabelas do crivo que cobrem ``limit``.

        Qualquer crivo em cache com limite >= ``limit`` serve; caso contrário
        um novo é construído e o mais antigo sai do cache. Pedidos simultâneos
        do mesmo limite esperam uma única construção.

        Args:
            limit: Menor N necessário
            allow_large: Repassado para build_sieve
        """
        cached = self._cached(limit)
        if cached is not None:
            return cached

        with self._lock:
            build_lock = self._build_locks.setdefault(limit, threading.Lock())

        with build_lock:
            cached = self._cached(limit)
            if cached is not None:
                return cached
            tables = build_sieve(limit, allow_large=allow_large)
            with self._lock:
                self._cache[limit] = tables
                while len(self._cache) > max(self.cache_size, 0):
                    evicted, _ = self._cache.popitem(last=False)
                    logger.info("Crivo %d removido do cache", evicted)
                self._build_locks.pop(limit, None)
        return tables

    def _cached(self, limit: int) -> Optional[SieveTables]:
        with self._lock:
            for key in list(self._cache):
                if key >= limit:
                    self._cache.move_to_end(key)
                    logger.info("Crivo %d reaproveitado do cache para N=%d", key, limit)
                    return self._cache[key]
        return None

    def clear_cache(self):
        with self._lock:
            self._cache.clear()

    def run_experiment(
        self,
        experiment: str,
        limit: Optional[int] = None,
        modulus: Optional[int] = None,
        residue: Optional[int] = None,
        terms: Optional[int] = None,
        tolerance: Optional[float] = None,
        checkpoints: Optional[Sequence[int]] = None,
        g: str = "1/d",
        allow_large: bool = False,
    ) -> harness.TheoremVerdict:
        """
        Executa um experimento pelo nome do catálogo.

        Args:
            experiment: Nome em theorem_harness.EXPERIMENTS
            limit: Limite x (padrão DEFAULT_LIMIT)
            modulus: q, obrigatório para experimentos em progressões
            residue: a, obrigatório junto com q
            terms: Termos da série interna (thm10); padrão igual ao limite
            tolerance: Substitui a tolerância principal
            checkpoints: Grade explícita
            g: Instância de Wintner ("1/d" ou "unit")
            allow_large: Permite crivos acima de SIEVE_CEILING

        Returns:
            TheoremVerdict

        Raises:
            UsageError: experimento desconhecido ou parâmetros faltando
        """
        info = harness.EXPERIMENTS.get(experiment)
        if info is None:
            raise UsageError(
                f"Experimento desconhecido: {experiment}. "
                f"Disponíveis: {', '.join(harness.EXPERIMENTS)}"
            )
        if info.needs_progression and (modulus is None or residue is None):
            raise UsageError(f"Experimento {experiment} exige --modulus e --residue")
        limit = get_settings().default_limit if limit is None else limit

        logger.info("Iniciando experimento %s com limite %d", experiment, limit)
        common = {"checkpoints": checkpoints, "tolerance": tolerance}

        if experiment == "lemma11":
            return harness.verify_lemma11(modulus, residue, limit, **common)
        if experiment == "wintner":
            if g not in WINTNER_INSTANCES:
                raise UsageError(f"Instância g desconhecida: {g}. Disponíveis: {', '.join(WINTNER_INSTANCES)}")
            rule = WINTNER_INSTANCES[g]()
            predicted = zeta_em(2.0).value.re if g == "1/d" else 1.0
            return harness.verify_wintner(rule, predicted, limit, **common)

        tables = self.tables_for(limit, allow_large=allow_large)
        if experiment == "dirichlet":
            return harness.verify_dirichlet_ap(modulus, residue, limit, tables, **common)
        if experiment == "thm10":
            series_terms = limit if terms is None else terms
            return harness.verify_thm10_formula(
                modulus, residue, limit, series_terms, tables, **common
            )
        operation = getattr(harness, info.operation)
        return operation(limit, tables, **common)

    async def run_in_executor(self, fn: Callable[..., Any], *args, **kwargs) -> Any:
        """Executa ``fn`` no executor padrão sem bloquear o loop de eventos."""
        loop = asyncio.get_event_loop()
        return await loop.run_in_executor(None, partial(fn, *args, **kwargs))

    async def verify(self, experiment: str, **params) -> harness.TheoremVerdict:
        return await self.run_in_executor(self.run_experiment, experiment, **params)

    async def run_many(self, requests: Sequence[Dict[str, Any]]) -> List[harness.TheoremVerdict]:
        """
        Executa experimentos independentes em paralelo.

        Cada pedido é um dicionário com a chave ``experiment`` e os demais
        parâmetros de run_experiment. A ordem do resultado segue a dos pedidos.
        """
        tasks = [self.verify(**dict(request)) for request in requests]
        return list(await asyncio.gather(*tasks))


_service: Optional[ExperimentService] = None


def get_experiment_service() -> ExperimentService:
    """Instância compartilhada pelo app e pela CLI."""
    global _service
    if _service is None:
        _service = ExperimentService()
    return _service
