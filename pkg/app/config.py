import os
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class Settings:
    """Configuração lida das variáveis de ambiente.

    Os valores padrão servem para uma máquina de mesa comum; o teto do crivo
    protege contra esgotamento acidental de memória.
    """

    sieve_ceiling: int
    hard_sieve_ceiling: int
    default_limit: int
    zeta_terms: int
    stieltjes_terms: int
    sieve_cache_size: int
    log_level: str


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw.replace("_", ""))
    except ValueError:
        raise ValueError(f"Variável de ambiente {name} inválida: {raw!r}")


@lru_cache(maxsize=None)
def get_settings() -> Settings:
    return Settings(
        sieve_ceiling=_int_env("SIEVE_CEILING", 100_000_000),
        # tabela spf em int32
        hard_sieve_ceiling=_int_env("HARD_SIEVE_CEILING", 2_000_000_000),
        default_limit=_int_env("DEFAULT_LIMIT", 1_000_000),
        zeta_terms=_int_env("ZETA_TERMS", 1_000),
        stieltjes_terms=_int_env("STIELTJES_TERMS", 100_000),
        sieve_cache_size=_int_env("SIEVE_CACHE_SIZE", 2),
        log_level=os.getenv("LOG_LEVEL", "INFO").upper(),
    )
