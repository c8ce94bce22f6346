import pytest

from app.services.arith_core import build_sieve


@pytest.fixture(scope="session")
def tables():
    """Crivo até 10^6, construído uma vez por sessão."""
    return build_sieve(1_000_000)


@pytest.fixture(scope="session")
def small_tables():
    """Crivo pequeno para oráculos por força bruta."""
    return build_sieve(10_000)
