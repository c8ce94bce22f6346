import math
import time
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from app.errors import UsageError
from app.main import app
from app.services import experiment_service
from app.services.arith_core import build_sieve
from app.services.experiment_service import ExperimentService

client = TestClient(app)


class TestRootAPI:
    """Testes para as rotas básicas."""

    def test_root(self):
        response = client.get("/")
        assert response.status_code == 200
        assert "Number Theory Lab" in response.json()["message"]

    def test_health(self):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "healthy"}


class TestArithmeticAPI:
    """Testes para as rotas de crivo e funções somatórias."""

    def test_sieve_summary(self):
        """Testa o resumo do crivo até 1000."""
        response = client.get("/api/v1/sieve", params={"limit": 1000})
        assert response.status_code == 200
        data = response.json()
        assert data["prime_count"] == 168
        assert data["squarefree_count"] == 608
        assert data["largest_prime"] == 997

    def test_sieve_invalid_limit(self):
        response = client.get("/api/v1/sieve", params={"limit": 0})
        assert response.status_code == 422

    def test_psi(self):
        """Testa psi(10) = log 2520."""
        response = client.get("/api/v1/psi", params={"x": 10})
        assert response.status_code == 200
        assert response.json()["value"] == pytest.approx(math.log(2520), abs=1e-12)

    def test_psi_progression(self):
        response = client.get("/api/v1/psi", params={"x": 10, "modulus": 4, "residue": 3})
        assert response.status_code == 200
        data = response.json()
        assert data["modulus"] == 4
        assert data["value"] == pytest.approx(math.log(21), abs=1e-12)

    def test_psi_half_progression(self):
        """Testa modulus sem residue."""
        response = client.get("/api/v1/psi", params={"x": 10, "modulus": 4})
        assert response.status_code == 400

    def test_psi_bad_residue(self):
        response = client.get("/api/v1/psi", params={"x": 10, "modulus": 4, "residue": 4})
        assert response.status_code == 400

    def test_pi(self):
        response = client.get("/api/v1/pi", params={"x": 10_000})
        assert response.status_code == 200
        assert response.json()["value"] == 1229

    def test_mertens(self):
        response = client.get("/api/v1/mertens", params={"x": 10})
        assert response.status_code == 200
        assert response.json()["value"] == -1

    def test_ramanujan(self):
        """Testa c_12(0) = phi(12) e c_5(1) = mu(5)."""
        response = client.get("/api/v1/ramanujan", params={"q": 12, "a": 0})
        assert response.status_code == 200
        assert response.json()["value"] == 4
        response = client.get("/api/v1/ramanujan", params={"q": 5, "a": 1})
        data = response.json()
        assert data["value"] == -1
        assert data["exponential_sum"] == pytest.approx(-1, abs=1e-9)

    def test_ramanujan_invalid(self):
        response = client.get("/api/v1/ramanujan", params={"q": 0, "a": 1})
        assert response.status_code == 422


class TestZetaAPI:
    """Testes para as rotas de zeta."""

    def test_zeta_two(self):
        response = client.get("/api/v1/zeta", params={"re": 2})
        assert response.status_code == 200
        data = response.json()
        assert data["method"] == "euler-maclaurin"
        assert abs(data["value"]["re"] - 1.6449341) < 1e-6
        assert data["tail_bound"] is not None

    def test_zeta_near_pole(self):
        """Testa que |s - 1| < 0.5 usa a expansão de Laurent."""
        response = client.get("/api/v1/zeta", params={"re": 1.2})
        assert response.status_code == 200
        data = response.json()
        assert data["method"] == "laurent"
        assert abs(data["value"]["re"] - 5.5915824) < 1e-6

    def test_zeta_pole(self):
        response = client.get("/api/v1/zeta", params={"re": 1})
        assert response.status_code == 400

    def test_zeta_critical_strip(self):
        response = client.get("/api/v1/zeta", params={"re": 0.5, "im": 14})
        assert response.status_code == 400

    def test_stieltjes(self):
        response = client.get("/api/v1/stieltjes", params={"k_max": 4})
        assert response.status_code == 200
        data = response.json()
        assert len(data["stieltjes"]) == 5
        assert abs(data["stieltjes"][0] - 0.5772156649) < 1e-8

    def test_stieltjes_unsupported(self):
        response = client.get("/api/v1/stieltjes", params={"k_max": 5})
        assert response.status_code == 400


class TestVerifyAPI:
    """Testes para as rotas de experimentos."""

    def test_list_experiments(self):
        response = client.get("/api/v1/experiments")
        assert response.status_code == 200
        data = response.json()
        names = [e["name"] for e in data["experiments"]]
        assert "pnt" in names and "thm10" in names
        assert data["default"] in names
        assert "1/d" in data["wintner_instances"]

    def test_verify_lemma11(self):
        response = client.post("/api/v1/verify", json={
            "experiment": "lemma11",
            "limit": 100_000,
            "modulus": 3,
            "residue": 1,
        })
        assert response.status_code == 200
        data = response.json()
        assert data["passed"] is True
        assert data["advisory"] is False
        assert data["report"]["table"].startswith("x,raw,normalized,predicted,deviation")
        assert "linear" in data["extra_reports"]

    def test_verify_psi_mean(self):
        response = client.post("/api/v1/verify", json={
            "experiment": "psi-mean",
            "limit": 100_000,
        })
        assert response.status_code == 200
        data = response.json()
        assert [c["x"] for c in data["report"]["checkpoints"]] == [1000, 10_000, 100_000]
        assert data["parameters"] == {"limit": 100_000}

    def test_verify_advisory(self):
        response = client.post("/api/v1/verify", json={
            "experiment": "thm10",
            "limit": 10_000,
            "modulus": 4,
            "residue": 1,
        })
        assert response.status_code == 200
        data = response.json()
        assert data["advisory"] is True
        assert data["passed"] is None

    def test_verify_unknown_experiment(self):
        response = client.post("/api/v1/verify", json={"experiment": "riemann"})
        assert response.status_code == 400
        assert "desconhecido" in response.json()["detail"]

    def test_verify_missing_progression(self):
        response = client.post("/api/v1/verify", json={"experiment": "dirichlet", "limit": 1000})
        assert response.status_code == 400

    def test_verify_missing_field(self):
        response = client.post("/api/v1/verify", json={})
        assert response.status_code == 422

    def test_verify_batch(self):
        response = client.post("/api/v1/verify/batch", json={"requests": [
            {"experiment": "lemma11", "limit": 10_000, "modulus": 7, "residue": 2},
            {"experiment": "wintner", "limit": 10_000, "g": "unit"},
        ]})
        assert response.status_code == 200
        data = response.json()
        assert [d["experiment"] for d in data] == ["lemma11", "wintner"]


class TestExperimentService:
    """Testes para o serviço de experimentos."""

    def test_cache_reuse(self):
        """Testa que um crivo maior em cache atende limites menores."""
        service = ExperimentService(cache_size=2)
        large = service.tables_for(10_000)
        assert service.tables_for(5000) is large

    def test_cache_eviction(self):
        service = ExperimentService(cache_size=1)
        first = service.tables_for(100)
        service.tables_for(1000)
        assert service.tables_for(100) is not first

    def test_concurrent_build_once(self, monkeypatch):
        """Pedidos simultâneos do mesmo limite constroem um único crivo."""
        calls = []

        def slow_build(limit, allow_large=False):
            calls.append(limit)
            time.sleep(0.2)
            return build_sieve(limit, allow_large=allow_large)

        monkeypatch.setattr(experiment_service, "build_sieve", slow_build)
        service = ExperimentService(cache_size=2)
        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(service.tables_for, [5000] * 4))
        assert calls == [5000]
        assert all(r is results[0] for r in results)

    def test_clear_cache(self):
        service = ExperimentService(cache_size=2)
        first = service.tables_for(100)
        service.clear_cache()
        assert service.tables_for(100) is not first

    def test_unknown_experiment(self):
        with pytest.raises(UsageError):
            ExperimentService().run_experiment("riemann")

    def test_unknown_wintner_instance(self):
        with pytest.raises(UsageError):
            ExperimentService().run_experiment("wintner", limit=1000, g="mu")

    @pytest.mark.asyncio
    async def test_run_many(self):
        """Testa que a ordem dos vereditos segue a dos pedidos."""
        service = ExperimentService(cache_size=2)
        verdicts = await service.run_many([
            {"experiment": "lemma11", "limit": 10_000, "modulus": 5, "residue": 2},
            {"experiment": "psi-mean", "limit": 10_000},
            {"experiment": "lemma11", "limit": 10_000, "modulus": 2, "residue": 1},
        ])
        assert [v.experiment_name for v in verdicts] == ["lemma11", "psi-mean", "lemma11"]
        assert verdicts[2].params["q"] == 2
