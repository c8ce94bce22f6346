from fastapi import APIRouter, HTTPException, Query
from pydantic import BaseModel
from typing import Optional

import numpy as np

from app.errors import ToolkitError
from app.services.arith_core import SieveTables, ramanujan_sum_expsum, ramanujan_sum_holder
from app.services.experiment_service import get_experiment_service
from app.services.summatory import chebyshev_psi, mertens, prime_pi, prime_pi_ap, psi_ap

router = APIRouter()

class SieveSummary(BaseModel):
    limit: int
    prime_count: int
    squarefree_count: int
    largest_prime: Optional[int] = None

class SummatoryResponse(BaseModel):
    x: int
    modulus: Optional[int] = None
    residue: Optional[int] = None
    value: float

class RamanujanResponse(BaseModel):
    q: int
    a: int
    value: int
    exponential_sum: float  # Valor pela definição, antes do arredondamento

def _summarize(tables: SieveTables, limit: int) -> SieveSummary:
    count = prime_pi(limit, tables)
    return SieveSummary(
        limit=limit,
        prime_count=count,
        squarefree_count=int(np.count_nonzero(tables.mu[1:limit + 1])),
        largest_prime=int(tables.primes[count - 1]) if count else None,
    )

def _progression(modulus: Optional[int], residue: Optional[int]):
    if (modulus is None) != (residue is None):
        raise HTTPException(status_code=400, detail="modulus e residue devem ser usados juntos")

@router.get("/sieve", response_model=SieveSummary)
async def sieve_summary(
    limit: int = Query(..., ge=1, description="Limite N do crivo")
):
    """
    Constrói (ou reaproveita do cache) o crivo até N e resume as tabelas.
    """
    try:
        service = get_experiment_service()
        tables = await service.run_in_executor(service.tables_for, limit)
        return _summarize(tables, limit)
    except ToolkitError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Erro no crivo: {str(e)}")

@router.get("/psi", response_model=SummatoryResponse)
async def psi(
    x: int = Query(..., ge=1, description="Ponto x"),
    modulus: Optional[int] = Query(None, description="Módulo q da progressão"),
    residue: Optional[int] = Query(None, description="Resíduo a da progressão"),
):
    """
    psi(x) ou, com modulus e residue, psi(x; q, a).
    """
    try:
        _progression(modulus, residue)
        service = get_experiment_service()
        tables = await service.run_in_executor(service.tables_for, x)
        if modulus is None:
            value = chebyshev_psi(x, tables)
        else:
            value = psi_ap(x, modulus, residue, tables)
        return SummatoryResponse(x=x, modulus=modulus, residue=residue, value=value)
    except HTTPException:
        raise
    except ToolkitError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Erro ao calcular psi: {str(e)}")

@router.get("/pi", response_model=SummatoryResponse)
async def pi(
    x: int = Query(..., ge=1, description="Ponto x"),
    modulus: Optional[int] = Query(None, description="Módulo q da progressão"),
    residue: Optional[int] = Query(None, description="Resíduo a da progressão"),
):
    """
    Quantidade de primos até x, opcionalmente numa progressão.
    """
    try:
        _progression(modulus, residue)
        service = get_experiment_service()
        tables = await service.run_in_executor(service.tables_for, x)
        if modulus is None:
            value = prime_pi(x, tables)
        else:
            value = prime_pi_ap(x, modulus, residue, tables)
        return SummatoryResponse(x=x, modulus=modulus, residue=residue, value=value)
    except HTTPException:
        raise
    except ToolkitError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Erro ao contar primos: {str(e)}")

@router.get("/mertens", response_model=SummatoryResponse)
async def mertens_value(
    x: int = Query(..., ge=1, description="Ponto x")
):
    """
    M(x) = soma de mu(n) para n <= x.
    """
    try:
        service = get_experiment_service()
        tables = await service.run_in_executor(service.tables_for, x)
        return SummatoryResponse(x=x, value=mertens(x, tables))
    except ToolkitError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Erro ao calcular M(x): {str(e)}")

@router.get("/ramanujan", response_model=RamanujanResponse)
async def ramanujan(
    q: int = Query(..., ge=1, le=100000, description="Módulo q"),
    a: int = Query(..., description="Inteiro a")
):
    """
    Soma de Ramanujan c_q(a) pela forma de Hölder, junto com a soma exponencial.
    """
    try:
        return RamanujanResponse(
            q=q,
            a=a,
            value=ramanujan_sum_holder(q, a),
            exponential_sum=ramanujan_sum_expsum(q, a),
        )
    except ToolkitError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Erro na soma de Ramanujan: {str(e)}")
