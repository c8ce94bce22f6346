from fastapi import APIRouter, HTTPException, Query
from pydantic import BaseModel
from typing import List, Optional

from app.config import get_settings
from app.errors import ToolkitError
from app.services.experiment_service import get_experiment_service
from app.services.zeta_lab import (
    MAX_STIELTJES_ORDER,
    POLE_RADIUS,
    ComplexValue,
    stieltjes_constants,
    zeta_em,
    zeta_prime_em,
    zeta_prime_taylor_eval,
    zeta_taylor_eval,
)

router = APIRouter()

class ComplexModel(BaseModel):
    re: float
    im: float = 0.0

class ZetaResponse(BaseModel):
    s: ComplexModel
    method: str  # 'euler-maclaurin' ou 'laurent'
    terms: int
    value: ComplexModel
    derivative: ComplexModel
    tail_bound: Optional[float] = None

class StieltjesResponse(BaseModel):
    terms: int
    stieltjes: List[float]
    taylor_coefficients: List[float]

def _model(value: ComplexValue) -> ComplexModel:
    return ComplexModel(re=value.re, im=value.im)

def _evaluate(s: ComplexValue, terms: Optional[int]) -> ZetaResponse:
    if abs(s.to_complex() - 1) < POLE_RADIUS:
        expansion = stieltjes_constants(MAX_STIELTJES_ORDER, terms)
        return ZetaResponse(
            s=_model(s),
            method="laurent",
            terms=get_settings().stieltjes_terms if terms is None else terms,
            value=_model(zeta_taylor_eval(s, expansion)),
            derivative=_model(zeta_prime_taylor_eval(s, expansion)),
        )
    value = zeta_em(s, terms)
    derivative = zeta_prime_em(s, terms)
    return ZetaResponse(
        s=_model(s),
        method="euler-maclaurin",
        terms=value.terms_used,
        value=_model(value.value),
        derivative=_model(derivative.value),
        tail_bound=value.tail_bound,
    )

@router.get("/zeta", response_model=ZetaResponse)
async def zeta(
    re: float = Query(..., description="Parte real de s"),
    im: float = Query(0.0, description="Parte imaginária de s"),
    terms: Optional[int] = Query(None, ge=1, description="Termos da soma direta")
):
    """
    zeta(s) e zeta'(s).

    - |s - 1| < 0.5: expansão de Laurent com gamma_0..gamma_4
    - demais pontos com Re(s) > 1: Euler-Maclaurin
    """
    try:
        service = get_experiment_service()
        return await service.run_in_executor(_evaluate, ComplexValue(re=re, im=im), terms)
    except (ToolkitError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Erro ao avaliar zeta: {str(e)}")

@router.get("/stieltjes", response_model=StieltjesResponse)
async def stieltjes(
    k_max: int = Query(4, ge=0, description="Ordem máxima K"),
    terms: Optional[int] = Query(None, description="N da definição de limite")
):
    """
    Constantes de Stieltjes gamma_0..gamma_K.
    """
    try:
        service = get_experiment_service()
        expansion = await service.run_in_executor(stieltjes_constants, k_max, terms)
        return StieltjesResponse(
            terms=get_settings().stieltjes_terms if terms is None else terms,
            stieltjes=list(expansion.stieltjes),
            taylor_coefficients=list(expansion.taylor_coefficients()),
        )
    except ToolkitError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Erro nas constantes de Stieltjes: {str(e)}")
