from fastapi import APIRouter, HTTPException
from pydantic import BaseModel
from typing import Any, Dict, List, Optional

from app.errors import ToolkitError
from app.services.experiment_service import WINTNER_INSTANCES, get_experiment_service
from app.services.summatory import ConvergenceReport
from app.services.theorem_harness import EXPERIMENTS, TOLERANCES, TheoremVerdict
from app.utils.table_writer import render_report

router = APIRouter()

class VerifyRequest(BaseModel):
    experiment: str
    limit: Optional[int] = None  # Padrão: DEFAULT_LIMIT
    modulus: Optional[int] = None
    residue: Optional[int] = None
    terms: Optional[int] = None  # Termos da série interna (thm10)
    tolerance: Optional[float] = None
    checkpoints: Optional[List[int]] = None
    g: str = "1/d"  # Instância de Wintner: '1/d' ou 'unit'

class CheckpointModel(BaseModel):
    x: int
    raw: float
    normalized: float
    deviation: Optional[float] = None

class ReportModel(BaseModel):
    description: str
    predicted_limit: Optional[float] = None
    checkpoints: List[CheckpointModel]
    table: str  # Mesma tabela CSV da linha de comando

class VerdictResponse(BaseModel):
    experiment: str
    parameters: Dict[str, Any]
    passed: Optional[bool] = None
    advisory: bool = False
    criteria: str
    report: ReportModel
    extra_reports: Dict[str, ReportModel] = {}
    notes: List[str] = []

class BatchRequest(BaseModel):
    requests: List[VerifyRequest]

def _report(report: ConvergenceReport) -> ReportModel:
    return ReportModel(
        description=report.description,
        predicted_limit=report.predicted_limit,
        checkpoints=[CheckpointModel(**c._asdict()) for c in report.checkpoints],
        table=render_report(report),
    )

def _verdict(verdict: TheoremVerdict) -> VerdictResponse:
    return VerdictResponse(
        experiment=verdict.experiment_name,
        parameters=verdict.params,
        passed=verdict.passed,
        advisory=verdict.advisory,
        criteria=verdict.criteria,
        report=_report(verdict.report),
        extra_reports={name: _report(r) for name, r in verdict.extra_reports},
        notes=list(verdict.notes),
    )

@router.get("/experiments")
async def list_experiments():
    """
    Lista os experimentos disponíveis com tolerâncias e parâmetros exigidos.
    """
    return {
        "experiments": [
            {
                "name": info.name,
                "operation": info.operation,
                "statement": info.statement,
                "tolerance": TOLERANCES[info.name],
                "needs_progression": info.needs_progression,
            }
            for info in EXPERIMENTS.values()
        ],
        "wintner_instances": list(WINTNER_INSTANCES),
        "default": "psi-mean",
    }

@router.post("/verify", response_model=VerdictResponse)
async def verify(request: VerifyRequest):
    """
    Executa um experimento e devolve o veredito com a tabela de convergência.

    - passed: None quando o veredito é consultivo (thm10 com q composto)
    """
    try:
        service = get_experiment_service()
        verdict = await service.verify(**request.dict())
        return _verdict(verdict)
    except ToolkitError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Erro no experimento: {str(e)}")

@router.post("/verify/batch", response_model=List[VerdictResponse])
async def verify_batch(request: BatchRequest):
    """
    Executa vários experimentos independentes em paralelo.
    """
    try:
        service = get_experiment_service()
        verdicts = await service.run_many([r.dict() for r in request.requests])
        return [_verdict(v) for v in verdicts]
    except ToolkitError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Erro nos experimentos: {str(e)}")
