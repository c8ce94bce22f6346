from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import logging

from app.api import arithmetic, verify, zeta
from app.config import get_settings

logging.basicConfig(
    level=get_settings().log_level,
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)

app = FastAPI(
    title="Number Theory Lab API",
    description="API para experimentos numéricos de teoria analítica dos números: crivos, somas de Chebyshev, zeta e teoremas de valor médio",
    version="1.0.0"
)

# Configurar CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Incluir rotas
app.include_router(arithmetic.router, prefix="/api/v1")
app.include_router(zeta.router, prefix="/api/v1")
app.include_router(verify.router, prefix="/api/v1")

@app.get("/")
async def root():
    return {"message": "Number Theory Lab API - Experimentos de Teoria Analítica dos Números"}

@app.get("/health")
async def health_check():
    return {"status": "healthy"}
