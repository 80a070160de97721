"""HTTP wiring: one POST endpoint per pipeline stage."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import CapExceeded, InputError
from .handlers import do_classify, do_construct, do_oracle, do_report, do_verify
from .models import (
    ClassifyRequest,
    ClassifyResponse,
    ConstructionModel,
    ConstructRequest,
    OracleRequest,
    OracleResponse,
    ReportRequest,
    RunReport,
    VerifyRequest,
    VerifyResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="twistedwreath", version=__version__)

    @app.exception_handler(InputError)
    async def input_error(request: Request, exc: InputError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"detail": str(exc), "kind": "input"}
        )

    @app.exception_handler(CapExceeded)
    async def cap_exceeded(request: Request, exc: CapExceeded) -> JSONResponse:
        return JSONResponse(status_code=413, content={"detail": str(exc), "kind": "cap"})

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/classify", response_model=ClassifyResponse)
    async def classify_endpoint(req: ClassifyRequest) -> ClassifyResponse:
        return do_classify(req)

    @app.post("/construct", response_model=ConstructionModel)
    async def construct_endpoint(req: ConstructRequest) -> ConstructionModel:
        return do_construct(req)

    @app.post("/verify", response_model=VerifyResponse)
    async def verify_endpoint(req: VerifyRequest) -> VerifyResponse:
        return do_verify(req)

    @app.post("/oracle", response_model=OracleResponse)
    async def oracle_endpoint(req: OracleRequest) -> OracleResponse:
        return do_oracle(req)

    @app.post("/report", response_model=RunReport)
    async def report_endpoint(req: ReportRequest) -> RunReport:
        return do_report(req)

    return app
