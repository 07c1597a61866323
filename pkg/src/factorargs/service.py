"""HTTP service exposing network upload, query, and graph endpoints."""

from __future__ import annotations

import os
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .arguments import FAParams
from .bif import parse_bif
from .errors import (
    BifParseError,
    CapacityError,
    FactorArgsError,
    NumericError,
    ValidationError,
)
from .network import BayesianNetwork, network_to_json
from .nlg import MODES
from .query import QueryOptions, graph_payload, run_query

MODEL_DIR_ENV = "FA_MODEL_DIR"
DEFAULT_TIME_BUDGET_S = 30.0


class QueryParamsModel(BaseModel):
    ml: int | None = None
    mc: int | None = 2
    dt: float = 0.1
    top_n: int | None = None
    min_strength: float | None = None


class QueryRequestModel(BaseModel):
    evidence: dict[str, str] = Field(default_factory=dict)
    target: str
    params: QueryParamsModel = Field(default_factory=QueryParamsModel)
    mode: str | None = None
    include_trace: bool = False
    include_graph: bool = False


class _Registry:
    """Immutable store of uploaded networks; re-upload mints a new id."""

    def __init__(self):
        self._lock = threading.Lock()
        self._networks: dict[str, BayesianNetwork] = {}
        self._counter = 0

    def add(self, bn: BayesianNetwork, wanted: str | None = None) -> str:
        with self._lock:
            if wanted is not None and wanted not in self._networks:
                nid = wanted
            else:
                self._counter += 1
                nid = f"bn-{self._counter}"
            self._networks[nid] = bn
            return nid

    def get(self, nid: str) -> BayesianNetwork:
        bn = self._networks.get(nid)
        if bn is None:
            raise KeyError(nid)
        return bn


def _error_response(status: int, code: str, exc: Exception) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": str(exc), "detail": type(exc).__name__},
    )


def create_app(
    model_dir: str | os.PathLike | None = None,
    time_budget_s: float = DEFAULT_TIME_BUDGET_S,
) -> FastAPI:
    app = FastAPI(title="factorargs", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = _Registry()
    app.state.registry = registry

    if model_dir is None:
        model_dir = os.environ.get(MODEL_DIR_ENV)
    if model_dir:
        for path in sorted(Path(model_dir).glob("*.bif")):
            bn = parse_bif(path.read_text(encoding="utf-8"))
            registry.add(bn, wanted=path.stem)

    @app.exception_handler(BifParseError)
    @app.exception_handler(ValidationError)
    async def _validation(request: Request, exc: ValidationError):
        return _error_response(400, "validation", exc)

    @app.exception_handler(NumericError)
    async def _numeric(request: Request, exc: NumericError):
        return _error_response(400, "numeric", exc)

    @app.exception_handler(CapacityError)
    async def _capacity(request: Request, exc: CapacityError):
        return _error_response(422, "capacity", exc)

    @app.exception_handler(FactorArgsError)
    async def _other(request: Request, exc: FactorArgsError):
        return _error_response(500, "internal", exc)

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/networks")
    async def upload(request: Request):
        text = (await request.body()).decode("utf-8")
        bn = parse_bif(text)
        nid = registry.add(bn)
        return {"id": nid, "name": bn.name}

    @app.get("/networks/{nid}")
    async def get_network(nid: str):
        try:
            bn = registry.get(nid)
        except KeyError:
            return _error_response(404, "not_found", KeyError(f"no network {nid!r}"))
        return network_to_json(bn)

    @app.get("/networks/{nid}/graph")
    async def get_graph(nid: str):
        try:
            bn = registry.get(nid)
        except KeyError:
            return _error_response(404, "not_found", KeyError(f"no network {nid!r}"))
        return graph_payload(bn)

    @app.post("/networks/{nid}/query")
    async def query(nid: str, body: QueryRequestModel):
        try:
            bn = registry.get(nid)
        except KeyError:
            return _error_response(404, "not_found", KeyError(f"no network {nid!r}"))
        if body.mode is not None and body.mode not in MODES:
            return _error_response(
                400, "validation", ValidationError(f"mode must be one of {MODES}")
            )
        params = FAParams(
            ml=body.params.ml,
            mc=body.params.mc,
            dt=body.params.dt,
            top_n=body.params.top_n,
            min_strength=body.params.min_strength,
        )
        options = QueryOptions(
            params=params,
            modes=(body.mode,) if body.mode else MODES,
            include_trace=body.include_trace,
            include_graph=body.include_graph,
            time_budget_s=time_budget_s,
        )
        return run_query(bn, body.evidence, body.target, options)

    return app


def serve(port: int = 8000, model_dir: str | None = None, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(model_dir=model_dir), host=host, port=port)
