"""HTTP front end for the library.

A thin FastAPI layer: every route validates its payload with a pydantic
model, calls the corresponding library function, and returns a response
model.  The compute_*/run_* functions that build the response models are
plain functions, so the CLI calls them in-process without a server; the
routes only add HTTP plumbing.

Divergence values can legitimately be infinite (x = 0 at p >= 2), so
responses are serialized by pydantic with non-finite floats rendered as
the strings "Infinity", "-Infinity", "NaN" rather than invalid JSON.
"""

from __future__ import annotations

import json
from typing import Literal, Optional

from fastapi import FastAPI, Request, Response
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .divergences import CORRESPONDENCE_TABLE, alpha_divergence, beta_divergence
from .errors import DataFormatError, DomainError, SeriesError
from .estimation import Dataset, deviance_profile, fit
from .sampling import SamplerConfig, sample
from .tweedie import TweedieParams, log_density

__all__ = [
    "app",
    "compute_divergence",
    "compute_log_density",
    "run_sample",
    "run_fit",
    "run_profile",
    "table_rows",
    "health",
]


class _Model(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="strings")


class DivergenceRequest(_Model):
    kind: Literal["alpha", "beta"]
    p: float
    x: float
    mu: float


class DivergenceResponse(_Model):
    kind: str
    p: float
    x: float
    mu: float
    value: float
    version: str


class LogDensityRequest(_Model):
    p: float
    mu: float
    phi: float
    x: float
    method: Optional[Literal["exact", "series", "saddlepoint"]] = None


class LogDensityResponse(_Model):
    p: float
    mu: float
    phi: float
    x: float
    log_density: float
    method: str
    series_terms_used: int
    warnings: list[str]
    version: str


class SampleRequest(_Model):
    p: float
    mu: float
    phi: float
    n: int = Field(ge=0)
    seed: int = Field(ge=0, lt=2 ** 64)


class SampleResponse(_Model):
    values: list[float]
    n: int
    seed: int
    version: str


class FitRequest(_Model):
    values: list[float]
    p_min: Optional[float] = None
    p_max: Optional[float] = None
    p_grid: Optional[list[float]] = None


class FitResponse(_Model):
    mu_hat: float
    phi_hat: float
    p_hat: float
    log_likelihood: float
    total_deviance: float
    iterations: int
    converged: bool
    p_feasible_interval: tuple[float, float]
    phi_tilde: float
    density_method: str
    version: str


class ProfileRequest(_Model):
    values: list[float]
    p_values: list[float]


class ProfileRow(_Model):
    p: float
    total_deviance: float
    log_likelihood: float
    phi_hat: float
    feasible: bool


class ProfileResponse(_Model):
    rows: list[ProfileRow]
    version: str


class TableRow(_Model):
    p: float
    beta_alpha_ratio: str
    distribution: str
    beta: str
    alpha: str
    entropy: str


class TableResponse(_Model):
    rows: list[TableRow]
    version: str


class HealthResponse(_Model):
    status: str
    version: str


def compute_divergence(req: DivergenceRequest) -> DivergenceResponse:
    func = beta_divergence if req.kind == "beta" else alpha_divergence
    value = float(func(req.p, req.x, req.mu))
    return DivergenceResponse(kind=req.kind, p=req.p, x=req.x, mu=req.mu,
                              value=value, version=__version__)


def compute_log_density(req: LogDensityRequest) -> LogDensityResponse:
    params = TweedieParams(mu=req.mu, phi=req.phi, p=req.p)
    ev = log_density(params, req.x, method=req.method)
    return LogDensityResponse(
        p=req.p, mu=req.mu, phi=req.phi, x=req.x,
        log_density=ev.log_density, method=ev.method.value,
        series_terms_used=ev.series_terms_used, warnings=list(ev.warnings),
        version=__version__,
    )


def run_sample(req: SampleRequest) -> SampleResponse:
    params = TweedieParams(mu=req.mu, phi=req.phi, p=req.p)
    draws = sample(params, SamplerConfig(seed=req.seed, n=req.n))
    return SampleResponse(values=[float(v) for v in draws], n=req.n,
                          seed=req.seed, version=__version__)


def run_fit(req: FitRequest) -> FitResponse:
    result = fit(Dataset(req.values), p_grid=req.p_grid,
                 p_min=req.p_min, p_max=req.p_max)
    return FitResponse(
        mu_hat=result.mu_hat, phi_hat=result.phi_hat, p_hat=result.p_hat,
        log_likelihood=result.log_likelihood, total_deviance=result.total_deviance,
        iterations=result.iterations, converged=result.converged,
        p_feasible_interval=result.p_feasible_interval, phi_tilde=result.phi_tilde,
        density_method=result.density_method.value, version=__version__,
    )


def run_profile(req: ProfileRequest) -> ProfileResponse:
    points = deviance_profile(Dataset(req.values), req.p_values)
    rows = [ProfileRow(p=pt.p, total_deviance=pt.total_deviance,
                       log_likelihood=pt.log_likelihood, phi_hat=pt.phi_hat,
                       feasible=pt.feasible) for pt in points]
    return ProfileResponse(rows=rows, version=__version__)


def table_rows() -> TableResponse:
    rows = [TableRow(p=r.p, beta_alpha_ratio=r.beta_alpha_ratio,
                     distribution=r.distribution, beta=r.beta, alpha=r.alpha,
                     entropy=r.entropy) for r in CORRESPONDENCE_TABLE]
    return TableResponse(rows=rows, version=__version__)


def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


app = FastAPI(title="powerdiv", version=__version__)


def _json(model: BaseModel, status_code: int = 200) -> Response:
    return Response(content=model.model_dump_json(), status_code=status_code,
                    media_type="application/json")


@app.exception_handler(DomainError)
@app.exception_handler(DataFormatError)
async def _domain_error(request: Request, exc: Exception) -> Response:
    body = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    return Response(content=json.dumps(body), status_code=400,
                    media_type="application/json")


@app.exception_handler(SeriesError)
async def _series_error(request: Request, exc: SeriesError) -> Response:
    body = {"error": {"type": "SeriesError", "message": str(exc),
                      "terms_used": exc.terms_used, "p": exc.p, "phi": exc.phi}}
    return Response(content=json.dumps(body), status_code=400,
                    media_type="application/json")


@app.post("/divergence")
async def divergence_route(req: DivergenceRequest) -> Response:
    return _json(compute_divergence(req))


@app.post("/log-density")
async def log_density_route(req: LogDensityRequest) -> Response:
    return _json(compute_log_density(req))


@app.post("/sample")
async def sample_route(req: SampleRequest) -> Response:
    return _json(run_sample(req))


@app.post("/fit")
async def fit_route(req: FitRequest) -> Response:
    return _json(run_fit(req))


@app.post("/profile")
async def profile_route(req: ProfileRequest) -> Response:
    return _json(run_profile(req))


@app.get("/table")
async def table_route() -> Response:
    return _json(table_rows())


@app.get("/health")
async def health_route() -> Response:
    return _json(health())
