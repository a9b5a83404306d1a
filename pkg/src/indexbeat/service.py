"""FastAPI front end for the analytics engine.

Three POST endpoints mirror the CLI subcommands:

  /analyze   static risk analysis plus finite-horizon reports
  /simulate  Monte Carlo paths: per-path terminal stats, optional full paths
  /verify    the verification suite at quick or full level

Validation failures map to 422 with a machine-readable code; a non-viable
market maps to 409 and carries the least-squares residual.
"""

from __future__ import annotations

from itertools import product

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import verify as verify_mod
from .config import config_to_dict, spec_from_mapping
from .errors import NonViableMarketError, ValidationError
from .horizon import horizon_report
from .market import MarketSpec, check_viability, risk_profile, sigma_condition
from .reporting import RunManifest, __version__
from .simulate import Schedule, SimulationConfig, simulate_prices, simulate_terminals
from .strategy import log_wealth_path

app = FastAPI(title="indexbeat", version=__version__)


# --------------------------------------------------------------------------
# request / response models
# --------------------------------------------------------------------------

class MarketPayload(BaseModel):
    r: float
    mu: list[float]
    sigma: list[list[float]]
    labels: list[str] | None = None


class SegmentPayload(BaseModel):
    duration: float
    market: MarketPayload


class MarketInput(BaseModel):
    market: MarketPayload | None = None
    schedule: list[SegmentPayload] | None = None
    config_path: str = "<inline>"


class SimGrid(BaseModel):
    horizon: float
    steps: int = Field(ge=1)
    paths: int = Field(ge=1)
    seed: int = 0


class AnalyzeRequest(MarketInput):
    epsilon: list[float] = [0.025]
    delta: list[float] = [0.1]
    horizon: list[float] = [100.0]


class RiskProfilePayload(BaseModel):
    theta: list[float]
    disc: list[float]
    disc_norm_sq: float
    scapm_residuals: list[float]
    deficits: list[float]
    optimal_growth_rate: float
    sigma_condition_number: float


class HorizonReportPayload(BaseModel):
    epsilon: float
    delta: float
    horizon_T: float
    z_epsilon: float
    z_delta: float
    threshold_weak: float
    threshold_loose: float
    threshold_improved: float
    disc_norm: float
    p_outperform: float
    verdict: str


class AnalyzeResponse(BaseModel):
    manifest: dict
    viability_residual: float
    risk_profiles: list[RiskProfilePayload]
    reports: list[HorizonReportPayload]


class SimulateRequest(MarketInput):
    sim: SimGrid
    workers: int = 1
    full_paths: bool = False
    max_full_path_values: int = 2_000_000


class PathRow(BaseModel):
    path_id: int
    log_s: list[float]
    log_k: float
    identity_residual: float


class FullPaths(BaseModel):
    times: list[float]
    log_s: list[list[list[float]]]   # path x time x security
    log_k: list[list[float]]         # path x time


class SimulateResponse(BaseModel):
    manifest: dict
    labels: list[str]
    rows: list[PathRow]
    max_identity_residual: float
    full: FullPaths | None = None


class VerifyRequest(MarketInput):
    level: str = "quick"


class CheckPayload(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyResponse(BaseModel):
    manifest: dict
    passed: bool
    checks: list[CheckPayload]


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _http_validation(exc: ValidationError) -> HTTPException:
    return HTTPException(status_code=422,
                         detail={"code": exc.code, "message": str(exc)})


def _parse_input(body: MarketInput) -> MarketSpec | Schedule:
    try:
        if body.market is not None:
            return spec_from_mapping(body.market.model_dump(), where="market")
        if body.schedule:
            return [(seg.duration,
                     spec_from_mapping(seg.market.model_dump(),
                                       where=f"schedule[{i}].market"))
                    for i, seg in enumerate(body.schedule)]
    except ValidationError as exc:
        raise _http_validation(exc) from None
    raise HTTPException(status_code=422,
                        detail={"code": "missing-field",
                                "message": "provide either market or schedule"})


def _profile_payload(spec: MarketSpec) -> RiskProfilePayload:
    profile = risk_profile(spec)
    return RiskProfilePayload(
        theta=profile.theta.tolist(), disc=profile.disc.tolist(),
        disc_norm_sq=profile.disc_norm_sq,
        scapm_residuals=profile.scapm_residuals.tolist(),
        deficits=profile.deficits.tolist(),
        optimal_growth_rate=profile.optimal_growth_rate,
        sigma_condition_number=sigma_condition(spec))


def _guard_viability(specs) -> float:
    worst = 0.0
    for spec in specs:
        try:
            viable, residual = check_viability(spec)
        except ValidationError as exc:
            raise _http_validation(exc) from None
        if not viable:
            raise HTTPException(
                status_code=409,
                detail={"code": "non-viable",
                        "message": "market is not viable",
                        "residual": residual})
        worst = max(worst, residual)
    return worst


# --------------------------------------------------------------------------
# endpoints
# --------------------------------------------------------------------------

@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(body: AnalyzeRequest) -> AnalyzeResponse:
    parsed = _parse_input(body)
    specs = [parsed] if isinstance(parsed, MarketSpec) else [s for _, s in parsed]
    residual = _guard_viability(specs)
    reports = []
    if isinstance(parsed, MarketSpec):
        try:
            for e, d, t in product(body.epsilon, body.delta, body.horizon):
                rep = horizon_report(parsed, e, d, t)
                reports.append(HorizonReportPayload(
                    **{**rep.__dict__, "verdict": rep.verdict.value}))
        except ValidationError as exc:
            raise _http_validation(exc) from None
    manifest = RunManifest.now("analyze", body.config_path, seed=0)
    return AnalyzeResponse(
        manifest=manifest.to_dict(), viability_residual=residual,
        risk_profiles=[_profile_payload(s) for s in specs], reports=reports)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(body: SimulateRequest) -> SimulateResponse:
    parsed = _parse_input(body)
    specs = [parsed] if isinstance(parsed, MarketSpec) else [s for _, s in parsed]
    _guard_viability(specs)
    try:
        cfg = SimulationConfig(horizon_T=body.sim.horizon, n_steps=body.sim.steps,
                               n_paths=body.sim.paths, seed=body.sim.seed)
        stats = simulate_terminals(parsed, cfg, workers=max(1, body.workers))
    except ValidationError as exc:
        raise _http_validation(exc) from None

    labels = specs[0].asset_labels()
    rows = [PathRow(path_id=i, log_s=stats.log_S[i].tolist(),
                    log_k=float(stats.log_K[i]),
                    identity_residual=float(stats.identity_residual[i]))
            for i in range(cfg.n_paths)]

    full = None
    if body.full_paths:
        n_values = cfg.n_paths * (cfg.n_steps + 1) * (specs[0].n_assets + 2)
        if n_values > body.max_full_path_values:
            raise HTTPException(
                status_code=422,
                detail={"code": "full-paths-cap",
                        "message": f"full-path output needs {n_values} values, "
                                   f"cap is {body.max_full_path_values}"})
        if isinstance(parsed, MarketSpec):
            bundle = log_wealth_path(parsed, simulate_prices(parsed, cfg))
        else:
            from .simulate import schedule_simulate
            bundle = log_wealth_path(specs[0], schedule_simulate(parsed, cfg))
        full = FullPaths(times=bundle.times.tolist(),
                         log_s=bundle.log_S.tolist(),
                         log_k=bundle.log_K.tolist())

    manifest = RunManifest.now(
        "simulate", body.config_path, seed=cfg.seed,
        sim={"horizon_T": cfg.horizon_T, "n_steps": cfg.n_steps,
             "n_paths": cfg.n_paths})
    return SimulateResponse(
        manifest=manifest.to_dict(), labels=list(labels), rows=rows,
        max_identity_residual=float(abs(stats.identity_residual).max()),
        full=full)


@app.post("/verify", response_model=VerifyResponse)
def verify(body: VerifyRequest) -> VerifyResponse:
    if body.level not in ("quick", "full"):
        raise HTTPException(status_code=422,
                            detail={"code": "bad-value",
                                    "message": "level must be quick or full"})
    parsed = _parse_input(body)
    spec = parsed if isinstance(parsed, MarketSpec) else parsed[0][1]
    _guard_viability([spec])
    checks = verify_mod.run_checks(spec, level=body.level)
    manifest = RunManifest.now("verify", body.config_path,
                               seed=verify_mod.VERIFY_SEED)
    return VerifyResponse(
        manifest=manifest.to_dict(),
        passed=all(c.passed for c in checks),
        checks=[CheckPayload(name=c.name, passed=bool(c.passed), detail=c.detail)
                for c in checks])
