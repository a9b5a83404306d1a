"""Market configuration parsing and serialization.

The config is JSON: either a single market object

    {"r": 0.02, "mu": [0.08, 0.05], "sigma": [[0.2, 0.0], [0.1, 0.3]],
     "labels": ["index", "acme"]}

or a piecewise-constant schedule

    {"schedule": [{"duration": 50, "market": {...}},
                  {"duration": 50, "market": {...}}]}

Numbers may be given as decimal strings ("0.02") to sidestep any upstream
parser precision surprises. Each validation failure carries a distinct code:
missing-field, dimension-mismatch, non-finite, rank-deficient, bad-json,
bad-value.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import IncompleteMarketError, ValidationError
from .market import MarketSpec
from .simulate import Schedule

__all__ = ["parse_market_config", "spec_from_mapping", "market_to_dict",
           "config_to_dict"]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    try:
        x = float(value)
    except ValueError:
        raise ValidationError(f"{where}: cannot parse {value!r} as a number") from None
    if not math.isfinite(x):
        raise ValidationError(f"{where}: value {value!r} is not finite",
                              code="non-finite")
    return x


def spec_from_mapping(obj, where: str = "market") -> MarketSpec:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected an object")
    for name in ("r", "mu", "sigma"):
        if name not in obj:
            raise ValidationError(f"{where}.{name} is missing",
                                  code="missing-field")
    unknown = set(obj) - {"r", "mu", "sigma", "labels"}
    if unknown:
        raise ValidationError(f"{where}: unknown fields {sorted(unknown)}")

    r = _number(obj["r"], f"{where}.r")
    if not isinstance(obj["mu"], list) or not obj["mu"]:
        raise ValidationError(f"{where}.mu must be a non-empty list")
    mu = np.array([_number(v, f"{where}.mu[{k}]") for k, v in enumerate(obj["mu"])])

    rows = obj["sigma"]
    if not isinstance(rows, list) or not rows:
        raise ValidationError(f"{where}.sigma must be a non-empty list of rows")
    if len(rows) != len(mu):
        raise ValidationError(
            f"{where}.sigma has {len(rows)} rows but mu has {len(mu)} entries",
            code="dimension-mismatch")
    width = None
    sigma = []
    for k, row in enumerate(rows):
        if not isinstance(row, list) or not row:
            raise ValidationError(f"{where}.sigma[{k}] must be a non-empty list",
                                  code="dimension-mismatch")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValidationError(
                f"{where}.sigma[{k}] has length {len(row)}, expected {width}",
                code="dimension-mismatch")
        sigma.append([_number(v, f"{where}.sigma[{k}][{d}]")
                      for d, v in enumerate(row)])
    sigma = np.array(sigma)

    labels = obj.get("labels")
    if labels is not None:
        if (not isinstance(labels, list)
                or not all(isinstance(x, str) for x in labels)):
            raise ValidationError(f"{where}.labels must be a list of strings")
        labels = tuple(labels)

    spec = MarketSpec(r=r, mu=mu, sigma=sigma, labels=labels)
    rank = np.linalg.matrix_rank(spec.sigma)
    if rank < spec.brownian_dim:
        raise IncompleteMarketError(
            f"{where}.sigma has rank {rank} < {spec.brownian_dim} columns")
    return spec


def parse_market_config(text: str) -> MarketSpec | Schedule:
    """Parse config JSON into a MarketSpec or a [(duration, spec), ...] schedule."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}",
                              code="bad-json") from None
    if not isinstance(obj, dict):
        raise ValidationError("config must be a JSON object", code="bad-json")
    if "schedule" not in obj:
        return spec_from_mapping(obj, where="market")

    segs = obj["schedule"]
    if not isinstance(segs, list) or not segs:
        raise ValidationError("schedule must be a non-empty list")
    schedule: Schedule = []
    for i, seg in enumerate(segs):
        where = f"schedule[{i}]"
        if not isinstance(seg, dict):
            raise ValidationError(f"{where}: expected an object")
        if "duration" not in seg:
            raise ValidationError(f"{where}.duration is missing",
                                  code="missing-field")
        if "market" not in seg:
            raise ValidationError(f"{where}.market is missing",
                                  code="missing-field")
        duration = _number(seg["duration"], f"{where}.duration")
        if duration <= 0:
            raise ValidationError(f"{where}.duration must be positive")
        schedule.append((duration, spec_from_mapping(seg["market"],
                                                     where=f"{where}.market")))
    return schedule


def market_to_dict(spec: MarketSpec) -> dict:
    out = {"r": spec.r, "mu": spec.mu.tolist(), "sigma": spec.sigma.tolist()}
    if spec.labels is not None:
        out["labels"] = list(spec.labels)
    return out


def config_to_dict(parsed: MarketSpec | Schedule) -> dict:
    if isinstance(parsed, MarketSpec):
        return market_to_dict(parsed)
    return {"schedule": [{"duration": d, "market": market_to_dict(s)}
                         for d, s in parsed]}
