"""Command-line client for the indexbeat service.

The CLI is a thin HTTP client. By default it talks to an in-process instance
of the FastAPI app over an ASGI transport, so no server is needed; pass
--server to point it at a running deployment instead.

Exit codes: 0 success, 2 validation error, 3 non-viable market,
4 verification failure, 5 I/O or transport error.

The default master seed can be overridden with the INDEXBEAT_SEED
environment variable; an explicit --seed wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import httpx

from .config import parse_market_config
from .errors import NonViableMarketError, ValidationError
from .reporting import RunManifest, __version__, full_paths_csv, terminal_stats_csv

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NON_VIABLE = 3
EXIT_VERIFY_FAILED = 4
EXIT_IO = 5

SEED_ENV_VAR = "INDEXBEAT_SEED"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="indexbeat",
        description="Market-price-of-risk analytics and index-outperformance "
                    "simulation.")
    parser.add_argument("--server", metavar="URL", default=None,
                        help="base URL of a running service; default runs "
                             "the service in-process")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="static risk analysis and "
                                             "finite-horizon reports")
    analyze.add_argument("--config", required=True)
    analyze.add_argument("--epsilon", type=float, action="append", default=None)
    analyze.add_argument("--delta", type=float, action="append", default=None)
    analyze.add_argument("--horizon", type=float, action="append", default=None)
    analyze.add_argument("--out", default=None, help="write JSON report here "
                                                     "instead of stdout")

    simulate = sub.add_parser("simulate", help="Monte Carlo simulation of "
                                               "prices and strategy wealth")
    simulate.add_argument("--config", required=True)
    simulate.add_argument("--paths", type=int, required=True)
    simulate.add_argument("--steps", type=int, required=True)
    simulate.add_argument("--horizon", type=float, required=True)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--workers", type=int, default=1)
    simulate.add_argument("--full-paths", default=None, metavar="PATH",
                          help="also write grid-resolved paths to this CSV")
    simulate.add_argument("--out", default=None,
                          help="write the terminal-statistics CSV here "
                               "instead of stdout")

    verify = sub.add_parser("verify", help="run the verification suite")
    verify.add_argument("--config", required=True)
    verify.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


def _market_body(config_path: str) -> dict:
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _IOFailure(f"cannot read config: {exc}") from None
    parsed = parse_market_config(text)  # local validation: fail fast
    from .config import config_to_dict
    from .market import MarketSpec
    body = {"config_path": config_path}
    as_dict = config_to_dict(parsed)
    if isinstance(parsed, MarketSpec):
        body["market"] = as_dict
    else:
        body["schedule"] = as_dict["schedule"]
    return body


class _IOFailure(Exception):
    pass


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # In-process fallback: drive the ASGI app directly, no server required.
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service import app
    return TestClient(app, raise_server_exceptions=False)


def _post(client: httpx.Client, path: str, body: dict) -> dict:
    response = client.post(path, json=body)
    if response.status_code == 422:
        detail = response.json().get("detail")
        raise ValidationError(str(detail), code="service-rejected")
    if response.status_code == 409:
        detail = response.json().get("detail", {})
        raise NonViableMarketError(float(detail.get("residual", float("nan"))),
                                   tol=1e-9)
    response.raise_for_status()
    return response.json()


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {out}: {exc}") from None


def _resolve_seed(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _cmd_analyze(client: httpx.Client, args) -> int:
    body = _market_body(args.config)
    body["epsilon"] = args.epsilon or [0.025]
    body["delta"] = args.delta or [0.1]
    body["horizon"] = args.horizon or [100.0]
    payload = _post(client, "/analyze", body)
    _write(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _cmd_simulate(client: httpx.Client, args) -> int:
    body = _market_body(args.config)
    body["sim"] = {"horizon": args.horizon, "steps": args.steps,
                   "paths": args.paths, "seed": _resolve_seed(args.seed)}
    body["workers"] = args.workers
    body["full_paths"] = args.full_paths is not None
    payload = _post(client, "/simulate", body)

    manifest = RunManifest(
        command="simulate", config_path=args.config,
        seed=payload["manifest"]["seed"], sim=payload["manifest"]["sim"],
        version=payload["manifest"]["version"],
        created_at=payload["manifest"]["created_at"])
    labels = payload["labels"]
    rows = payload["rows"]
    log_s = [row["log_s"] for row in rows]
    log_k = [row["log_k"] for row in rows]
    residual = [row["identity_residual"] for row in rows]
    _write(terminal_stats_csv(manifest, labels, log_s, log_k, residual), args.out)

    if args.full_paths is not None:
        import numpy as np
        full = payload["full"]
        _write(full_paths_csv(manifest, labels, full["times"],
                              np.asarray(full["log_s"]),
                              np.asarray(full["log_k"])),
               args.full_paths)
    return EXIT_OK


def _cmd_verify(client: httpx.Client, args) -> int:
    body = _market_body(args.config)
    body["level"] = args.level
    payload = _post(client, "/verify", body)
    for check in payload["checks"]:
        mark = "PASS" if check["passed"] else "FAIL"
        print(f"{mark} {check['name']}: {check['detail']}")
    if payload["passed"]:
        print(f"verify [{args.level}]: all {len(payload['checks'])} checks passed")
        return EXIT_OK
    failed = sum(1 for c in payload["checks"] if not c["passed"])
    print(f"verify [{args.level}]: {failed} check(s) FAILED")
    return EXIT_VERIFY_FAILED


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with _client(args.server) as client:
            if args.command == "analyze":
                return _cmd_analyze(client, args)
            if args.command == "simulate":
                return _cmd_simulate(client, args)
            return _cmd_verify(client, args)
    except ValidationError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NonViableMarketError as exc:
        print(f"error [non-viable]: {exc}", file=sys.stderr)
        return EXIT_NON_VIABLE
    except _IOFailure as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except httpx.HTTPError as exc:
        print(f"error [transport]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
