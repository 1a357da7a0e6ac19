"""Command-line front end: a thin client over the service handlers.

Each subcommand maps one-to-one onto a service endpoint.  By default the
request is dispatched in-process (no server needed); with ``--server URL``
the same request goes over HTTP to a running instance, and the rendered
output is identical either way.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

import httpx
from pydantic import ValidationError

from . import __version__
from .config import ConfigError, RunConfig, load_config, request_for
from .service import handlers
from .service.app import NUMERICAL_ERRORS
from .tables import build_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

WORKERS_ENV = "PERICHAIN_WORKERS"

_COMMANDS = ("bands", "eigs", "scaling", "sweep-mu", "verify")

_LOCAL_HANDLERS = {
    "bands": handlers.handle_bands,
    "eigs": handlers.handle_eigs,
    "scaling": handlers.handle_scaling,
    "sweep-mu": handlers.handle_sweep_mu,
    "verify": handlers.handle_verify,
}

_NUMERICAL_ERROR_NAMES = {cls.__name__ for cls in NUMERICAL_ERRORS}


class NumericalFailure(RuntimeError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perichain",
        description=(
            "Band structure, transfer-matrix spectral classification and "
            "two-terminal conductance scaling of 1D periodic chains."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    help_by_command = {
        "bands": "band edges, band intervals and dispersion samples",
        "eigs": "transfer-matrix eigenvalues and spectral class over a mu grid",
        "scaling": "conductance-vs-size regime classification per mu",
        "sweep-mu": "raw log-conductance table over (mu, N)",
        "verify": "run the built-in invariant and oracle suites",
    }
    for name in _COMMANDS:
        cmd = sub.add_parser(name, help=help_by_command[name])
        cmd.add_argument("--config", metavar="PATH", help="JSON config file")
        cmd.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        cmd.add_argument(
            "--format", choices=("csv", "json"), help="output format (default csv)"
        )
        cmd.add_argument(
            "--workers", type=int, metavar="INT",
            help=f"worker threads for grid sweeps (default ${WORKERS_ENV} or 1)",
        )
        cmd.add_argument(
            "--tol", type=float, metavar="FLOAT",
            help="tolerance override: root tolerance for bands, classification "
                 "tolerance for eigs/scaling/sweep-mu, suite tolerance for verify",
        )
        cmd.add_argument(
            "--server", metavar="URL",
            help="dispatch to a running service instead of computing in-process",
        )

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _workers_from_env() -> Optional[int]:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV}={raw!r} is not an integer") from exc
    if value < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1")
    return value


def _dispatch_local(command: str, request) -> dict:
    handler = _LOCAL_HANDLERS[command]
    try:
        response = handler(request)
    except NUMERICAL_ERRORS as exc:
        raise NumericalFailure(f"{type(exc).__name__}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return response.model_dump(mode="json")


def _dispatch_remote(server: str, command: str, request) -> dict:
    url = f"/v1/{command}"
    try:
        with httpx.Client(base_url=server, timeout=300.0) as client:
            reply = client.post(url, json=request.model_dump(mode="json"))
    except httpx.HTTPError as exc:
        raise NumericalFailure(f"cannot reach server {server}: {exc}") from exc
    if reply.status_code == 200:
        return reply.json()
    if reply.status_code == 422:
        raise ConfigError(f"server rejected request: {reply.text}")
    if reply.status_code == 400:
        detail = reply.json().get("detail", {})
        name = detail.get("error", "")
        message = detail.get("message", reply.text)
        if name in _NUMERICAL_ERROR_NAMES:
            raise NumericalFailure(f"{name}: {message}")
        raise ConfigError(f"{name}: {message}")
    raise NumericalFailure(f"server error {reply.status_code}: {reply.text}")


def _write_output(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        workers = args.workers if args.workers is not None else _workers_from_env()
        request = request_for(args.command, cfg, workers=workers, tol=args.tol)
    except (ConfigError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.server:
            payload = _dispatch_remote(args.server, args.command, request)
        else:
            payload = _dispatch_local(args.command, request)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    out_format = args.format or cfg.output.format or "csv"
    table = build_table(args.command, payload)
    text = table.to_csv() if out_format == "csv" else table.to_json()
    out_path = args.out or cfg.output.path
    _write_output(text, out_path)

    if args.command == "verify":
        for name, passed in zip(table.columns["name"], table.columns["passed"]):
            print(f"[verify] {name}: {'PASS' if passed else 'FAIL'}", file=sys.stderr)
        if not payload["all_passed"]:
            return EXIT_VERIFY
    return EXIT_OK


def console_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_entry()
