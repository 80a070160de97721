"""Command-line client for the twisted-conjugacy pipeline.

Each subcommand builds a request model, runs the matching service handler
(in-process by default, or POSTed to a running server with --server), and
prints the response JSON to stdout. --json-out additionally writes it to a
file; --quiet suppresses stdout.

Exit codes: 0 success, 1 a checked assertion failed (verification not
certified, oracle counts disagree, report inconsistency), 2 invalid input,
3 enumeration cap exceeded.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path
from typing import Optional

import click
import pydantic

from . import __version__
from .errors import CapExceeded, InputError
from .service.handlers import HANDLERS
from .service.models import (
    DEFAULT_ENUM_CAP,
    ClassifyRequest,
    ConstructionModel,
    ConstructRequest,
    OracleRequest,
    ReportRequest,
    VerifyRequest,
)


def _dispatch(op: str, req, server: Optional[str]) -> dict:
    if server is None:
        _, handler = HANDLERS[op]
        return handler(req).model_dump(mode="json")
    import httpx

    url = server.rstrip("/") + "/" + op
    try:
        resp = httpx.post(url, json=req.model_dump(mode="json"), timeout=600.0)
    except httpx.HTTPError as exc:
        raise InputError(f"cannot reach server {server!r}: {exc}") from None
    if resp.status_code == 400:
        raise InputError(resp.json().get("detail", resp.text))
    if resp.status_code == 413:
        raise CapExceeded(resp.json().get("detail", resp.text))
    if resp.status_code != 200:
        raise InputError(f"server returned {resp.status_code}: {resp.text}")
    return resp.json()


def _emit(payload: dict, json_out: Optional[str], quiet: bool) -> None:
    text = json.dumps(payload, indent=2)
    if json_out:
        Path(json_out).write_text(text + "\n")
    if not quiet:
        click.echo(text)


def common_options(fn):
    fn = click.option(
        "--server",
        default=None,
        metavar="URL",
        help="POST the request to a running service instead of computing here.",
    )(fn)
    fn = click.option(
        "--json-out",
        default=None,
        type=click.Path(dir_okay=False, writable=True),
        help="Also write the response JSON to this file.",
    )(fn)
    fn = click.option("--quiet", is_flag=True, help="Suppress stdout.")(fn)
    return fn


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except pydantic.ValidationError as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(2)
        except InputError as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(2)
        except CapExceeded as exc:
            click.echo(f"cap exceeded: {exc}", err=True)
            sys.exit(3)

    return wrapper


@click.group()
@click.version_option(__version__, prog_name="twistedwreath")
def main() -> None:
    """Automorphisms of G wr Z^k with finitely many twisted conjugacy classes:
    classify, construct, verify, and cross-check against finite quotients."""


@main.command()
@click.option("--group", required=True, help="Group spec, e.g. '2^2:2,3^1:1'.")
@click.option("--k", required=True, type=int, help="Rank of the Z^k part.")
@common_options
@handle_errors
def classify(group: str, k: int, server, json_out, quiet) -> None:
    """Evaluate which case hypotheses hold for G wr Z^k."""
    payload = _dispatch("classify", ClassifyRequest(group=group, k=k), server)
    _emit(payload, json_out, quiet)


@main.command()
@click.option("--group", required=True, help="Group spec, e.g. '2^2:2,3^1:1'.")
@click.option("--k", required=True, type=int, help="Rank of the Z^k part.")
@click.option("--case", default=None, type=int, help="Force a case (1, 2, or 3).")
@common_options
@handle_errors
def construct(group: str, k: int, case, server, json_out, quiet) -> None:
    """Build the automorphism for the lowest (or forced) applicable case."""
    payload = _dispatch(
        "construct", ConstructRequest(group=group, k=k, case=case), server
    )
    _emit(payload, json_out, quiet)


def _load_construction(text: str) -> ConstructionModel:
    stripped = text.strip()
    if stripped == "-":
        raw = sys.stdin.read()
    elif stripped.startswith("{"):
        raw = stripped
    else:
        path = Path(stripped)
        if not path.is_file():
            raise InputError(f"construction file not found: {stripped!r}")
        raw = path.read_text()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"construction is not valid JSON: {exc}") from None
    return ConstructionModel.model_validate(data)


@main.command()
@click.option(
    "--construction",
    required=True,
    help="Construction JSON: inline text, a file path, or '-' for stdin.",
)
@common_options
@handle_errors
def verify(construction: str, server, json_out, quiet) -> None:
    """Certify the class count of a construction artifact.

    Exits 1 when the verification does not certify a finite count."""
    req = VerifyRequest(construction=_load_construction(construction))
    payload = _dispatch("verify", req, server)
    _emit(payload, json_out, quiet)
    if not payload["certified"]:
        sys.exit(1)


@main.command()
@click.option("--group", required=True, help="Group spec, e.g. '2^2:2,3^1:1'.")
@click.option("--k", required=True, type=int, help="Rank of the Z^k part.")
@click.option("--case", default=None, type=int, help="Force a case (1, 2, or 3).")
@click.option("--n", required=True, type=int, help="Quotient modulus (>= 2).")
@click.option(
    "--cap",
    default=DEFAULT_ENUM_CAP,
    type=int,
    show_default=True,
    help="Largest finite wreath product to enumerate.",
)
@common_options
@handle_errors
def oracle(group: str, k: int, case, n: int, cap: int, server, json_out, quiet) -> None:
    """Count twisted classes of the descended automorphism by brute force.

    Runs the three independent counting routes and exits 1 on disagreement."""
    req = OracleRequest(group=group, k=k, n=n, case=case, cap=cap)
    payload = _dispatch("oracle", req, server)
    _emit(payload, json_out, quiet)
    if not payload["counts_agree"]:
        sys.exit(1)


@main.command()
@click.option("--group", required=True, help="Group spec, e.g. '2^2:2,3^1:1'.")
@click.option("--k", required=True, type=int, help="Rank of the Z^k part.")
@click.option("--case", default=None, type=int, help="Force a case (1, 2, or 3).")
@click.option(
    "--n",
    "n_values",
    multiple=True,
    type=int,
    help="Quotient modulus; repeat for several quotients.",
)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option(
    "--cap",
    default=DEFAULT_ENUM_CAP,
    type=int,
    show_default=True,
    help="Largest finite wreath product to enumerate.",
)
@common_options
@handle_errors
def report(
    group: str, k: int, case, n_values, seed: int, cap: int, server, json_out, quiet
) -> None:
    """Run the full pipeline and emit one reproducible JSON report.

    classify -> construct -> verify -> per-n oracle counts -> pullback;
    exits 1 unless every consistency assertion passes."""
    req = ReportRequest(
        group=group, k=k, case=case, n=list(n_values), seed=seed, cap=cap
    )
    payload = _dispatch("report", req, server)
    _emit(payload, json_out, quiet)
    if not payload["consistency_ok"]:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
