"""Command line client for the obstruction service.

By default the commands drive the FastAPI app in-process (no server
required); ``--server URL`` points them at a running instance instead.

Exit codes: 0 all good, 1 verification mismatch, 2 input error,
3 internal inconsistency.
"""

from __future__ import annotations

import json
import sys
from typing import Optional

import click
import httpx

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class ServiceClient:
    """HTTP client over a remote server or the in-process app."""

    def __init__(self, server: Optional[str] = None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app())

    def get(self, path):
        return self._client.get(path)

    def post(self, path, payload):
        return self._client.post(path, json=payload)


def _fail_from_response(resp) -> None:
    try:
        detail = resp.json().get("detail", {})
    except Exception:
        detail = {}
    message = detail.get("message") if isinstance(detail, dict) else str(detail)
    click.echo(f"error: {message or resp.text}", err=True)
    if isinstance(detail, dict) and detail.get("kind") == "internal-inconsistency":
        sys.exit(EXIT_INTERNAL)
    if resp.status_code in (404, 422):
        sys.exit(EXIT_INPUT)
    sys.exit(EXIT_INTERNAL)


def _parse_stages(stages: Optional[str]):
    if stages is None:
        return None
    return [s.strip() for s in stages.split(",") if s.strip()]


@click.group()
def main():
    """Decide whether modules admit connections."""


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--stages", default=None,
              help="comma separated subset of der,aclass,kskernel,lclass")
@click.option("--json", "json_path", default=None, type=click.Path(),
              help="write the machine-readable report to this path")
@click.option("--server", default=None, help="remote service URL")
def run(file, stages, json_path, server):
    """Run the obstruction pipeline on an input document."""
    with open(file, "r", encoding="utf-8") as fh:
        source = fh.read()
    client = ServiceClient(server)
    resp = client.post("/run", {
        "source": source,
        "stages": _parse_stages(stages),
        "include_witnesses": True,
    })
    if resp.status_code != 200:
        _fail_from_response(resp)
    body = resp.json()
    click.echo(body["table"])
    if body.get("derivations") is not None:
        click.echo("\nderivations of the base ring:")
        for coeffs in body["derivations"]:
            click.echo("  (" + ", ".join(coeffs) + ")")
    target = json_path
    if target is None:
        # the document itself may request an output path
        for line in source.splitlines():
            line = line.strip()
            if line.startswith("output "):
                target = line[len("output "):].rstrip(";").strip()
    if target:
        with open(target, "w", encoding="utf-8") as fh:
            json.dump(body, fh, indent=2)
        click.echo(f"report written to {target}")
    sys.exit(EXIT_OK)


@main.command()
@click.argument("pattern", required=False)
@click.option("--verify", is_flag=True,
              help="compare against expected verdicts; exit 1 on mismatch")
@click.option("--list", "list_only", is_flag=True, help="list entries only")
@click.option("--stages", default=None)
@click.option("--order", default="dp", help="monomial order: dp or lp")
@click.option("--json", "json_path", default=None, type=click.Path())
@click.option("--server", default=None, help="remote service URL")
def catalog(pattern, verify, list_only, stages, order, json_path, server):
    """List or run the built-in singularity/module catalog."""
    client = ServiceClient(server)
    if list_only:
        resp = client.get("/catalog")
        if resp.status_code != 200:
            _fail_from_response(resp)
        for entry in resp.json():
            names = ", ".join(m["name"] for m in entry["modules"])
            click.echo(f"{entry['id']}: {names}")
            if entry["description"]:
                click.echo(f"    {entry['description']}")
        sys.exit(EXIT_OK)
    resp = client.post("/catalog/run", {
        "pattern": pattern,
        "verify": verify,
        "stages": _parse_stages(stages),
        "order": order,
        "include_witnesses": False,
    })
    if resp.status_code != 200:
        _fail_from_response(resp)
    body = resp.json()
    for result in body["results"]:
        click.echo(result["table"])
        for miss in result["mismatches"]:
            click.echo(f"MISMATCH: {miss}", err=True)
        click.echo("")
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(body, fh, indent=2)
    if verify:
        if body["ok"]:
            click.echo("all expected verdicts reproduced")
        else:
            click.echo("verdict mismatches found", err=True)
            sys.exit(EXIT_MISMATCH)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--server", default=None, help="remote service URL")
def der(file, server):
    """Print generators of the derivation module of the input ring."""
    with open(file, "r", encoding="utf-8") as fh:
        source = fh.read()
    client = ServiceClient(server)
    resp = client.post("/der", {"source": source})
    if resp.status_code != 200:
        _fail_from_response(resp)
    body = resp.json()
    click.echo(body["ring"])
    for coeffs in body["generators"]:
        click.echo("(" + ", ".join(coeffs) + ")")
    sys.exit(EXIT_OK)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8431, type=int)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
