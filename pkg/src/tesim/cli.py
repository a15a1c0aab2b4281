"""Command-line client for the simulation service.

The CLI never touches the core directly: it talks to the HTTP service,
by default an in-process instance (no socket, nothing to start), or a
remote one via --server. It owns all filesystem output — the service
only ever returns text payloads — so runs are reproducible wherever the
client writes them.

Exit codes: 0 success, 2 invalid config or input data, 1 anything else.
"""

from __future__ import annotations

import json
import os
import sys

import click


def _client(server: str | None):
    if server is None:
        from fastapi.testclient import TestClient

        from .service import create_app

        return TestClient(create_app())
    import httpx

    return httpx.Client(base_url=server, timeout=None)


def _read_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    return {"config": text, "base_dir": os.path.dirname(os.path.abspath(path))}


def _post(client, url: str, payload: dict) -> dict:
    response = client.post(url, json=payload)
    if response.status_code == 200:
        return response.json()
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        detail = response.text
    if not isinstance(detail, str):
        detail = json.dumps(detail)
    click.echo(f"error: {detail}", err=True)
    sys.exit(2 if response.status_code == 422 else 1)


@click.group()
@click.option(
    "--server",
    default=None,
    metavar="URL",
    help="Base URL of a running service; omit to run in process.",
)
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Traffic-engineering simulation over path selection + rate adaptation."""
    ctx.obj = server


@main.command()
@click.argument("config", type=click.Path())
@click.pass_context
def validate(ctx: click.Context, config: str) -> None:
    """Check a config file and print the fully resolved settings."""
    body = _post(_client(ctx.obj), "/config/validate", _read_config(config))
    click.echo(json.dumps(body["resolved"], indent=2, sort_keys=True))
    click.echo(f"config_hash: {body['config_hash']}")


@main.command()
@click.argument("config", type=click.Path())
@click.option("--out", default=None, metavar="DIR", help="Output directory (default: paths_out).")
@click.option("--seed", default=None, type=int, help="Override demand and tree seeds.")
@click.pass_context
def paths(ctx: click.Context, config: str, out: str | None, seed: int | None) -> None:
    """Compute the admissible path sets of the configured systems."""
    payload = _read_config(config)
    if seed is not None:
        payload["seed"] = seed
    body = _post(_client(ctx.obj), "/paths", payload)
    out_dir = out or "paths_out"
    os.makedirs(out_dir, exist_ok=True)
    for doc in body["path_sets"]:
        path = os.path.join(out_dir, f"{doc['name']}.json")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            json.dump(doc["document"], fh, indent=2, sort_keys=True)
            fh.write("\n")
        click.echo(f"wrote {path}")


@main.command()
@click.argument("config", type=click.Path())
@click.option("--out", default=None, metavar="DIR", help="Output directory (default: from config).")
@click.option("--seed", default=None, type=int, help="Override demand and tree seeds.")
@click.option("--systems", default=None, metavar="A,B", help="Run only these configured systems.")
@click.option("--quiet", is_flag=True, help="Suppress the per-system summary.")
@click.pass_context
def run(
    ctx: click.Context,
    config: str,
    out: str | None,
    seed: int | None,
    systems: str | None,
    quiet: bool,
) -> None:
    """Run the experiment and write the result CSVs and manifest."""
    payload = _read_config(config)
    if seed is not None:
        payload["seed"] = seed
    if systems is not None:
        payload["systems"] = [s.strip() for s in systems.split(",") if s.strip()]
    body = _post(_client(ctx.obj), "/run", payload)
    out_dir = out or body["manifest"]["resolved_config"]["run"]["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name in sorted(body["csvs"]):
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(body["csvs"][name])
        written.append(path)
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(body["manifest"], fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(manifest_path)
    if not quiet:
        for label, info in sorted(body["manifest"]["systems"].items()):
            status = info["failure"] if info["status"] == "failed" else "ok"
            click.echo(f"{label}: {status} ({info['steps_completed']} steps)")
    for path in written:
        click.echo(f"wrote {path}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
