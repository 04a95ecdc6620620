"""Thin command-line client of the benchmark service.

Every subcommand parses its config locally, then talks to the service
over HTTP: a remote instance when ``--server`` is given, otherwise an
in-process instance of the same app (no network, no daemon).  All
computation happens behind the service boundary; the client only reads
config/dataset files and writes the returned payloads.

Exit codes: 0 success, 1 configuration error, 2 every seed diverged.
"""

from __future__ import annotations

import dataclasses
import json
import sys

import click

from .experiments import ExperimentConfig, parse_config

EXIT_CONFIG_ERROR = 1
EXIT_ALL_DIVERGED = 2


def _fail(message: str, code: int = EXIT_CONFIG_ERROR):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        # starlette's in-process test client import warns (custom category)
        # about its httpx pinning; harmless for this use, not actionable here
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _post(server: str | None, path: str, payload: dict) -> dict:
    with _client(server) as client:
        response = client.post(path, json=payload)
    if response.status_code in (400, 422):
        detail = response.json().get("detail", response.text)
        _fail(str(detail))
    if response.status_code != 200:
        _fail(f"service error {response.status_code}: {response.text}")
    return response.json()


def _load_config(path: str, seed_list: str | None, rescale: bool) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = parse_config(fh.read())
        if seed_list is not None:
            seeds = [int(part) for part in seed_list.split(",") if part.strip()]
            config = dataclasses.replace(config, seeds=seeds)
        if rescale:
            config = dataclasses.replace(config, rescale_columns=True)
        return config.validate()
    except (OSError, ValueError) as exc:
        _fail(str(exc))


def _inline_dataset(config: ExperimentConfig) -> str | None:
    if config.dataset == "synthetic":
        return None
    try:
        with open(config.dataset, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        _fail(str(exc))


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    click.echo(f"wrote {path}")


def _config_payload(config: ExperimentConfig) -> dict:
    return dataclasses.asdict(config)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Remote service URL (default: run the service in-process).")
@click.pass_context
def main(ctx, server):
    """Benchmark client for differentially private sketched coordinate descent."""
    ctx.obj = server


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--out", "out", required=True, metavar="PATH",
              help="Output prefix: writes PATH.csv and PATH.constants.json.")
@click.pass_obj
def gen(server, config_path, out):
    """Generate a synthetic dataset CSV plus its ground-truth constants."""
    config = _load_config(config_path, None, False)
    result = _post(server, "/gen", {"config": _config_payload(config)})
    _write(out + ".csv", result["dataset_csv"])
    _write(out + ".constants.json", json.dumps(result["constants"], sort_keys=True, indent=2) + "\n")


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--out", "out", default=None, metavar="PATH",
              help="Also write the table to PATH.csv.")
@click.pass_obj
def calibrate(server, config_path, out):
    """Print the per-subset noise table (subset, L_U, sigma_U^2) as CSV."""
    config = _load_config(config_path, None, False)
    payload = {"config": _config_payload(config), "dataset_csv": _inline_dataset(config)}
    result = _post(server, "/calibrate", payload)
    click.echo(result["table_csv"], nl=False)
    click.echo(
        f"# audited_epsilon={result['audited_epsilon']!r} "
        f"outer_t={result['outer_t']} inner_k={result['inner_k']}"
    )
    if out is not None:
        _write(out + ".csv", result["table_csv"])


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--out", "out", default=None, metavar="PATH",
              help="Output prefix (default: the config's out field).")
@click.option("--seed-list", default=None, metavar="S1,S2,...",
              help="Override the config's seeds.")
@click.option("--rescale-columns", is_flag=True, default=False,
              help="Rescale each feature column to max |x|=1 before computing constants.")
@click.pass_obj
def run(server, config_path, out, seed_list, rescale_columns):
    """Run the configured experiment over all seeds; write CSV and JSON reports."""
    config = _load_config(config_path, seed_list, rescale_columns)
    payload = {"config": _config_payload(config), "dataset_csv": _inline_dataset(config)}
    result = _post(server, "/run", payload)
    prefix = out if out is not None else config.out
    _write(prefix + ".csv", result["results_csv"])
    _write(prefix + ".json", json.dumps(result["summary"], sort_keys=True, indent=2) + "\n")
    if result["all_diverged"]:
        _fail("every seed diverged", EXIT_ALL_DIVERGED)


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--out", "out", default=None, metavar="PATH")
@click.option("--seed-list", default=None, metavar="S1,S2,...")
@click.option("--rescale-columns", is_flag=True, default=False)
@click.option("--methods", default=None, metavar="M1,M2,...",
              help="Override the config's method list.")
@click.pass_obj
def compare(server, config_path, out, seed_list, rescale_columns, methods):
    """Run each method at matched privacy on the same data; write the ratio table."""
    config = _load_config(config_path, seed_list, rescale_columns)
    method_list = (
        [part.strip() for part in methods.split(",") if part.strip()]
        if methods is not None
        else None
    )
    payload = {
        "config": _config_payload(config),
        "methods": method_list,
        "dataset_csv": _inline_dataset(config),
    }
    result = _post(server, "/compare", payload)
    prefix = out if out is not None else config.out
    _write(prefix + ".csv", result["results_csv"])
    _write(prefix + ".json", json.dumps(result["summary"], sort_keys=True, indent=2) + "\n")
    medians = result["summary"]["medians"]
    for method in sorted(medians):
        click.echo(f"{method}: median final suboptimality {medians[method]!r}")
    if result["all_diverged"]:
        _fail("every seed diverged", EXIT_ALL_DIVERGED)


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH")
@click.option("--row", default=None, help="Bound row (default: follows the distribution).")
@click.option("--regime", default=None, type=click.Choice(["convex", "strongly-convex"]),
              help="Bound regime (default: follows the schedule mode).")
@click.pass_obj
def bound(server, config_path, row, regime):
    """Evaluate a utility-bound row with constants from the config's problem."""
    config = _load_config(config_path, None, False)
    payload = {
        "config": _config_payload(config),
        "row": row,
        "regime": regime,
        "dataset_csv": _inline_dataset(config),
    }
    result = _post(server, "/bound", payload)
    click.echo(json.dumps(result, sort_keys=True))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service (the one subcommand that is not a client)."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
