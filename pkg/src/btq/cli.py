"""Thin command-line client for the experiment service.

By default the CLI speaks to the FastAPI app in-process over the ASGI
transport, so no server is needed; pass --server to target a running
instance instead.  Configuration comes from a flat key=value file, with
every key overridable by a flag of the same name.
"""

from __future__ import annotations

import asyncio
import csv
import sys
from pathlib import Path

import click
import httpx

from .models import ExperimentConfig

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2


def _call(server: str | None, method: str, path: str, payload=None):
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.request(method, path, json=payload)
    else:
        from .service import app

        async def go():
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://btq.local",
                                         timeout=600.0) as client:
                return await client.request(method, path, json=payload)

        resp = asyncio.run(go())
    if resp.status_code >= 400:
        raise click.ClickException(f"{resp.status_code}: {resp.text}")
    return resp.json()


def _load_config_file(path: str) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.ClickException(f"bad config line: {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


_FIELD_TYPES = {"N": int, "samples": int, "seed": int, "cutoff": int,
                "jobs": int, "h0": float, "ratio": float, "count": int,
                "strict": lambda s: s.lower() in ("1", "true", "yes"),
                "out": str}


def _build_config(config_file, **flags) -> ExperimentConfig:
    base = ExperimentConfig()
    merged = {}
    if config_file:
        for key, raw in _load_config_file(config_file).items():
            if key not in _FIELD_TYPES:
                raise click.ClickException(f"unknown config key: {key}")
            merged[key] = _FIELD_TYPES[key](raw)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return base.override(**merged)


def _result_verdict_code(verdicts) -> int:
    if any(v == "fail" for v in verdicts):
        return EXIT_FAIL
    if any(v == "inconclusive" for v in verdicts):
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def _write_result(data: dict, out: str):
    from .models import ExperimentResult
    result = ExperimentResult(**data)
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(result.canonical_json() + "\n")
    _maybe_write_csv(result, path)


def _maybe_write_csv(result, json_path: Path):
    """Emit h-sweep rows (h, entry, re, im) alongside the JSON when the
    experiment produced per-h matrix sweeps."""
    sweeps = result.values.get("sweeps")
    rows = []
    if sweeps:
        for trial, blob in sorted(sweeps.items()):
            for h, mat in blob.get("sweep", []):
                for i, row in enumerate(mat):
                    for j, (re, im) in enumerate(row):
                        rows.append([h, f"{trial}[{i}][{j}]", re, im])
    half = result.values.get("half_power_entry")
    if half:
        for h, (re, im) in half:
            rows.append([h, "offdiag[0][1]", re, im])
    if not rows:
        return
    with open(json_path.with_suffix(".csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "entry", "re", "im"])
        writer.writerows(rows)


def _print_result(data: dict):
    click.echo(f"{data['experiment']}: {data['verdict']}")
    for a in data["assertions"]:
        mark = {"pass": "ok", "fail": "FAIL", "inconclusive": "??"}[a["status"]]
        click.echo(f"  [{mark}] {a['name']}")
        if a.get("detail"):
            click.echo(f"        {a['detail']}")
    mismatch = data.get("values", {}).get("display_mismatch")
    if mismatch:
        for key, note in mismatch.items():
            if isinstance(note, str):
                click.echo(f"  note ({key}): {note}")


@click.group()
def main():
    """Experiment runner for the matrix-domain quantization toolkit."""


@main.command("list")
@click.option("--server", default=None, help="URL of a running service")
def list_cmd(server):
    """Print the experiment registry."""
    for entry in _call(server, "GET", "/experiments"):
        click.echo(f"{entry['id']:18s} {entry['summary']}")


def _common_options(fn):
    for args, kwargs in [
        (("--N", "n_dim"), {"type": int, "default": None}),
        (("--h0",), {"type": float, "default": None}),
        (("--ratio",), {"type": float, "default": None}),
        (("--count",), {"type": int, "default": None}),
        (("--samples",), {"type": int, "default": None}),
        (("--seed",), {"type": int, "default": None}),
        (("--cutoff",), {"type": int, "default": None}),
        (("--strict/--no-strict",), {"default": None}),
        (("--jobs",), {"type": int, "default": None}),
        (("--config", "config_file"), {"type": click.Path(exists=True),
                                       "default": None}),
        (("--out",), {"type": str, "default": None}),
        (("--server",), {"default": None}),
    ]:
        fn = click.option(*args, **kwargs)(fn)
    return fn


@main.command("run")
@click.argument("experiment_id")
@_common_options
def run_cmd(experiment_id, n_dim, h0, ratio, count, samples, seed, cutoff,
            strict, jobs, config_file, out, server):
    """Run one experiment and print its verdict."""
    cfg = _build_config(config_file, N=n_dim, h0=h0, ratio=ratio, count=count,
                        samples=samples, seed=seed, cutoff=cutoff,
                        strict=strict, jobs=jobs, out=out)
    data = _call(server, "POST", f"/experiments/{experiment_id}/run",
                 cfg.model_dump())
    _print_result(data)
    if out:
        _write_result(data, out)
        click.echo(f"wrote {out}")
    sys.exit(_result_verdict_code([data["verdict"]]))


@main.command("run-all")
@click.option("--out-dir", type=str, default=None)
@_common_options
def run_all_cmd(out_dir, n_dim, h0, ratio, count, samples, seed, cutoff,
                strict, jobs, config_file, out, server):
    """Run the whole registry and summarize."""
    cfg = _build_config(config_file, N=n_dim, h0=h0, ratio=ratio, count=count,
                        samples=samples, seed=seed, cutoff=cutoff,
                        strict=strict, out=out)
    payload = {"config": cfg.model_dump(), "jobs": jobs or 1}
    results = _call(server, "POST", "/experiments/run-all", payload)
    verdicts = []
    for data in results:
        _print_result(data)
        verdicts.append(data["verdict"])
        if out_dir:
            _write_result(data, str(Path(out_dir) / f"{data['experiment']}.json"))
    counts = {v: verdicts.count(v) for v in ("pass", "fail", "inconclusive")}
    click.echo(f"summary: {counts['pass']} pass, {counts['fail']} fail, "
               f"{counts['inconclusive']} inconclusive")
    sys.exit(_result_verdict_code(verdicts))


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve_cmd(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("btq.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
