"""Thin command-line client for the gatesim service.

By default the CLI talks to an in-process instance of the service (no network
involved); point it at a running server with ``--server http://host:port`` to
offload the computation.  The client owns all file I/O: scenario CSVs and
manifests are written locally from the service response.

Exit codes: 0 success, 2 configuration error, 3 completed with flagged
diagnostics (outputs are still written).
"""

from __future__ import annotations

import json
import math
import os
import sys
from pathlib import Path

import click

from . import __version__

EXIT_CONFIG = 2
EXIT_FLAGGED = 3


class ServiceClient:
    """HTTP-shaped access to the service, in-process or remote."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DeprecationWarning)
                from fastapi.testclient import TestClient

                from .service import create_app

                self._client = TestClient(create_app())

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code == 422:
            detail = resp.json().get("detail", resp.text)
            raise ConfigFailure(str(detail))
        resp.raise_for_status()
        return resp.json()

    def get(self, path: str) -> dict:
        resp = self._client.get(path)
        resp.raise_for_status()
        return resp.json()


class ConfigFailure(Exception):
    pass


def _resolve_out(out: str | None) -> Path:
    env = os.environ.get("GATESIM_OUT")
    return Path(env) if env else Path(out or "gatesim-out")


def _parse_range(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(":")
        return float(a), float(b), int(n)
    except ValueError:
        raise ConfigFailure(f"range must look like lo:hi:count, got {text!r}") from None


def _print_warnings(warnings: list[str]):
    for w in warnings:
        click.echo(f"warning: {w}", err=True)


@click.group()
@click.version_option(__version__)
@click.option("--server", default=None, envvar="GATESIM_SERVER",
              help="Base URL of a running gatesim service (default: in-process).")
@click.pass_context
def main(ctx: click.Context, server: str | None):
    """Design and simulate squeezed-cavity qutrit phase gates."""
    ctx.obj = {"server": server}


def _client(ctx: click.Context) -> ServiceClient:
    return ServiceClient(ctx.obj.get("server"))


@main.command()
@click.option("--variant", type=click.Choice(["unshaped", "shaped"]), default="unshaped")
@click.option("--k1", default=1, show_default=True)
@click.option("--k2", default=0, show_default=True)
@click.option("--k3", default=0, show_default=True)
@click.option("-k", "--order", default=1, show_default=True, help="Shaped-gate order.")
@click.option("--phi", default=math.pi, show_default="pi", help="Target phase (rad).")
@click.option("--r-p", default=2.5, show_default=True, help="Squeeze parameter.")
@click.option("--g-m", default=1.0, show_default=True, help="Coupling amplitude (natural).")
@click.option("--units", type=click.Choice(["natural", "physical"]), default="natural")
@click.option("--g-m-mhz", default=50.0, show_default=True,
              help="g_m/2pi in MHz (physical units anchor).")
@click.pass_context
def solve(ctx, variant, k1, k2, k3, order, phi, r_p, g_m, units, g_m_mhz):
    """Solve a gate design and print its parameter table."""
    payload = {
        "variant": variant, "k1": k1, "k2": k2, "k3": k3, "order": order,
        "phi": phi, "r_p": r_p, "g_m": g_m, "units": units, "g_m_mhz": g_m_mhz,
    }
    try:
        data = _client(ctx).post("/api/solve", payload)
    except ConfigFailure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    design = data["design"]
    physical = design.pop("physical", None)
    width = max(len(k) for k in design)
    for key, val in design.items():
        click.echo(f"{key:<{width}}  {val}")
    if physical:
        click.echo("-- physical --")
        for key, val in physical.items():
            click.echo(f"{key:<{width}}  {val:.6g}")
    _print_warnings(data["warnings"])


def _scenario_config(scenario, config_path, units, g_m_mhz, fock, kappa, gamma, workers):
    cfg: dict = {}
    if config_path:
        cfg = json.loads(Path(config_path).read_text())
    if scenario:
        cfg["scenario"] = scenario
    if "scenario" not in cfg:
        raise ConfigFailure("pass --scenario or a --config file with a scenario key")
    if units is not None:
        cfg["units"] = units
    if g_m_mhz is not None:
        cfg["g_m_mhz"] = g_m_mhz
    if fock is not None:
        cfg["n_fock"] = fock
    if kappa is not None:
        cfg["kappa"] = kappa
    if gamma is not None:
        cfg["gamma"] = gamma
    if workers is not None:
        cfg["workers"] = workers
    return cfg


@main.command()
@click.option("--scenario", default=None, help="Scenario id (fig2, fig3a, ... , sweep).")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON scenario config (strict keys).")
@click.option("--out", default=None, help="Output directory (GATESIM_OUT overrides).")
@click.option("--units", type=click.Choice(["natural", "physical"]), default=None)
@click.option("--g-m-mhz", type=float, default=None)
@click.option("--fock", type=int, default=None, help="Fock cutoff override.")
@click.option("--kappa", type=float, default=None, help="Cavity decay rate (g_m units).")
@click.option("--gamma", type=float, default=None, help="Qutrit relaxation rate (g_m units).")
@click.option("--workers", type=int, default=None, help="Sweep worker processes.")
@click.pass_context
def run(ctx, scenario, config_path, out, units, g_m_mhz, fock, kappa, gamma, workers):
    """Run a scenario and write <scenario>.csv and <scenario>.manifest.json."""
    try:
        cfg = _scenario_config(scenario, config_path, units, g_m_mhz, fock, kappa, gamma, workers)
        data = _client(ctx).post("/api/run", {"config": cfg})
    except ConfigFailure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    _write_and_report(data, out)


def _write_and_report(data: dict, out: str | None):
    out_dir = _resolve_out(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = data["scenario"]
    csv_path = out_dir / f"{name}.csv"
    manifest_path = out_dir / f"{name}.manifest.json"
    csv_path.write_text(data["csv"])
    manifest_path.write_text(json.dumps(data["manifest"], indent=2, sort_keys=True) + "\n")
    click.echo(f"wrote {csv_path}")
    click.echo(f"wrote {manifest_path}")
    _print_warnings(data["warnings"])
    if data["flagged"]:
        for flag in data["manifest"]["diagnostics"]["flags"]:
            click.echo(f"flag: {flag}", err=True)
        sys.exit(EXIT_FLAGGED)


@main.command()
@click.option("--param", required=True,
              type=click.Choice(["tau", "delta", "omega", "g_m", "kappa", "gamma"]))
@click.option("--range", "range_", required=True, help="Grid as lo:hi:count.")
@click.option("--gate", default=None,
              help='Gate spec as JSON, e.g. {"variant":"shaped","order":1,"r_p":3.28}.')
@click.option("--out", default=None)
@click.option("--fock", type=int, default=15, show_default=True)
@click.option("--workers", type=int, default=None)
@click.pass_context
def sweep(ctx, param, range_, gate, out, fock, workers):
    """Sweep one parameter of a gate and record the fidelity per grid point."""
    try:
        lo, hi, count = _parse_range(range_)
        payload = {
            "param": param, "lo": lo, "hi": hi, "count": count,
            "gate": json.loads(gate) if gate else None,
            "n_fock": fock, "workers": workers,
        }
        data = _client(ctx).post("/api/sweep", payload)
    except ConfigFailure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    _write_and_report(data, out)


@main.command()
@click.option("--scenario", required=True)
@click.option("--refinement", default=2, show_default=True)
@click.option("--fock/--no-fock", "fock_doubling", default=True,
              help="Also compare fidelity after doubling the Fock cutoff.")
@click.option("--fock-base", type=int, default=None, help="Fock cutoff override.")
@click.pass_context
def convergence(ctx, scenario, refinement, fock_doubling, fock_base):
    """Step-halving and Fock-doubling convergence report for a scenario."""
    cfg = {"scenario": scenario}
    if fock_base is not None:
        cfg["n_fock"] = fock_base
    try:
        data = _client(ctx).post(
            "/api/convergence",
            {"config": cfg, "refinement": refinement, "fock_doubling": fock_doubling},
        )
    except ConfigFailure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    for key, val in data["report"].items():
        click.echo(f"{key}: {val}")
    if data["flagged"]:
        sys.exit(EXIT_FLAGGED)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the gatesim service with uvicorn."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
