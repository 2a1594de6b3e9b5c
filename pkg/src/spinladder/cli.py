"""Command-line client for the simulation service.

By default commands talk to an in-process instance of the FastAPI app, so
no server needs to be running and run directories are written locally;
pass --server to target a remote instance instead.  Flags override values
from --config files, and every override of a conflicting file value is
noted in the run manifest.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__


def _make_client(server: str | None, runs_root: str):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=3600.0)
    from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(runs_root))


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    client = _make_client(ctx.obj["server"], ctx.obj["runs_root"])
    resp = client.post(path, json=payload)
    if resp.status_code == 422:
        click.echo("configuration rejected:", err=True)
        for err in resp.json().get("detail", []):
            loc = ".".join(str(p) for p in err.get("loc", []) if p != "body")
            click.echo(f"  {loc}: {err.get('msg')}", err=True)
        sys.exit(2)
    if resp.status_code >= 400:
        detail = resp.json().get("detail", resp.text)
        click.echo(f"error: {detail}", err=True)
        sys.exit(1)
    return resp.json()


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        config = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise click.UsageError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"config file is not valid JSON: {exc}")
    if not isinstance(config, dict):
        raise click.UsageError("config file must hold a JSON object")
    return config


def _merge(config: dict, overrides: dict[tuple[str, ...], object]) -> list[str]:
    """Apply flag overrides onto the file config; return conflict notes."""
    notes = []
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = config
        for key in dotted[:-1]:
            node = node.setdefault(key, {})
        leaf = dotted[-1]
        if leaf in node and node[leaf] != value:
            notes.append(
                f"flag override: {'.'.join(dotted)}={value!r} "
                f"(config file had {node[leaf]!r})"
            )
        node[leaf] = value
    return notes


def _print_run(data: dict) -> None:
    click.echo(f"run {data['run_id']} -> {data['run_dir']}")
    for note in data["manifest"].get("notes", []):
        click.echo(f"  note: {note}")
    click.echo(f"  {'series':<12} {'observable':<10} {'points':>7} {'final':>12}")
    for s in data["series"]:
        click.echo(
            f"  {s['label']:<12} {s['observable']:<10} {len(s['times']):>7} "
            f"{s['values'][-1]:>12.6f}"
        )
    for key, value in data.get("summary", {}).items():
        click.echo(f"  {key}: {value}")


def _model_overrides(m, boundary, j_s, j_e, j_se, alpha) -> dict:
    return {
        ("model", "m"): m,
        ("model", "boundary"): boundary,
        ("model", "j_s"): j_s,
        ("model", "j_e"): j_e,
        ("model", "j_se"): j_se,
        ("model", "alpha"): alpha,
    }


def _ensemble_overrides(ensemble, realizations, seed) -> dict:
    return {
        ("ensemble", "mode"): ensemble,
        ("ensemble", "n_realizations"): realizations,
        ("ensemble", "seed"): seed,
    }


def _evolution_overrides(method, dt, stride) -> dict:
    return {
        ("evolution", "method"): method,
        ("evolution", "dt"): dt,
        ("evolution", "sample_stride"): stride,
    }


geometry_options = [
    click.option("--m", type=int, default=None, help="spins per leg"),
    click.option("--ring", "boundary", flag_value="ring", default=None,
                 help="closed (ring) legs [default]"),
    click.option("--open", "boundary", flag_value="open", default=None,
                 help="open-chain legs"),
    click.option("--js", "j_s", type=float, default=None, help="system-leg coupling"),
    click.option("--je", "j_e", type=float, default=None, help="environment-leg coupling"),
]
model_options = geometry_options + [
    click.option("--jse", "j_se", type=float, default=None, help="interchain coupling"),
    click.option("--alpha", type=float, default=None, help="rung anisotropy"),
]
ensemble_options = [
    click.option("--ensemble", type=click.Choice(["exact_trace", "random_phase"]),
                 default=None),
    click.option("--realizations", type=int, default=None,
                 help="random-phase realizations"),
    click.option("--seed", type=int, default=None),
]
evolution_options = [
    click.option("--method", type=click.Choice(["exact", "trotter2", "trotter4"]),
                 default=None),
    click.option("--dt", type=float, default=None, help="Trotter step"),
    click.option("--stride", type=int, default=None, help="sample stride"),
]


def add_options(options):
    def wrap(f):
        for opt in reversed(options):
            f = opt(f)
        return f

    return wrap


@click.group()
@click.version_option(__version__)
@click.option("--server", default=None, metavar="URL",
              help="remote service URL (default: in-process)")
@click.option("--runs-root", default=None, metavar="DIR",
              help="run directory root (default: ./runs or $SPINLADDER_RUNS)")
@click.pass_context
def main(ctx: click.Context, server: str | None, runs_root: str | None):
    """Spin-ladder Loschmidt-echo simulator."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server
    ctx.obj["runs_root"] = runs_root


@main.command()
@add_options(model_options)
@add_options(ensemble_options)
@add_options(evolution_options)
@click.option("--tmax", type=float, default=None, help="last sample time")
@click.option("--points", type=int, default=None, help="number of samples")
@click.option("--spacing", type=click.Choice(["linear", "log"]), default=None)
@click.option("--config", "config_path", default=None, help="JSON config file")
@click.pass_context
def forward(ctx, m, boundary, j_s, j_e, j_se, alpha, ensemble, realizations,
            seed, method, dt, stride, tmax, points, spacing, config_path):
    """Forward polarization curve P11(t) under the full Hamiltonian."""
    config = _load_config_file(config_path)
    overrides = _model_overrides(m, boundary, j_s, j_e, j_se, alpha)
    overrides.update(_ensemble_overrides(ensemble, realizations, seed))
    overrides.update(_evolution_overrides(method, dt, stride))
    overrides.update({
        ("times", "t_max"): tmax,
        ("times", "n_points"): points,
        ("times", "spacing"): spacing,
    })
    notes = _merge(config, overrides)
    config["notes"] = config.get("notes", []) + notes
    _print_run(_post(ctx, "/api/runs/forward", config))


@main.command()
@add_options(model_options)
@add_options(ensemble_options)
@add_options(evolution_options)
@click.option("--tmax", type=float, default=None,
              help="last total evolution time 2*t_R")
@click.option("--tmin", type=float, default=None,
              help="first total time for log spacing")
@click.option("--points", type=int, default=None, help="schedule points")
@click.option("--spacing", type=click.Choice(["log", "linear"]), default=None)
@click.option("--config", "config_path", default=None, help="JSON config file")
@click.pass_context
def le(ctx, m, boundary, j_s, j_e, j_se, alpha, ensemble, realizations,
       seed, method, dt, stride, tmax, tmin, points, spacing, config_path):
    """Loschmidt echo M_LE(2 t_R) for a single coupling point."""
    config = _load_config_file(config_path)
    overrides = _model_overrides(m, boundary, j_s, j_e, j_se, alpha)
    overrides.update(_ensemble_overrides(ensemble, realizations, seed))
    overrides.update(_evolution_overrides(method, dt, stride))
    overrides.update({
        ("schedule", "t_r_max"): None if tmax is None else tmax / 2.0,
        ("schedule", "t_r_min"): None if tmin is None else tmin / 2.0,
        ("schedule", "n_points"): points,
        ("schedule", "spacing"): spacing,
    })
    notes = _merge(config, overrides)
    config["notes"] = config.get("notes", []) + notes
    _print_run(_post(ctx, "/api/runs/le", config))


@main.command()
@add_options(geometry_options)
@add_options(ensemble_options)
@add_options(evolution_options)
@click.option("--alphas", default=None, help="comma-separated anisotropies")
@click.option("--jse", "jse_list", default=None,
              help="comma-separated interchain couplings")
@click.option("--tmax", type=float, default=None, help="last total time 2*t_R")
@click.option("--tmin", type=float, default=None)
@click.option("--points", type=int, default=None)
@click.option("--spacing", type=click.Choice(["log", "linear"]), default=None)
@click.option("--workers", type=int, default=None, help="parallel sweep points")
@click.option("--config", "config_path", default=None)
@click.pass_context
def sweep(ctx, m, boundary, j_s, j_e, ensemble, realizations,
          seed, method, dt, stride, alphas, jse_list, tmax, tmin, points,
          spacing, workers, config_path):
    """Echo curves over an (alpha, J_SE) grid, one CSV per point."""
    config = _load_config_file(config_path)
    overrides = _model_overrides(m, boundary, j_s, j_e, None, None)
    overrides.update(_ensemble_overrides(ensemble, realizations, seed))
    overrides.update(_evolution_overrides(method, dt, stride))
    overrides.update({
        ("schedule", "t_r_max"): None if tmax is None else tmax / 2.0,
        ("schedule", "t_r_min"): None if tmin is None else tmin / 2.0,
        ("schedule", "n_points"): points,
        ("schedule", "spacing"): spacing,
        ("workers",): workers,
    })
    if alphas is not None:
        overrides[("alphas",)] = [float(x) for x in alphas.split(",")]
    if jse_list is not None:
        overrides[("j_se_values",)] = [float(x) for x in jse_list.split(",")]
    notes = _merge(config, overrides)
    config["notes"] = config.get("notes", []) + notes
    _print_run(_post(ctx, "/api/runs/sweep", config))


@main.command()
@click.option("--jse", "j_se", type=float, default=None, help="contact coupling")
@click.option("--je", "j_e", type=float, default=None, help="chain coupling")
@click.option("--length", "chain_length", type=int, default=None, help="chain sites")
@click.option("--tmax", type=float, default=None)
@click.option("--points", "n_points", type=int, default=None)
@click.option("--config", "config_path", default=None)
@click.pass_context
def sp(ctx, j_se, j_e, chain_length, tmax, n_points, config_path):
    """Survival probability of an edge excitation on a long chain."""
    config = _load_config_file(config_path)
    notes = _merge(config, {
        ("j_se",): j_se, ("j_e",): j_e, ("chain_length",): chain_length,
        ("t_max",): tmax, ("n_points",): n_points,
    })
    config["notes"] = config.get("notes", []) + notes
    _print_run(_post(ctx, "/api/runs/sp", config))


@main.command()
@click.option("--m", type=int, default=None, help="chain sites")
@click.option("--ring/--chain", "ring", default=None)
@click.option("--j", type=float, default=None, help="leg coupling")
@click.option("--disorder", type=float, default=None,
              help="binary site-energy amplitude alpha*J_SE")
@click.option("--realizations", "n_disorder", type=int, default=None,
              help="disorder draws (exhaustive when omitted)")
@click.option("--seed", type=int, default=None)
@click.option("--tmax", type=float, default=None)
@click.option("--points", "n_points", type=int, default=None)
@click.option("--config", "config_path", default=None)
@click.pass_context
def onebody(ctx, m, ring, j, disorder, n_disorder, seed, tmax, n_points,
            config_path):
    """One-body return probability or quenched-disorder echo."""
    config = _load_config_file(config_path)
    notes = _merge(config, {
        ("m",): m, ("ring",): ring, ("j",): j, ("disorder",): disorder,
        ("n_disorder",): n_disorder, ("seed",): seed,
        ("t_max",): tmax, ("n_points",): n_points,
    })
    config["notes"] = config.get("notes", []) + notes
    _print_run(_post(ctx, "/api/runs/onebody", config))


@main.command()
@click.option("--run", required=True, help="run id or run directory")
@click.option("--onset", type=float, default=None)
@click.option("--guard", "plateau_guard", type=float, default=None)
@click.option("--entry-level", type=float, default=None)
@click.option("--plateau", type=float, default=None)
@click.option("--t-cut", type=float, default=None)
@click.pass_context
def fit(ctx, run, onset, plateau_guard, entry_level, plateau, t_cut):
    """Regime fits and channel decomposition of a finished run."""
    payload: dict = {"run": run}
    for key, value in [
        ("onset", onset), ("plateau_guard", plateau_guard),
        ("entry_level", entry_level), ("plateau", plateau), ("t_cut", t_cut),
    ]:
        if value is not None:
            payload[key] = value
    data = _post(ctx, "/api/fit", payload)
    report = data["report"]
    click.echo(f"fit report for run {data['run_id']} "
               f"(plateau: {report['plateau_source']})")
    header = f"  {'series':<12} {'sigma2':>12} {'rate':>12} {'rate_err':>10} {'window':>16}"
    click.echo(header)
    for label, entry in sorted(report["series"].items()):
        sigma2 = entry.get("sigma2")
        rate = entry.get("rate")
        win = entry.get("fit_window")
        s_sigma = f"{sigma2:.4e}" if sigma2 is not None else "-"
        s_rate = f"{rate:.4e}" if rate is not None else "-"
        s_err = f"{entry.get('rate_err'):.1e}" if rate is not None else "-"
        s_win = f"[{win[0]:.1f},{win[1]:.1f}]" if win else entry.get("rate_error", "-")
        click.echo(f"  {label:<12} {s_sigma:>12} {s_rate:>12} {s_err:>10} {s_win:>16}")
    decomposition = report.get("decomposition")
    if decomposition and "error" not in decomposition:
        click.echo(
            f"  XY channel: {decomposition['slope_xy']:.3f} "
            f"+- {decomposition['slope_xy_err']:.3f}  "
            f"(echo-attenuation benchmark {decomposition['meso_echo_comparison']['xy'][0]} "
            f"+- {decomposition['meso_echo_comparison']['xy'][1]})"
        )
        click.echo(
            f"  ZZ channel: {decomposition['slope_zz']:.3f} "
            f"+- {decomposition['slope_zz_err']:.3f}  "
            f"(echo-attenuation benchmark {decomposition['meso_echo_comparison']['zz'][0]} "
            f"+- {decomposition['meso_echo_comparison']['zz'][1]})"
        )
        click.echo(f"  alpha^2 additivity R^2: {decomposition['alpha_fit_r2']:.4f}")
    elif decomposition:
        click.echo(f"  decomposition: {decomposition['error']}")


@main.command()
@click.pass_context
def verify(ctx):
    """Run the oracle cross-checks; nonzero exit on any failure."""
    data = _post(ctx, "/api/verify", {})
    for check in data["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"{status}  {check['name']}: {check['measured']:.3e} "
                   f"(bound {check['bound']})")
    if not data["passed"]:
        sys.exit(1)
    click.echo("all checks passed")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.pass_context
def serve(ctx, host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(ctx.obj["runs_root"]), host=host, port=port)


if __name__ == "__main__":
    main()
