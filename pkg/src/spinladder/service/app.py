"""FastAPI service wrapping the simulator.

Every experiment endpoint executes synchronously, persists a run
directory (manifest + CSV series) under the configured runs root, and
returns the manifest together with the series payloads.  The fit endpoint
consumes a previously written run directory and adds report.json and a
flat rates.csv to it.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .. import __version__
from ..analysis import characterize_series, fgr_decompose
from ..ensemble import TimeSeries
from ..onebody import HoppingMatrix, detect_meso_echo, onebody_return, quenched_le
from ..protocols import forward_p11, le_sweep, loschmidt_echo, sp_paradigm
from ..runio import RunManifest, load_run, write_run
from ..verify import run_verification
from .schemas import (
    FitRequest,
    FitResponse,
    ForwardRequest,
    HealthResponse,
    LeRequest,
    OnebodyRequest,
    RunResponse,
    SeriesPayload,
    SpRequest,
    SweepRequest,
    VerifyCheck,
    VerifyResponse,
)

DEFAULT_RUNS_ROOT = "runs"


def _payloads(series: dict[str, TimeSeries]) -> list[SeriesPayload]:
    return [
        SeriesPayload(
            label=label,
            observable=s.observable,
            times=[float(t) for t in s.times],
            values=[float(v) for v in s.values],
            meta={k: v for k, v in s.meta.items()},
        )
        for label, s in series.items()
    ]


def _weak_coupling_notes(model) -> list[str]:
    if model.j_e != 0.0 and abs(model.j_se) > abs(model.j_e):
        return [
            f"j_se={model.j_se} exceeds j_e={model.j_e}: outside the "
            "weak-coupling regime"
        ]
    return []


def create_app(runs_root: str | Path | None = None) -> FastAPI:
    root = Path(runs_root or os.environ.get("SPINLADDER_RUNS", DEFAULT_RUNS_ROOT))
    app = FastAPI(title="spinladder", version=__version__)
    app.state.runs_root = root

    def persist(
        kind: str, config: dict, series: dict[str, TimeSeries],
        notes: list[str], seed: int | None, summary: dict | None = None,
    ) -> RunResponse:
        manifest = RunManifest.from_config(
            {"experiment": kind, **config}, seed=seed, notes=notes
        )
        run_dir = write_run(root, manifest, series)
        return RunResponse(
            run_id=manifest.run_id,
            run_dir=str(run_dir),
            manifest=manifest.as_dict(),
            series=_payloads(series),
            summary=summary or {},
        )

    @app.get("/api/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/api/runs/forward", response_model=RunResponse)
    def run_forward(req: ForwardRequest) -> RunResponse:
        series = forward_p11(
            req.model.spec(),
            req.model.couplings(),
            req.ensemble.to_spec(),
            req.evolution.to_config(),
            req.times.times(),
        )
        notes = req.notes + _weak_coupling_notes(req.model)
        return persist(
            "forward",
            req.model_dump(exclude={"notes"}),
            {"p11": series},
            notes,
            req.ensemble.seed,
            {"final_value": float(series.values[-1])},
        )

    @app.post("/api/runs/le", response_model=RunResponse)
    def run_le(req: LeRequest) -> RunResponse:
        series = loschmidt_echo(
            req.model.spec(),
            req.model.couplings(),
            req.ensemble.to_spec(),
            req.schedule.to_schedule(),
            req.evolution.to_config(),
        )
        notes = req.notes + _weak_coupling_notes(req.model)
        return persist(
            "le",
            req.model_dump(exclude={"notes"}),
            {"mle": series},
            notes,
            req.ensemble.seed,
            {"final_value": float(series.values[-1])},
        )

    @app.post("/api/runs/sweep", response_model=RunResponse)
    def run_sweep(req: SweepRequest) -> RunResponse:
        points = le_sweep(
            req.model.spec(),
            req.model.couplings(),
            req.alphas,
            req.j_se_values,
            req.ensemble.to_spec(),
            req.schedule.to_schedule(),
            req.evolution.to_config(),
            workers=req.workers,
        )
        series: dict[str, TimeSeries] = {}
        grid, failures = [], []
        for k, p in enumerate(points):
            label = f"point{k:03d}"
            grid.append({"label": label, "alpha": p.alpha, "j_se": p.j_se})
            if p.series is not None:
                series[label] = p.series
            else:
                failures.append(f"{label} (alpha={p.alpha}, j_se={p.j_se}): {p.error}")
        config = req.model_dump(exclude={"notes", "workers"})
        config["grid"] = grid
        notes = req.notes + [f"failed: {f}" for f in failures]
        return persist(
            "sweep",
            config,
            series,
            notes,
            req.ensemble.seed,
            {"points": len(points), "failures": len(failures)},
        )

    @app.post("/api/runs/sp", response_model=RunResponse)
    def run_sp(req: SpRequest) -> RunResponse:
        series = sp_paradigm(
            req.j_se,
            req.j_e,
            req.chain_length,
            t_max=req.t_max,
            n_points=req.n_points,
        )
        return persist(
            "sp", req.model_dump(exclude={"notes"}), {"sp": series}, req.notes, None
        )

    @app.post("/api/runs/onebody", response_model=RunResponse)
    def run_onebody(req: OnebodyRequest) -> RunResponse:
        times = np.linspace(0.0, req.t_max, req.n_points)
        summary: dict = {}
        if req.disorder == 0.0:
            h = HoppingMatrix.uniform(req.m, req.j, ring=req.ring)
            series = onebody_return(h, times)
            echo = detect_meso_echo(series, h)
            label = "return"
            summary = {
                "echo_found": echo.found,
                "t_peak": echo.t_peak,
                "peak_value": echo.peak_value,
                "t_heisenberg_estimate": echo.t_heisenberg_estimate,
            }
        else:
            from ..model import Boundary, LadderSpec

            spec = LadderSpec(
                m=req.m, boundary=Boundary.RING if req.ring else Boundary.OPEN
            )
            series = quenched_le(
                spec, req.j, req.disorder, times,
                n_disorder=req.n_disorder, seed=req.seed,
            )
            label = "quenched"
        return persist(
            "onebody",
            req.model_dump(exclude={"notes"}),
            {label: series},
            req.notes,
            req.seed,
            summary,
        )

    @app.post("/api/fit", response_model=FitResponse)
    def run_fit(req: FitRequest) -> FitResponse:
        run_dir = root / req.run
        if not run_dir.is_dir():
            run_dir = Path(req.run)
        if not (run_dir / "manifest.json").is_file():
            raise HTTPException(status_code=404, detail=f"run {req.run!r} not found")
        manifest, series = load_run(run_dir)
        config = manifest.get("config", {})
        plateau = req.plateau
        plateau_source = "explicit"
        model_cfg = config.get("model")
        if plateau is None and model_cfg:
            plateau = 1.0 / (2.0 * model_cfg["m"])
            plateau_source = "ergodic 1/(2m)"
        elif plateau is None:
            plateau_source = "tail estimate"
        labels_to_grid = {
            g["label"]: g for g in config.get("grid", []) if isinstance(g, dict)
        }
        report: dict = {
            "run_id": manifest["run_id"],
            "options": req.model_dump(),
            "plateau_source": plateau_source,
            "series": {},
        }
        rates: dict[tuple[float, float], float] = {}
        rate_rows = []
        for label, s in series.items():
            entry = characterize_series(
                s,
                t_cut=req.t_cut,
                onset=req.onset,
                plateau_guard=req.plateau_guard,
                plateau=plateau,
                entry_level=req.entry_level,
            )
            point = labels_to_grid.get(label)
            if point:
                entry["alpha"] = point["alpha"]
                entry["j_se"] = point["j_se"]
                if "rate" in entry:
                    rates[(point["alpha"], point["j_se"])] = entry["rate"]
                    rate_rows.append(
                        (point["alpha"], point["j_se"], entry["rate"], entry["rate_err"])
                    )
            report["series"][label] = entry
        if rates:
            try:
                report["decomposition"] = fgr_decompose(rates).as_dict()
            except ValueError as exc:
                report["decomposition"] = {"error": str(exc)}
            lines = ["alpha,j_se,rate,rate_err"]
            lines += [f"{a!r},{j!r},{r!r},{e!r}" for (a, j, r, e) in rate_rows]
            (run_dir / "rates.csv").write_text("\n".join(lines) + "\n")
        (run_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
        return FitResponse(run_id=manifest["run_id"], report=report)

    @app.post("/api/verify", response_model=VerifyResponse)
    def verify() -> VerifyResponse:
        checks = run_verification()
        return VerifyResponse(
            passed=all(c.passed for c in checks),
            checks=[
                VerifyCheck(
                    name=c.name, passed=c.passed, measured=c.measured, bound=c.bound
                )
                for c in checks
            ],
        )

    @app.get("/api/runs/{run_id}")
    def get_manifest(run_id: str) -> dict:
        path = root / run_id / "manifest.json"
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"run {run_id!r} not found")
        return json.loads(path.read_text())

    @app.get("/api/runs/{run_id}/series/{label}", response_class=PlainTextResponse)
    def get_series(run_id: str, label: str) -> str:
        path = root / run_id / f"series_{label}.csv"
        if not path.is_file():
            raise HTTPException(
                status_code=404, detail=f"series {label!r} not found in run {run_id!r}"
            )
        return path.read_text()

    return app
