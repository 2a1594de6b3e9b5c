"""Run persistence: manifests, run directories and CSV series files.

Every run directory is named by a content hash of its configuration and
the tool version, so identical configurations land in identical
directories with byte-identical CSVs.  Floats are written with shortest
round-trip precision.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import TimeSeries


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict, version: str = __version__) -> str:
    payload = canonical_json({"config": config, "tool_version": version})
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


@dataclass
class RunManifest:
    run_id: str
    config: dict
    seed: int | None = None
    tool_version: str = __version__
    created_at: str = ""
    notes: list[str] = field(default_factory=list)

    @classmethod
    def from_config(
        cls, config: dict, seed: int | None = None, notes: list[str] | None = None
    ) -> "RunManifest":
        return cls(
            run_id=config_hash(config),
            config=config,
            seed=seed,
            created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            notes=notes or [],
        )

    def as_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "tool_version": self.tool_version,
            "created_at": self.created_at,
            "seed": self.seed,
            "config": self.config,
            "notes": self.notes,
        }


def write_series_csv(path: Path, series: TimeSeries, manifest_id: str) -> None:
    lines = [f"# manifest={manifest_id} observable={series.observable}", "t,value"]
    lines.extend(
        f"{float(t)!r},{float(v)!r}" for t, v in zip(series.times, series.values)
    )
    path.write_text("\n".join(lines) + "\n")


def read_series_csv(path: Path) -> TimeSeries:
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0]
    observable = "P11"
    meta: dict = {}
    if header.startswith("#"):
        for tok in header[1:].split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                if k == "observable":
                    observable = v
                else:
                    meta[k] = v
        lines = lines[1:]
    if lines and lines[0].strip() == "t,value":
        lines = lines[1:]
    rows = [ln.split(",") for ln in lines if ln.strip()]
    times = np.array([float(r[0]) for r in rows])
    values = np.array([float(r[1]) for r in rows])
    return TimeSeries(times, values, observable, meta)


def write_run(
    root: Path, manifest: RunManifest, series: dict[str, TimeSeries]
) -> Path:
    """Create runs/<run_id>/ with manifest.json and one CSV per series."""
    run_dir = Path(root) / manifest.run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "manifest.json").write_text(
        json.dumps(manifest.as_dict(), indent=2) + "\n"
    )
    for label, s in series.items():
        write_series_csv(run_dir / f"series_{label}.csv", s, manifest.run_id)
    return run_dir


def load_run(run_dir: Path) -> tuple[dict, dict[str, TimeSeries]]:
    run_dir = Path(run_dir)
    manifest = json.loads((run_dir / "manifest.json").read_text())
    series = {}
    for csv in sorted(run_dir.glob("series_*.csv")):
        label = csv.stem.removeprefix("series_")
        series[label] = read_series_csv(csv)
    return manifest, series
