"""Run orchestration: CSV persistence, manifests, sweeps, re-runs.

Output layout per run: ``<out>/<scenario>/<table>.csv`` plus ``manifest.json``
recording every resolved parameter and the sha256 of each CSV. Fixed-seed,
fixed-step runs are byte-identical; CSV floats carry 9 significant digits and
files are written atomically (temp file + rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig, coerce_value, load_config_file
from .errors import ConfigError, SpinMechError
from .scenarios import SCENARIOS, ScenarioOutput, Table, build_scenario

__all__ = ["RunResult", "run_scenario", "sweep", "rerun_from_manifest", "ghz_scenario"]

FLOAT_FORMAT = "%.9g"


@dataclass
class RunResult:
    run_dir: Path
    manifest_path: Path
    csv_paths: dict[str, Path]
    output: ScenarioOutput
    wall_time_s: float


def _format_cell(value) -> str:
    if isinstance(value, (np.floating, float)):
        return FLOAT_FORMAT % value
    if isinstance(value, (np.complexfloating, complex)):
        return f"{FLOAT_FORMAT % value.real}{'+' if value.imag >= 0 else '-'}{FLOAT_FORMAT % abs(value.imag)}j"
    return str(value)


def _write_csv_atomic(path: Path, table: Table) -> str:
    names = table.names
    rows = zip(*(col for _, col in table.columns))
    text_lines = [",".join(names)]
    for row in rows:
        text_lines.append(",".join(_format_cell(v) for v in row))
    payload = ("\n".join(text_lines) + "\n").encode("utf-8")
    tmp = path.with_suffix(".csv.tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)
    return hashlib.sha256(payload).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def run_scenario(cfg: ScenarioConfig, subdir: str | None = None) -> RunResult:
    """Execute one scenario and persist its CSV tables plus a manifest."""
    t0 = time.perf_counter()
    output = build_scenario(cfg)
    wall = time.perf_counter() - t0

    run_dir = Path(cfg.output_dir) / (subdir or cfg.scenario_id)
    run_dir.mkdir(parents=True, exist_ok=True)
    checksums, csv_paths = {}, {}
    for name, table in output.tables.items():
        path = run_dir / f"{name}.csv"
        checksums[name] = {"file": path.name, "sha256": _write_csv_atomic(path, table)}
        csv_paths[name] = path

    manifest = {
        "scenario": cfg.scenario_id,
        "package_version": __version__,
        "seed": cfg.seed,
        "integrator": {
            "mode": cfg.integrator,
            "fixed_step": cfg.fixed_step,
        },
        "overrides": _jsonable(cfg.overrides),
        "resolved": _jsonable(output.info),
        "tables": checksums,
        "wall_time_s": round(wall, 3),
    }
    manifest_path = run_dir / "manifest.json"
    tmp = manifest_path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, manifest_path)

    if cfg.plot:
        from .plotting import render_run

        render_run(run_dir)
    return RunResult(run_dir, manifest_path, csv_paths, output, wall)


def sweep(
    base: ScenarioConfig,
    axis: str,
    values: list,
    jobs: int = 1,
) -> Path:
    """One run per axis value; results merged into a long-format CSV.

    A member failure aborts the sweep but leaves a partial-results manifest
    listing what completed.
    """
    spec = SCENARIOS[base.scenario_id]
    if axis not in spec.keys:
        raise ConfigError(f"axis {axis!r} is not a declared override of {base.scenario_id}")
    if axis in base.overrides:
        raise ConfigError(f"axis {axis!r} also appears in --set overrides")
    if not values:
        raise ConfigError("sweep needs a nonempty value list")

    sweep_dir = Path(base.output_dir) / f"{base.scenario_id}_sweep_{axis}"
    sweep_dir.mkdir(parents=True, exist_ok=True)

    def member(value) -> tuple[object, RunResult]:
        cfg = ScenarioConfig(
            scenario_id=base.scenario_id,
            overrides={**base.overrides, axis: value},
            seed=base.seed,
            output_dir=str(sweep_dir),
            integrator=base.integrator,
            fixed_step=base.fixed_step,
            plot=base.plot,
        )
        return value, run_scenario(cfg, subdir=f"{axis}_{value}")

    results: list[tuple[object, RunResult]] = []
    failure: Exception | None = None
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(member, v) for v in values]
            for fut in futures:
                try:
                    results.append(fut.result())
                except SpinMechError as exc:  # keep completed members
                    failure = failure or exc
    else:
        for v in values:
            try:
                results.append(member(v))
            except SpinMechError as exc:
                failure = exc
                break

    manifest = {
        "scenario": base.scenario_id,
        "axis": axis,
        "values": _jsonable(list(values)),
        "completed": _jsonable([v for v, _ in results]),
        "status": "failed" if failure else "ok",
        "error": str(failure) if failure else None,
    }
    (sweep_dir / "sweep_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if failure is not None:
        raise failure

    # merge: long format keyed by the axis value, one block per member table
    merged_lines = None
    for value, res in results:
        for name, table in res.output.tables.items():
            header = [axis, "table"] + table.names
            if merged_lines is None:
                merged_lines = [",".join(header)]
            for row in zip(*(col for _, col in table.columns)):
                merged_lines.append(
                    ",".join([_format_cell(value), name] + [_format_cell(v) for v in row])
                )
    merged_path = sweep_dir / "merged.csv"
    merged_path.write_text("\n".join(merged_lines) + "\n", encoding="utf-8")
    return sweep_dir


def rerun_from_manifest(manifest_path: str | Path) -> RunResult:
    """Reconstruct a run from its manifest; reproduces every CSV."""
    manifest = json.loads(Path(manifest_path).read_text())
    cfg = ScenarioConfig(
        scenario_id=manifest["scenario"],
        overrides={k: _decode_override(v) for k, v in manifest["overrides"].items()},
        seed=manifest["seed"],
        output_dir=str(Path(manifest_path).parent.parent),
        integrator=manifest["integrator"]["mode"],
        fixed_step=manifest["integrator"]["fixed_step"],
    )
    return run_scenario(cfg, subdir=Path(manifest_path).parent.name)


def _decode_override(v):
    if isinstance(v, list):
        return tuple(v)
    return v


def ghz_scenario(
    r: float = 1.25,
    delta_m_eff: float = 40.0,
    gamma: float = 0.01,
    n_periods: int = 40,
    output_dir: str = "runs",
    dissipation_free: bool = False,
    **extra,
) -> RunResult:
    """Convenience wrapper around the figS9 scenario."""
    cfg = ScenarioConfig(
        scenario_id="figS9",
        overrides={
            "r": r, "delta_m_eff": delta_m_eff, "gamma": gamma,
            "n_periods": n_periods, "dissipation_free": dissipation_free,
            **extra,
        },
        output_dir=output_dir,
    )
    return run_scenario(cfg)
