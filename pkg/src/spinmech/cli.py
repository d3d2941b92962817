"""Command-line interface.

    sim run --scenario fig2b [--set key=value]... [--seed N] [--out DIR]
            [--fixed-step DT] [--config FILE] [--plot]
    sim run --from-manifest runs/fig2b/manifest.json
    sim sweep --scenario figS8 --axis gamma --values 0.001,0.01,0.05
    sim list
    sim plot RUN_DIR

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(trace/truncation), 4 parametric instability.
"""

from __future__ import annotations

import argparse
import sys

from .config import ScenarioConfig, coerce_value, load_config_file
from .errors import (
    ConfigError,
    InstabilityError,
    RunFailedError,
    SpinMechError,
    TruncationError,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INSTABILITY = 4


def _parse_sets(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        out[key.strip()] = coerce_value(raw)
    return out


def _build_config(args) -> ScenarioConfig:
    overrides = {}
    output_dir = args.out
    integrator = "adaptive"
    fixed_step = None
    if args.config:
        file_overrides = load_config_file(args.config)
        integrator = file_overrides.pop("integrator.mode", integrator)
        fixed_step = file_overrides.pop("integrator.step", fixed_step)
        file_overrides.pop("integrator.rtol", None)
        file_overrides.pop("integrator.atol", None)
        out_dir = file_overrides.pop("output.dir", None)
        if out_dir and args.out == "runs":
            output_dir = str(out_dir)
        overrides.update(
            {k: v for k, v in file_overrides.items() if not k.startswith("disorder.")}
        )
    overrides.update(_parse_sets(args.set or []))
    if args.fixed_step is not None:
        integrator = "fixed"
        fixed_step = args.fixed_step
    return ScenarioConfig(
        scenario_id=args.scenario,
        overrides=overrides,
        seed=args.seed,
        output_dir=output_dir,
        integrator=integrator,
        fixed_step=fixed_step,
        plot=args.plot,
    )


def _cmd_run(args) -> int:
    from .harness import rerun_from_manifest, run_scenario

    if args.from_manifest:
        result = rerun_from_manifest(args.from_manifest)
    else:
        if not args.scenario:
            raise ConfigError("run needs --scenario or --from-manifest")
        result = run_scenario(_build_config(args))
    print(f"wrote {len(result.csv_paths)} table(s) to {result.run_dir} "
          f"({result.wall_time_s:.2f} s)")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    from .harness import sweep

    if not args.scenario:
        raise ConfigError("sweep needs --scenario")
    if not args.values:
        raise ConfigError("sweep needs --values v1,v2,...")
    values = [coerce_value(v) for v in args.values.split(",") if v.strip()]
    base = _build_config(args)
    out = sweep(base, args.axis, values, jobs=args.jobs)
    print(f"sweep complete: {out}/merged.csv")
    return EXIT_OK


def _cmd_list(args) -> int:
    from .scenarios import scenario_summaries

    for name, description, keys in scenario_summaries():
        print(f"{name:9s} {description}")
        print(f"{'':9s}   overrides: {', '.join(keys)}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    from .plotting import render_run

    rendered = render_run(args.run_dir)
    for path in rendered:
        print(f"rendered {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Scenario runner for the amplified spin-mechanical simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario")
    run_p.add_argument("--scenario", help="scenario id (see `sim list`)")
    run_p.add_argument("--set", action="append", metavar="KEY=VALUE")
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--out", default="runs")
    run_p.add_argument("--fixed-step", type=float, default=None, dest="fixed_step")
    run_p.add_argument("--config", help="sectioned config file")
    run_p.add_argument("--plot", action="store_true", help="render PNGs next to the CSVs")
    run_p.add_argument("--from-manifest", dest="from_manifest",
                       help="re-run a previous run from its manifest")
    run_p.set_defaults(handler=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a scenario across axis values")
    sweep_p.add_argument("--scenario", required=True)
    sweep_p.add_argument("--axis", required=True)
    sweep_p.add_argument("--values", required=True, help="comma-separated values")
    sweep_p.add_argument("--set", action="append", metavar="KEY=VALUE")
    sweep_p.add_argument("--seed", type=int, default=0)
    sweep_p.add_argument("--out", default="runs")
    sweep_p.add_argument("--fixed-step", type=float, default=None, dest="fixed_step")
    sweep_p.add_argument("--config", help="sectioned config file")
    sweep_p.add_argument("--plot", action="store_true")
    sweep_p.add_argument("--jobs", type=int, default=1)
    sweep_p.set_defaults(handler=_cmd_sweep)

    list_p = sub.add_parser("list", help="print the scenario registry")
    list_p.set_defaults(handler=_cmd_list)

    plot_p = sub.add_parser("plot", help="render figures for an existing run")
    plot_p.add_argument("run_dir")
    plot_p.set_defaults(handler=_cmd_plot)

    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InstabilityError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_INSTABILITY
    except (TruncationError, RunFailedError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpinMechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
