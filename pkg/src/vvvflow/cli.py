"""Command line front end.

Subcommands: run, sweep, check, diff, info. Exit codes: 0 success,
1 validation failure, 2 a run diverged, 3 the built-in check suite failed.
Errors go to standard error; reports and summaries to standard output.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

from .checks import builtin_checks
from .config import SweepSettings, load_config, parse_sweep_plan, realize
from .diagnostics import sobolev_norm
from .errors import ConfigError, DivergedError, VvvflowError
from .experiments import (
    Scenario,
    SweepPlan,
    dt_refinement_energy,
    sweep_alpha_curl_mismatch,
    sweep_alpha_nse_deviation,
)
from .models import run as run_model
from .snapshots import read_header, read_snapshot, write_state_snapshot
from .spectral import SpectralVectorField, make_grid
from .timeseries import TimeseriesWriter

logger = logging.getLogger("vvvflow")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DIVERGED = 2
EXIT_CHECK_FAILED = 3


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    setup = realize(cfg)
    out_dir = cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "timeseries.csv")

    def snapshot_sink(state):
        path = os.path.join(out_dir, f"snap_{state.step_count:08d}.vvvf")
        write_state_snapshot(state, path)

    with TimeseriesWriter(csv_path) as writer:
        result = run_model(
            cfg.model, setup.u0, setup.params, setup.scheme, w0=setup.w0,
            on_record=writer.append,
            on_snapshot=snapshot_sink if cfg.snapshot_every > 0 else None,
        )
        write_state_snapshot(result.state, os.path.join(out_dir, "final.vvvf"))
    print(f"completed {result.state.step_count} steps to t={result.state.t:.6g}; "
          f"wrote {csv_path}")
    return EXIT_OK


def _build_scenario(settings: SweepSettings) -> Scenario:
    setup = realize(settings.run)
    return Scenario(grid=setup.grid, u0=setup.u0, params=setup.params,
                    cfg=setup.scheme, w0=setup.w0)


def _cmd_sweep(args) -> int:
    with open(args.plan, "r", encoding="utf-8") as fh:
        settings = parse_sweep_plan(fh.read())
    scenario = _build_scenario(settings)
    out_dir = settings.run.output_dir
    os.makedirs(out_dir, exist_ok=True)

    if settings.kind == "dt-energy":
        report = dt_refinement_energy(scenario, settings.values)
    else:
        lo = settings.order_min if settings.order_min is not None else 0.85
        hi = settings.order_max if settings.order_max is not None else math.inf
        reference = settings.reference or (
            "nse" if settings.kind == "nse-deviation" else "analytic")
        plan = SweepPlan(scenario=scenario, variable="alpha",
                         values=settings.values, reference=reference,
                         compare_every=settings.compare_every,
                         order_window=(lo, hi))
        if settings.kind == "curl-mismatch":
            report = sweep_alpha_curl_mismatch(plan)
        else:
            report = sweep_alpha_nse_deviation(plan)

    csv_path = os.path.join(out_dir, "report.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_csv())
    summary_path = os.path.join(out_dir, "summary.txt")
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write(report.summary() + "\n")
    print(report.summary())
    print(f"wrote {csv_path} and {summary_path}")
    return EXIT_OK


def _cmd_check(args) -> int:
    results = builtin_checks(seeds=range(args.seeds))
    for res in results:
        print(res.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _load_pair(path):
    header = read_header(path)
    grid = make_grid(header.n)
    return read_snapshot(path, grid)


def _cmd_diff(args) -> int:
    a = _load_pair(args.snap_a)
    b = _load_pair(args.snap_b)
    if a.header.n != b.header.n:
        raise ConfigError(
            f"snapshots have different grids (n={a.header.n} vs n={b.header.n})")

    def report(name, fa, fb):
        diff = SpectralVectorField(fa.grid, fa.coeffs - fb.coeffs)
        print(f"{name}: l2 {sobolev_norm(diff):.17g} "
              f"h1 {sobolev_norm(diff, 1):.17g}")

    report("u", a.u, b.u)
    if a.w is not None and b.w is not None:
        report("w", a.w, b.w)
    elif (a.w is None) != (b.w is None):
        print("w: present in only one snapshot")
    return EXIT_OK


def _cmd_info(args) -> int:
    header = read_header(args.snap)
    print(f"format version: {header.version}")
    print(f"grid n: {header.n}")
    print(f"fields: {header.field_count} "
          f"({'u,w' if header.field_count == 6 else 'u'})")
    print(f"layout code: {header.layout}")
    print(f"alpha: {header.alpha:.17g}")
    print(f"nu: {header.nu:.17g}")
    print(f"t: {header.t:.17g}")
    print(f"retained modes per field: {header.retained_mode_count}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vvvflow",
        description="Pseudo-spectral velocity-vorticity solvers on the unit torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one simulation from a config file")
    p_run.add_argument("config")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="execute a convergence study from a plan file")
    p_sweep.add_argument("plan")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_check = sub.add_parser("check", help="run the built-in property suites")
    p_check.add_argument("--seeds", type=int, default=20)
    p_check.set_defaults(func=_cmd_check)

    p_diff = sub.add_parser("diff", help="print distances between two snapshots")
    p_diff.add_argument("snap_a")
    p_diff.add_argument("snap_b")
    p_diff.set_defaults(func=_cmd_diff)

    p_info = sub.add_parser("info", help="print a snapshot header")
    p_info.add_argument("snap")
    p_info.set_defaults(func=_cmd_info)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigError, VvvflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
