"""Command-line interface.

Subcommands::

    gaussmem estimate --input sample.txt --out-dir out/
    gaussmem paper-fig1 --out-dir out/
    gaussmem paper-fig2 --out-dir out/
    gaussmem sweep --sizes 100,1000 --rules frac:30,sigma4 --replicates 5 --out-dir out/

On failure a single JSON line ``{"error": ..., "message": ...}`` is written to
stderr and the exit status is 1.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from ..core import AnnealSchedule, EstimatorConfig, read_sample
from ..errors import GaussMemError
from ..sigma_solver import figure1_data
from .figures import (
    FIG1_NAME,
    emit_figures,
    write_density_csv,
    write_epsilon_csv,
    write_fig1_csv,
    write_summary_csv,
)
from .runner import RunSpec, SigmaRule, run, run_user_data

log = logging.getLogger("gaussmem")


def _csv_list(conv):
    def parse(text):
        return [conv(t) for t in text.split(",") if t.strip()]
    return parse


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    d = EstimatorConfig()
    s = AnnealSchedule()
    g = p.add_argument_group("estimator")
    g.add_argument("--n-points", type=int, default=d.n_points)
    g.add_argument("--n-conditions", type=int, default=d.n_conditions)
    g.add_argument("--k-h", type=float, default=d.k_h)
    g.add_argument("--smoothing-window", type=int, default=d.smoothing_window)
    g.add_argument("--entropy-mode", choices=("normalized", "raw"), default=d.entropy_mode)
    g = p.add_argument_group("annealing schedule")
    g.add_argument("--t-initial", type=float, default=s.t_initial)
    g.add_argument("--cooling", type=float, default=s.cooling)
    g.add_argument("--steps-per-temp", type=int, default=None,
                   help="moves per temperature level (default 20 * n_points)")
    g.add_argument("--t-min", type=float, default=s.t_min)
    g.add_argument("--step-size", type=float, default=s.step_size)
    g.add_argument("--adaptive-step", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window-frac", type=float, default=0.1,
                   help="sigma_4 window width as a fraction of the span")
    p.add_argument("--stencil-frac", type=float, default=0.005,
                   help="curvature finite-difference step as a fraction of the span")
    p.add_argument("--backend", choices=("cython", "python"), default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", type=Path, default=Path("."))


def _config(args) -> EstimatorConfig:
    sched = AnnealSchedule(
        t_initial=args.t_initial, cooling=args.cooling, steps_per_temp=args.steps_per_temp,
        t_min=args.t_min, step_size=args.step_size, seed=args.seed,
        adaptive_step=args.adaptive_step,
    )
    return EstimatorConfig(
        n_points=args.n_points, n_conditions=args.n_conditions, k_h=args.k_h,
        smoothing_window=args.smoothing_window, sa_params=sched,
        entropy_mode=args.entropy_mode,
    )


def _spec(args, n_samples: int, rule: SigmaRule, replicates: int = 1) -> RunSpec:
    return RunSpec(
        n_samples=n_samples, sigma_rule=rule, config=_config(args), seed=args.seed,
        replicates=replicates, window_frac=args.window_frac, stencil_frac=args.stencil_frac,
    )


def cmd_estimate(args) -> None:
    values = read_sample(args.input, args.column, args.delimiter)
    spec = _spec(args, len(values), SigmaRule.parse(args.sigma_rule))
    report = run_user_data(values, spec, backend=args.backend)
    report.metadata["input"] = str(args.input)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_density_csv(args.out_dir / "density.csv", report)
    write_epsilon_csv(args.out_dir / "epsilon.csv", report)
    log.info("estimate: %d values, %.1fs", len(values), report.wall_time)


def cmd_fig1(args) -> None:
    rho2 = np.linspace(args.rho2_min, args.rho2_max, args.rows)
    table = figure1_data(args.rho_c, args.d, args.c1, args.c2, rho2)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_fig1_csv(args.out_dir / FIG1_NAME, table)


def _run_all(args, specs):
    reports = []
    for spec in specs:
        batch = run(spec, workers=args.workers, backend=args.backend)
        for r in batch.reports:
            log.info("N=%d rule=%s seed=%d l1=%.4f (%.1fs)", r.metadata["n_samples"],
                     r.metadata["sigma_rule"], r.metadata["seed"], r.l1_error, r.wall_time)
        reports.extend(batch.reports)
    return reports


def cmd_fig2(args) -> None:
    specs = [_spec(args, args.n_small, SigmaRule.parse(r)) for r in args.rules]
    frac = SigmaRule("frac", args.sigma_frac)
    specs += [_spec(args, n, frac) for n in args.sizes
              if not (n == args.n_small and frac in [s.sigma_rule for s in specs])]
    emit_figures(_run_all(args, specs), None, args.out_dir)


def cmd_sweep(args) -> None:
    specs = [_spec(args, n, SigmaRule.parse(r), args.replicates)
             for n in args.sizes for r in args.rules]
    reports = _run_all(args, specs)
    emit_figures(reports, None, args.out_dir)
    meta = {"sizes": ",".join(map(str, args.sizes)), "rules": ",".join(args.rules),
            "replicates": args.replicates, "seed": args.seed}
    write_summary_csv(args.out_dir / "sweep_summary.csv", reports, meta)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussmem", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", help="estimate a density from a sample file")
    e.add_argument("--input", type=Path, required=True)
    e.add_argument("--column", default=None, help="CSV column name or 0-based index")
    e.add_argument("--delimiter", default=",")
    e.add_argument("--sigma-rule", default="frac:30",
                   help="fixed:<w>, frac:<k> (span/k), sigma0, sigma1 or sigma4")
    _add_config_flags(e)
    e.set_defaults(func=cmd_estimate)

    f1 = sub.add_parser("paper-fig1", help="optimal sigma versus rho'' table")
    f1.add_argument("--rho-c", type=float, default=1.0)
    f1.add_argument("--d", type=float, default=1.0)
    f1.add_argument("--c1", type=float, default=1.0)
    f1.add_argument("--c2", type=float, default=1.0)
    f1.add_argument("--rho2-min", type=float, default=-10.0)
    f1.add_argument("--rho2-max", type=float, default=30.0)
    f1.add_argument("--rows", type=int, default=401)
    f1.add_argument("--out-dir", type=Path, default=Path("."))
    f1.set_defaults(func=cmd_fig1)

    f2 = sub.add_parser("paper-fig2", help="density estimates for varying sigma and N")
    f2.add_argument("--n-small", type=int, default=100)
    f2.add_argument("--rules", type=_csv_list(str), default=["frac:30", "sigma1", "sigma4"])
    f2.add_argument("--sizes", type=_csv_list(int), default=[100, 1000, 10000])
    f2.add_argument("--sigma-frac", type=float, default=30.0)
    _add_config_flags(f2)
    f2.set_defaults(func=cmd_fig2)

    sw = sub.add_parser("sweep", help="grid over sample sizes, sigma rules and seeds")
    sw.add_argument("--sizes", type=_csv_list(int), default=[100, 1000, 10000])
    sw.add_argument("--rules", type=_csv_list(str), default=["frac:30"])
    sw.add_argument("--replicates", type=int, default=10)
    _add_config_flags(sw)
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (GaussMemError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
