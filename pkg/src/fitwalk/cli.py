"""Command-line interface.

Subcommands expose the simulator (``simulate``), each verification experiment
(``clt``, ``fitness-dist``, ``mu``, ``drift``, ``stable``, ``lil``,
``sandwich``, ``recurrence``, ``correction``), the closed-form reference
functions (``analytic eval``) and the whole verification suite (``suite``).

Exit codes: 0 all verdicts pass, 1 a statistical verdict failed, 2 usage or
configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analytic
from .model import ModelParams, run_trajectory
from .montecarlo import (
    DEFAULT_SEED,
    STABLE_CAP,
    ExperimentResult,
    ExperimentSpec,
    acceptance_plan,
    run_experiment,
    summary_row,
    SUMMARY_HEADER,
)
from .stats import render_table, reports_to_json

_EXPERIMENT_KINDS = (
    "clt",
    "fitness-dist",
    "mu",
    "drift",
    "stable",
    "lil",
    "sandwich",
    "recurrence",
    "correction",
)


def _parse_f(p: float, token: str):
    """Threshold flag: a float, or 'critical' resolved as (1-p)/p in full
    precision (typing a rounded value would silently break criticality gates)."""
    if token == "critical":
        return analytic.critical_fitness(p)
    try:
        return float(token)
    except ValueError as exc:
        raise ValueError(f"--f must be a float or 'critical', got {token!r}") from exc


def _add_common(sub, n_default=None, replicas_default=1, with_m=False):
    sub.add_argument("--p", type=float, default=0.6, help="birth probability, 1/2 < p < 1")
    sub.add_argument(
        "--f",
        default="critical",
        help="fitness threshold in (0,1), or 'critical' for (1-p)/p (default)",
    )
    if n_default is not None:
        sub.add_argument("--n", type=int, default=n_default, help="steps per trajectory")
    if with_m:
        sub.add_argument("--m", type=int, default=10**5, help="excursion count")
    sub.add_argument("--replicas", type=int, default=replicas_default)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
    sub.add_argument("--out", type=Path, default=None, help="output directory")
    sub.add_argument("--format", choices=("csv", "json"), default="json",
                     help="report format printed to stdout")
    sub.add_argument("--threads", type=int, default=None,
                     help="compiled-kernel thread count (results do not depend on it)")
    sub.add_argument("--cap", type=int, default=None,
                     help="per-walk step budget before censoring")
    sub.add_argument("--quick", action="store_true",
                     help="divide sizes by 10 and widen thresholds accordingly")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fitwalk",
        description="Simulation laboratory for a fitness-marked birth-death chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one trajectory and emit its CSV")
    sim.add_argument("--p", type=float, default=0.6)
    sim.add_argument("--f", default="critical")
    sim.add_argument("--n", type=int, default=1000)
    sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sim.add_argument("--mode", choices=("full", "reduced"), default="full")
    sim.add_argument("--snapshots", type=int, default=100,
                     help="number of evenly spaced checkpoint rows")
    sim.add_argument("--out", type=Path, default=None,
                     help="directory for trajectory.csv (+ fitness sidecar in full mode); "
                          "stdout when omitted")

    defaults = {
        "clt": dict(n_default=10**6, replicas_default=2000),
        "fitness-dist": dict(n_default=10**6),
        "mu": dict(with_m=True),
        "drift": dict(with_m=True),
        "stable": dict(with_m=True, replicas_default=2000),
        "lil": dict(n_default=10**7, replicas_default=20),
        "sandwich": dict(n_default=10**6, replicas_default=10),
        "recurrence": dict(n_default=10**6),
        "correction": dict(n_default=10**6, replicas_default=1000),
    }
    for kind in _EXPERIMENT_KINDS:
        sp = sub.add_parser(kind, help=f"run the {kind} verification experiment")
        _add_common(sp, **defaults[kind])

    ana = sub.add_parser("analytic", help="closed-form reference functions")
    ana_sub = ana.add_subparsers(dest="analytic_command", required=True)
    ev = ana_sub.add_parser("eval", help="evaluate one function, 17 significant digits")
    ev.add_argument("name", choices=sorted(_ANALYTIC_FUNCS) + ["stationary-law"])
    ev.add_argument("args", nargs="*", type=float)

    st = sub.add_parser("suite", help="run every verification experiment")
    st.add_argument("--quick", action="store_true",
                    help="divide n, replicas and m by 10 with widened thresholds")
    st.add_argument("--seed", type=int, default=DEFAULT_SEED)
    st.add_argument("--out", type=Path, default=None)
    st.add_argument("--threads", type=int, default=None)
    return parser


_ANALYTIC_FUNCS = {
    "critical-fitness": (analytic.critical_fitness, 1),
    "expected-mu": (analytic.expected_mu, 2),
    "correction-moments": (analytic.correction_moments, 1),
    "stable-pdf": (analytic.stable_pdf, 2),
    "stable-cdf": (analytic.stable_cdf, 2),
    "stable-laplace": (analytic.stable_laplace, 2),
    "half-normal-cdf": (analytic.half_normal_cdf, 2),
    "half-normal-mean": (analytic.half_normal_mean, 1),
    "lil-envelope": (analytic.lil_envelope, 2),
    "lil-phi": (analytic.lil_phi, 1),
}


def _set_threads(threads):
    if threads is None:
        threads = os.environ.get("FITWALK_THREADS")
    if threads is None:
        return
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(int(threads), limit)))


def _cmd_simulate(args) -> int:
    f = _parse_f(args.p, args.f)
    params = ModelParams(p=args.p, f=f)
    every = max(1, args.n // max(1, args.snapshots))
    checkpoints = list(range(0, args.n + 1, every))
    series = run_trajectory(params, args.n, args.seed, mode=args.mode,
                            checkpoints=checkpoints)
    if args.out is None:
        sys.stdout.write(series.CSV_HEADER + "\n")
        for i in range(len(series.steps)):
            sys.stdout.write(
                f"{series.steps[i]},{series.X[i]},{series.L[i]},{series.R[i]},"
                f"{series.B[i]},{series.delta[i]},{series.eta[i]},{series.C[i]}\n"
            )
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        series.to_csv(args.out / "trajectory.csv")
        if args.mode == "full":
            series.write_fitness_sidecar(args.out / "terminal_fitness.txt")
    return 0


def _spec_from_args(kind: str, args) -> ExperimentSpec:
    f = _parse_f(args.p, args.f)
    kw = dict(kind=kind, p=args.p, f=f, replicas=args.replicas,
              master_seed=args.seed, quick=args.quick)
    if hasattr(args, "n"):
        kw["n"] = args.n
    if hasattr(args, "m"):
        kw["m"] = args.m
    if args.cap is not None:
        kw["cap"] = args.cap
    elif kind == "stable":
        kw["cap"] = STABLE_CAP
    if kind == "fitness-dist":
        kw["mode"] = "full"
    return ExperimentSpec(**kw)


def _cmd_experiment(kind: str, args) -> int:
    _set_threads(args.threads)
    spec = _spec_from_args(kind, args)
    result = run_experiment(spec, outdir=args.out)
    if args.out is not None:
        emit_plot_data(result, args.out)
    if args.format == "json":
        print(reports_to_json(result.reports))
    else:
        print(SUMMARY_HEADER)
        print(summary_row(result))
    print(render_table(result.reports), file=sys.stderr)
    return 0 if result.passed else 1


def _cmd_analytic(args) -> int:
    if args.name == "stationary-law":
        if len(args.args) != 2:
            raise ValueError("stationary-law takes p and f")
        law = analytic.stationary_law_L(*args.args)
        extra = ""
        if law.rho is not None:
            extra = f" rho={law.rho:.17g}"
        if law.drift is not None:
            extra = f" drift={law.drift:.17g}"
        print(law.regime + extra)
        return 0
    func, max_args = _ANALYTIC_FUNCS[args.name]
    if not 1 <= len(args.args) <= max_args:
        raise ValueError(
            f"{args.name} takes between 1 and {max_args} numeric arguments"
        )
    value = func(*args.args)
    if isinstance(value, tuple):
        print(" ".join(f"{v:.17g}" for v in value))
    else:
        print(f"{float(value):.17g}")
    return 0


def _cmd_suite(args) -> int:
    _set_threads(args.threads)
    plan = acceptance_plan(quick=args.quick, master_seed=args.seed)
    all_reports = []
    failed = False
    for label, spec in plan:
        sub = args.out / label if args.out is not None else None
        result = run_experiment(spec, outdir=sub)
        if sub is not None:
            emit_plot_data(result, sub)
        ok = result.passed
        failed = failed or not ok
        print(f"{label}: {'PASS' if ok else 'FAIL'}")
        print(render_table(result.reports), file=sys.stderr)
        for r in result.reports:
            d = r.to_dict()
            d["experiment"] = label
            all_reports.append(d)
    payload = json.dumps(all_reports, indent=2)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "suite_report.json").write_text(payload)
    else:
        print(payload)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# plot-ready data (CSV only; no rendering)
# ---------------------------------------------------------------------------

_REFERENCE_CDF = {
    "clt": ("normalized_delta", lambda r, x: analytic.half_normal_cdf(x, 1.0)),
    "stable": ("t_over_m2", lambda r, x: analytic.stable_cdf(x, 1.0)),
    "fitness-dist": (
        "surviving_fitness",
        lambda r, x: np.clip(
            (x - r.spec.params.f_c) / (1.0 - r.spec.params.f_c), 0.0, 1.0
        ),
    ),
}


def emit_plot_data(result: ExperimentResult, outdir) -> list:
    """Write plot-ready CSVs for an experiment's outputs; returns the paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    kind = result.spec.kind
    written = []
    if kind in _REFERENCE_CDF and result.samples:
        name, ref = _REFERENCE_CDF[kind]
        values = np.sort(np.asarray(result.samples[name], dtype=np.float64))
        n = len(values)
        path = outdir / f"{kind}_cdf.csv"
        with open(path, "w") as fh:
            fh.write("x,empirical,reference\n")
            refs = np.asarray(ref(result, values), dtype=np.float64)
            for i in range(n):
                fh.write(f"{values[i]:.10g},{(i + 1) / n:.10g},{refs[i]:.10g}\n")
        written.append(path)
        hist_path = outdir / f"{kind}_hist.csv"
        counts, edges = np.histogram(values, bins=min(50, max(5, n // 20)))
        ref_edges = np.asarray(ref(result, edges), dtype=np.float64)
        expected = np.diff(ref_edges) * n
        with open(hist_path, "w") as fh:
            fh.write("bin_left,bin_right,count,expected\n")
            for i in range(len(counts)):
                fh.write(
                    f"{edges[i]:.10g},{edges[i + 1]:.10g},{counts[i]},{expected[i]:.10g}\n"
                )
        written.append(hist_path)
    if kind == "lil" and "series" in result.extras and result.extras["series"] is not None:
        steps, running = result.extras["series"]
        path = outdir / "lil_series.csv"
        with open(path, "w") as fh:
            fh.write("n,running_statistic\n")
            for s, v in zip(steps, running):
                fh.write(f"{s},{v:.10g}\n")
        written.append(path)
    if kind == "drift" and "V" in result.extras:
        path = outdir / "drift_cumulative.csv"
        V = result.extras["V"]
        Vp = result.extras["V_prime"]
        T = result.extras["T"]
        idx = np.unique(np.linspace(0, len(V) - 1, num=min(10_000, len(V))).astype(int))
        with open(path, "w") as fh:
            fh.write("m,V,V_prime,T\n")
            for i in idx:
                fh.write(f"{i + 1},{V[i]},{Vp[i]},{T[i]}\n")
        written.append(path)
    return written


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "analytic":
            return _cmd_analytic(args)
        if args.command == "suite":
            return _cmd_suite(args)
        return _cmd_experiment(args.command, args)
    except (ValueError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
