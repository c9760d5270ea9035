"""Run benchmark experiments and write CSV results."""
from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass

import numpy as np

from ..assembly import CollocationSystem, build_a, build_b, build_g_vec, build_phi
from ..extquad import QuadConfig
from ..geometry import (
    PointSet,
    evaluation_points,
    midpoint_grid,
    points_near_count,
    uniform_points,
)
from ..shapeparam import (
    CondIndicated,
    assign_constant,
    assign_random_perturbed,
    search_cond_indicated,
)
from ..solver import (
    SolveReport,
    cn_evolve,
    evaluate_solution,
    rms_error,
    solve_steady,
    steady_matrix,
)
from .config import ExperimentConfig
from .problems import Benchmark, benchmark_data

__all__ = [
    "ExperimentError",
    "StepSeries",
    "make_benchmark",
    "make_points",
    "solve_benchmark",
    "evolve_benchmark",
    "run_experiment",
    "STEADY_COLUMNS",
    "SERIES_COLUMNS",
]

STEADY_COLUMNS = ["benchmark", "alpha", "n_bar", "strategy", "eps", "rms", "cond2",
                  "wall_time"]
SERIES_COLUMNS = ["benchmark", "alpha", "n_bar", "step", "t", "l2_norm", "max_abs"]


class ExperimentError(RuntimeError):
    """A failure inside an experiment, labelled with the row being computed."""

    def __init__(self, message, row):
        super().__init__(f"{row}: {message}")
        self.row = row


def make_benchmark(cfg: ExperimentConfig, alpha: float) -> Benchmark:
    params = {}
    if cfg.benchmark == "poisson1d_hom":
        params["s"] = cfg.s
    if cfg.benchmark == "heat_stripe":
        params["x_c"] = cfg.x_c
    if cfg.kappa is not None and cfg.benchmark in ("diffusion_hole", "heat_stripe"):
        params["kappa"] = cfg.kappa
    return benchmark_data(cfg.benchmark, alpha, **params)


def make_points(domain, cfg: ExperimentConfig) -> list[PointSet]:
    """Uniform point sets for every requested resolution or point count."""
    sets = [uniform_points(domain, r) for r in cfg.resolution]
    sets += [points_near_count(domain, n) for n in cfg.n_bar]
    return sets


def _quad(cfg: ExperimentConfig) -> QuadConfig:
    return QuadConfig(rel_tol=cfg.quad_tol)


def _system(bench, points, quad, threads):
    return CollocationSystem(build_phi(points),
                             build_a(points, bench.domain, bench.spec, quad, threads=threads))


def solve_benchmark(bench: Benchmark, points: PointSet, quad: QuadConfig | None = None,
                    threads: int | None = None, eval_points=None) -> SolveReport:
    """Assemble and solve a steady benchmark; ``rms`` is set when the exact solution is known."""
    start = time.perf_counter()
    system = _system(bench, points, quad, threads)
    b = build_b(points, bench.domain, bench.spec, bench.data, 0.0, quad, threads)
    g = build_g_vec(points, bench.data, 0.0)
    report = solve_steady(system, bench.spec, b, g)
    elapsed = time.perf_counter() - start
    report = SolveReport(report.lambda_, report.cond2, elapsed, None, report.warning)
    if bench.exact is None:
        return report
    xe = evaluation_points(bench.domain) if eval_points is None else eval_points
    approx = evaluate_solution(points, report.lambda_, xe)
    return report.with_rms(rms_error(approx, bench.exact(xe)))


def _shaped(bench, points, cfg, index, quad, threads, eps=None):
    """Return (shaped points, strategy label, eps column value)."""
    if eps is not None or cfg.strategy == "constant":
        eps = cfg.eps_for(index) if eps is None else eps
        return assign_constant(points, eps), "constant", eps
    if cfg.strategy == "random":
        label = f"random({cfg.eps_min!r},{cfg.eps_max!r};seed={cfg.seed})"
        return assign_random_perturbed(points, cfg.eps_min, cfg.eps_max, cfg.seed), label, ""
    strategy = CondIndicated(cfg.eps_start, cfg.eps_step, cfg.k_lo, cfg.k_hi, cfg.max_iters)

    def assembler(value):
        shaped = assign_constant(points, value)
        return steady_matrix(_system(bench, shaped, quad, threads), bench.spec)

    eps, _ = search_cond_indicated(assembler, strategy)
    return assign_constant(points, eps), "cond_indicated", eps


@dataclass(frozen=True, eq=False)
class StepSeries:
    """Time series of a Crank-Nicolson run."""

    times: np.ndarray
    l2_norm: np.ndarray
    max_abs: np.ndarray
    lambdas: np.ndarray
    points: PointSet


def evolve_benchmark(bench: Benchmark, points: PointSet, tau: float, steps: int,
                     quad: QuadConfig | None = None, threads: int | None = None,
                     norm_cells: int = 100) -> StepSeries:
    """Crank-Nicolson run of a time-dependent benchmark with norm and max tracking."""
    system = _system(bench, points, quad, threads)
    run = cn_evolve(system, points, bench.domain, bench.spec, bench.data, tau, steps,
                    quad, threads=threads)
    centers, vol = midpoint_grid(bench.domain, norm_cells)
    norms = np.sqrt(np.sum(evaluate_solution(points, run.lambdas, centers) ** 2, axis=0) * vol)
    grid = evaluation_points(bench.domain)
    peaks = np.max(np.abs(evaluate_solution(points, run.lambdas, grid)), axis=0)
    return StepSeries(run.times, norms, peaks, run.lambdas, points)


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class _CsvSink:
    def __init__(self, path, columns):
        self.fh = open(path, "w", newline="")
        self.writer = csv.writer(self.fh, lineterminator="\n")
        self.columns = columns
        self.writer.writerow(columns)

    def row(self, values: dict):
        self.writer.writerow([_fmt(values.get(c, "")) for c in self.columns])
        self.fh.flush()

    def failed(self, context: str):
        self.writer.writerow(["FAILED", context] + [""] * (len(self.columns) - 2))
        self.fh.flush()

    def close(self):
        self.fh.close()


def _write_snapshot(path, grid, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        names = ["x", "y", "z"][: grid.shape[1]]
        w.writerow(names + ["u"])
        for p, v in zip(grid, values):
            w.writerow([repr(float(c)) for c in p] + [repr(float(v))])


def run_experiment(cfg: ExperimentConfig, out_dir: str = ".", threads: int | None = None,
                   sweep: bool = False) -> list[dict]:
    """Run every (alpha, point set) combination of ``cfg`` and write its CSV.

    Steady benchmarks produce one row per combination (or per sweep value
    when ``sweep`` is true).  Time-dependent benchmarks produce one row per
    time level.  On failure a FAILED row is flushed and
    :class:`ExperimentError` is raised naming the row.
    """
    os.makedirs(out_dir, exist_ok=True)
    quad = _quad(cfg)
    first = make_benchmark(cfg, cfg.alpha[0])
    columns = SERIES_COLUMNS if first.time_dependent else STEADY_COLUMNS
    if sweep and first.time_dependent:
        raise ExperimentError("shape sweeps need a steady benchmark", cfg.benchmark)
    if sweep and not cfg.sweep:
        raise ExperimentError("the config has no sweep values", cfg.benchmark)
    sink = _CsvSink(os.path.join(out_dir, cfg.output), columns)
    rows = []
    context = cfg.benchmark
    try:
        for index, alpha in enumerate(cfg.alpha):
            bench = make_benchmark(cfg, alpha)
            for base in make_points(bench.domain, cfg):
                context = f"{cfg.benchmark} alpha={alpha!r} n_bar={base.n_bar}"
                if bench.time_dependent:
                    points, _, _ = _shaped(bench, base, cfg, index, quad, threads)
                    series = evolve_benchmark(bench, points, cfg.tau, cfg.steps, quad,
                                              threads, cfg.norm_cells)
                    for n, t in enumerate(series.times):
                        row = {"benchmark": cfg.benchmark, "alpha": alpha,
                               "n_bar": base.n_bar, "step": n, "t": float(t),
                               "l2_norm": series.l2_norm[n], "max_abs": series.max_abs[n]}
                        sink.row(row)
                        rows.append(row)
                    if cfg.snapshot_every:
                        grid = evaluation_points(bench.domain)
                        for n in range(0, len(series.times), cfg.snapshot_every):
                            vals = evaluate_solution(points, series.lambdas[n], grid)
                            name = f"snapshot_a{alpha:g}_n{base.n_bar}_s{n}.csv"
                            _write_snapshot(os.path.join(out_dir, name), grid, vals)
                    continue
                for eps in (cfg.sweep if sweep else (None,)):
                    if eps is not None:
                        context = f"{cfg.benchmark} alpha={alpha!r} n_bar={base.n_bar} eps={eps!r}"
                    points, label, eps_col = _shaped(bench, base, cfg, index, quad,
                                                     threads, eps)
                    report = solve_benchmark(bench, points, quad, threads)
                    row = {"benchmark": cfg.benchmark, "alpha": alpha, "n_bar": base.n_bar,
                           "strategy": label, "eps": eps_col,
                           "rms": "" if report.rms is None else report.rms,
                           "cond2": report.cond2, "wall_time": report.wall_time}
                    sink.row(row)
                    rows.append(row)
    except Exception as exc:
        sink.failed(context)
        raise ExperimentError(str(exc), context) from exc
    finally:
        sink.close()
    return rows
