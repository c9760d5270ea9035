"""Benchmark problems, experiment configs and the command-line driver."""
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .problems import BENCHMARKS, Benchmark, benchmark_data
from .runner import (
    ExperimentError,
    StepSeries,
    evolve_benchmark,
    make_benchmark,
    make_points,
    run_experiment,
    solve_benchmark,
)

__all__ = [
    "BENCHMARKS",
    "Benchmark",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentError",
    "StepSeries",
    "benchmark_data",
    "evolve_benchmark",
    "load_config",
    "make_benchmark",
    "make_points",
    "parse_config",
    "run_experiment",
    "solve_benchmark",
]
