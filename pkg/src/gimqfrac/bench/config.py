"""Flat ``key = value`` experiment configuration.

Grammar: one ``key = value`` pair per line; ``#`` starts a comment; blank
lines are ignored.  Keys are case-sensitive and must be known.  Lists are
comma separated (``alpha = 0.6, 1, 1.5``); ranges for shape sweeps use
``start:stop:step`` with an inclusive stop.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .problems import BENCHMARKS

__all__ = ["ExperimentConfig", "ConfigError", "parse_config", "load_config"]


class ConfigError(ValueError):
    pass


_STRATEGIES = ("constant", "cond_indicated", "random")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    ``resolution`` lists grid nodes per axis; for 2D problems ``n_bar``
    may instead give approximate total point counts.  ``eps`` is a list so
    that a table can pair one shape parameter with each alpha.
    """

    benchmark: str = "poisson1d_hom"
    alpha: tuple = (1.0,)
    resolution: tuple = ()
    n_bar: tuple = ()
    strategy: str = "constant"
    eps: tuple = (1.0,)
    eps_min: float = 1.0
    eps_max: float = 5.0
    eps_start: float = 0.5
    eps_step: float = 0.25
    k_lo: float = 1e13
    k_hi: float = 1e16
    max_iters: int = 100
    sweep: tuple = ()
    s: int = 3
    x_c: float = 1.0
    kappa: float | None = None
    quad_tol: float | None = None
    tau: float = 0.005
    steps: int = 0
    norm_cells: int = 100
    snapshot_every: int = 0
    seed: int = 0
    output: str = "results.csv"

    def __post_init__(self):
        if self.benchmark not in BENCHMARKS:
            raise ConfigError(f"unknown benchmark {self.benchmark!r}")
        if self.strategy not in _STRATEGIES:
            raise ConfigError(f"strategy must be one of {_STRATEGIES}")
        if not self.alpha or any(not 0 < a <= 2 for a in self.alpha):
            raise ConfigError("alpha values must lie in (0, 2]")
        if any(e <= 0 for e in self.eps) or not self.eps:
            raise ConfigError("eps values must be positive")
        if len(self.eps) not in (1, len(self.alpha)):
            raise ConfigError("give one eps or one per alpha")
        if not 0 < self.eps_min < self.eps_max:
            raise ConfigError("need 0 < eps_min < eps_max")
        if not self.resolution and not self.n_bar:
            raise ConfigError("set resolution or n_bar")
        if any(r < 2 for r in self.resolution) or any(n < 2 for n in self.n_bar):
            raise ConfigError("point counts must be at least 2")
        if self.tau <= 0 or self.steps < 0:
            raise ConfigError("need tau > 0 and steps >= 0")
        if self.quad_tol is not None and self.quad_tol <= 0:
            raise ConfigError("quad_tol must be positive")
        if self.x_c < 1.0:
            raise ConfigError("x_c must be at least 1")

    def eps_for(self, index: int) -> float:
        return self.eps[index] if len(self.eps) > 1 else self.eps[0]

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _range(text):
    if ":" not in text:
        return _floats(text)
    start, stop, step = (float(v) for v in text.split(":"))
    if step <= 0:
        raise ConfigError("range step must be positive")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(start + k * step) for k in range(count))


def _optional_float(text):
    return None if text.lower() == "none" else float(text)


_PARSERS = {
    "benchmark": str,
    "alpha": _floats,
    "resolution": _ints,
    "n_bar": _ints,
    "strategy": str,
    "eps": _floats,
    "eps_min": float,
    "eps_max": float,
    "eps_start": float,
    "eps_step": float,
    "k_lo": float,
    "k_hi": float,
    "max_iters": int,
    "sweep": _range,
    "s": int,
    "x_c": float,
    "kappa": _optional_float,
    "quad_tol": _optional_float,
    "tau": float,
    "steps": int,
    "norm_cells": int,
    "snapshot_every": int,
    "seed": int,
    "output": str,
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat key-value format; errors name the offending line."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())
