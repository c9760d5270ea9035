"""Shape-parameter strategies: constant, condition-number search, random."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import PointSet
from .solver import condition_number_2

__all__ = [
    "Constant",
    "CondIndicated",
    "RandomPerturbed",
    "CondSearchError",
    "XorShift64Star",
    "assign_constant",
    "assign_random_perturbed",
    "random_shapes",
    "search_cond_indicated",
]

_MASK = (1 << 64) - 1


class XorShift64Star:
    """xorshift64* generator (Vigna, 2016) with splitmix64 seeding.

    State update: x ^= x >> 12; x ^= x << 25; x ^= x >> 27 (mod 2^64), output
    x * 0x2545F4914F6CDD1D mod 2^64.  The initial state is splitmix64(seed),
    with zero replaced by a fixed odd constant.  Uniforms use the top 53
    output bits: (k + 0.5) / 2^53, which lies strictly inside (0, 1).
    """

    def __init__(self, seed: int):
        z = (int(seed) + 0x9E3779B97F4A7C15) & _MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        z ^= z >> 31
        self.state = z or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def uniform(self, n: int) -> np.ndarray:
        return np.array([((self.next_u64() >> 11) + 0.5) * 2.0**-53 for _ in range(n)])


@dataclass(frozen=True)
class Constant:
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("shape parameter must be positive")


@dataclass(frozen=True)
class CondIndicated:
    """Scan eps upward from ``eps_start`` until cond2 lands in [k_lo, k_hi]."""

    eps_start: float = 0.5
    eps_step: float = 0.25
    k_lo: float = 1e13
    k_hi: float = 1e16
    max_iters: int = 100

    def __post_init__(self):
        if not (self.eps_start > 0 and self.eps_step > 0):
            raise ValueError("eps_start and eps_step must be positive")
        if not 1 <= self.k_lo < self.k_hi:
            raise ValueError("need 1 <= k_lo < k_hi")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")

    def grid(self) -> np.ndarray:
        return self.eps_start + self.eps_step * np.arange(self.max_iters)


@dataclass(frozen=True)
class RandomPerturbed:
    """eps_i = eps_min + delta_i (eps_max - eps_min) with uniform delta_i."""

    eps_min: float
    eps_max: float
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.eps_min < self.eps_max:
            raise ValueError("need 0 < eps_min < eps_max")


class CondSearchError(RuntimeError):
    """No scanned eps gave a condition number in range; ``trace`` lists them."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def assign_constant(points: PointSet, eps: float) -> PointSet:
    Constant(eps)
    return points.with_shape(np.full(points.n_bar, float(eps)))


def random_shapes(n: int, eps_min: float, eps_max: float, seed: int) -> np.ndarray:
    RandomPerturbed(eps_min, eps_max, seed)
    delta = XorShift64Star(seed).uniform(n)
    return eps_min + delta * (eps_max - eps_min)


def assign_random_perturbed(points: PointSet, eps_min: float, eps_max: float,
                            seed: int) -> PointSet:
    """Independent uniform shape parameters in (eps_min, eps_max), reproducible by seed."""
    return points.with_shape(random_shapes(points.n_bar, eps_min, eps_max, seed))


def search_cond_indicated(assembler: Callable[[float], np.ndarray],
                          strategy: CondIndicated = CondIndicated(),
                          trace: list | None = None) -> tuple[float, float]:
    """Smallest grid eps whose matrix has cond2 within [k_lo, k_hi].

    ``assembler(eps)`` returns the square system matrix for a constant
    shape parameter.  Every scanned (eps, cond2) pair is appended to
    ``trace`` when one is given.

    Raises
    ------
    CondSearchError
        If the grid is exhausted; the error carries the scan trace.
    """
    scanned = [] if trace is None else trace
    for eps in strategy.grid():
        eps = float(eps)
        cond = condition_number_2(assembler(eps))
        scanned.append((eps, cond))
        if strategy.k_lo <= cond <= strategy.k_hi:
            return eps, cond
    raise CondSearchError(
        f"no shape parameter in [{strategy.grid()[0]}, {strategy.grid()[-1]}] gives "
        f"a condition number in [{strategy.k_lo:g}, {strategy.k_hi:g}]",
        scanned,
    )
