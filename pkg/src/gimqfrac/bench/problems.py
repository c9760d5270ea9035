"""Benchmark problems with known data and, where available, exact solutions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..assembly import ProblemData
from ..extquad import ZERO_DATA
from ..geometry import Interval, LShape, QuadPiece, Rectangle, RectangleWithHole
from ..kernel import OperatorSpec
from ..specfun import gamma, hyp1f1_elliptic, hyp1f2

__all__ = ["Benchmark", "BENCHMARKS", "benchmark_data"]


@dataclass(frozen=True)
class Benchmark:
    """A problem instance: domain, operator, data and optional exact solution."""

    id: str
    domain: object
    spec: OperatorSpec
    data: ProblemData
    exact: Callable | None = None
    time_dependent: bool = False


def _poisson_hom_forcing(alpha: float, s: int) -> Callable:
    # 2F1((a+1)/2, -s; 1/2; x^2) terminates after s + 1 terms
    a = (alpha + 1.0) / 2.0
    coeffs = [1.0]
    for n in range(s):
        coeffs.append(coeffs[-1] * (a + n) * (n - s) / ((0.5 + n) * (n + 1)))
    scale = (2.0**alpha * gamma(a) * gamma(s + 1.0 + alpha / 2.0)
             / (math.sqrt(math.pi) * gamma(s + 1.0)))

    def f(x, t=0.0):
        x2 = np.asarray(x, dtype=float)[:, 0] ** 2
        return scale * np.polynomial.polynomial.polyval(x2, coeffs)

    return f


def poisson1d_hom(alpha: float, s: int = 3) -> Benchmark:
    """Fractional Poisson problem on (-1, 1) with u = (1 - x^2)_+^(s + alpha/2)."""
    if int(s) != s or s < 0:
        raise ValueError("s must be a non-negative integer")
    power = s + alpha / 2.0

    def exact(x, t=0.0):
        x = np.asarray(x, dtype=float)[:, 0]
        return np.clip(1.0 - x * x, 0.0, None) ** power

    data = ProblemData(f=_poisson_hom_forcing(alpha, int(s)), g_exterior=ZERO_DATA)
    return Benchmark("poisson1d_hom", Interval(-1.0, 1.0), OperatorSpec(1, alpha),
                     data, exact)


def _sinc_solution(x, t=0.0):
    x = np.asarray(x, dtype=float)[:, 0]
    return math.sqrt(2.0 / math.pi) * np.sinc(x / math.pi)


def poisson1d_sinc(alpha: float) -> Benchmark:
    """Poisson problem on (-1, 1) with u = sqrt(2/pi) sin(x)/x on the whole line.

    The forcing is the fractional Laplacian of u, a 1F2 series in -x^2/4
    (equivalently sqrt(2/pi) * int_0^1 xi^alpha cos(xi x) dxi).
    """
    a = (alpha + 1.0) / 2.0
    scale = math.sqrt(2.0) / ((1.0 + alpha) * math.sqrt(math.pi))

    def f(x, t=0.0):
        x = np.asarray(x, dtype=float)[:, 0]
        return scale * hyp1f2(a, a + 1.0, 0.5, -0.25 * x * x)

    data = ProblemData(f=f, g_boundary=_sinc_solution, g_exterior=_sinc_solution)
    return Benchmark("poisson1d_sinc", Interval(-1.0, 1.0), OperatorSpec(1, alpha),
                     data, _sinc_solution)


def _gauss(x, t=0.0):
    return np.exp(-np.sum(np.asarray(x, dtype=float) ** 2, axis=1))


def elliptic_lshape(alpha: float) -> Benchmark:
    """(-Lap)^(a/2) u + 2u = f on the L-shape with u = exp(-|x|^2) everywhere."""
    if not 0.0 < alpha <= 2.0:
        raise ValueError("alpha must lie in (0, 2]")
    scale = 2.0**alpha * gamma(1.0 + alpha / 2.0)

    def f(x, t=0.0):
        r2 = np.sum(np.asarray(x, dtype=float) ** 2, axis=1)
        return scale * hyp1f1_elliptic(alpha, r2) + 2.0 * np.exp(-r2)

    data = ProblemData(f=f, g_boundary=_gauss, g_exterior=_gauss)
    return Benchmark("elliptic_lshape", LShape(), OperatorSpec(2, alpha, reaction=2.0),
                     data, _gauss)


def diffusion_hole(alpha: float, kappa: float = 0.5) -> Benchmark:
    """Diffusion with zero data on (-2, 2)^2 minus [0.5, 1.5]^2 from 3 exp(-10|x|^4)."""
    domain = RectangleWithHole(Rectangle(-2.0, 2.0, -2.0, 2.0),
                               Rectangle(0.5, 1.5, 0.5, 1.5))

    def u0(x):
        r2 = np.sum(np.asarray(x, dtype=float) ** 2, axis=1)
        return 3.0 * np.exp(-10.0 * r2 * r2)

    data = ProblemData(g_exterior=ZERO_DATA, u0=u0)
    return Benchmark("diffusion_hole", domain, OperatorSpec(2, alpha, kappa=kappa),
                     data, time_dependent=True)


def heat_stripe(alpha: float, x_c: float = 1.0, kappa: float = 1.0) -> Benchmark:
    """u_t = -kappa (-Lap)^(a/2) u + u on (-1, 1)^2, u(0) = 0.

    The Dirichlet data is sin(pi (x - x_c + 1/2)) sin(pi (y + 1) / 2) on the
    closed stripe [x_c, x_c + 1/4] x [-1, 1] and zero elsewhere.
    """
    if x_c < 1.0:
        raise ValueError("the stripe must lie outside the domain (x_c >= 1)")
    x_hi = x_c + 0.25

    def g(x, t=0.0):
        x = np.asarray(x, dtype=float)
        inside = (x[:, 0] >= x_c) & (x[:, 0] <= x_hi) & (np.abs(x[:, 1]) <= 1.0)
        val = np.sin(np.pi * (x[:, 0] - x_c + 0.5)) * np.sin(0.5 * np.pi * (x[:, 1] + 1.0))
        return np.where(inside, val, 0.0)

    data = ProblemData(g_boundary=g, g_exterior=g, u0=lambda x: np.zeros(len(x)),
                       exterior_support=[QuadPiece((x_c, -1.0), (x_hi, 1.0))])
    return Benchmark("heat_stripe", Rectangle(-1.0, 1.0, -1.0, 1.0),
                     OperatorSpec(2, alpha, kappa=kappa, reaction=1.0),
                     data, time_dependent=True)


BENCHMARKS = {
    "poisson1d_hom": (1, poisson1d_hom),
    "poisson1d_sinc": (1, poisson1d_sinc),
    "elliptic_lshape": (2, elliptic_lshape),
    "diffusion_hole": (2, diffusion_hole),
    "heat_stripe": (2, heat_stripe),
}


def benchmark_data(id: str, alpha: float, d: int | None = None, **params) -> Benchmark:
    """Look up a benchmark by name; ``params`` go to its constructor (s, x_c, kappa)."""
    if id not in BENCHMARKS:
        raise KeyError(f"unknown benchmark {id!r}; choose from {sorted(BENCHMARKS)}")
    dim, make = BENCHMARKS[id]
    if d is not None and d != dim:
        raise ValueError(f"{id} is a {dim}D benchmark, not {d}D")
    return make(alpha, **params)
