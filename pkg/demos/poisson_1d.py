"""Fractional Poisson problem on (-1, 1): convergence and the shape parameter.

Solves (-Lap)^(a/2) u = f with u = 0 outside the interval, where the exact
solution is (1 - x^2)_+^(a/2 + 3). Prints the RMS error and the condition
number as the grid is refined, then scans eps at a fixed grid and compares
the best constant eps with the one picked from the condition number.
"""
import numpy as np

from gimqfrac.assembly import CollocationSystem, build_a, build_phi
from gimqfrac.bench.problems import poisson1d_hom
from gimqfrac.bench.runner import solve_benchmark
from gimqfrac.geometry import Interval, uniform_points
from gimqfrac.shapeparam import assign_constant, search_cond_indicated
from gimqfrac.solver import steady_matrix

LINE = Interval(-1.0, 1.0)


def refinement(alpha, eps):
    bench = poisson1d_hom(alpha)
    print(f"alpha = {alpha}, eps = {eps}")
    for n in (5, 9, 17, 33, 65):
        report = solve_benchmark(bench, assign_constant(uniform_points(LINE, n), eps))
        print(f"  N = {n:3d}  rms = {report.rms:.3e}  cond = {report.cond2:.2e}")


def shape_scan(alpha, n):
    bench = poisson1d_hom(alpha)
    base = uniform_points(LINE, n)
    grid = np.arange(0.5, 8.01, 0.25)
    errors = [solve_benchmark(bench, assign_constant(base, e)).rms for e in grid]
    best = int(np.argmin(errors))

    def assembler(eps):
        ps = assign_constant(base, eps)
        return steady_matrix(CollocationSystem(build_phi(ps), build_a(ps, LINE, bench.spec)),
                             bench.spec)

    eps_k, cond = search_cond_indicated(assembler)
    rms_k = solve_benchmark(bench, assign_constant(base, eps_k)).rms
    print(f"alpha = {alpha}, N = {n}: best eps {grid[best]:.2f} (rms {errors[best]:.2e}), "
          f"cond-picked eps {eps_k:.2f} (rms {rms_k:.2e}, cond {cond:.1e})")


if __name__ == "__main__":
    for alpha, eps in ((0.6, 3.0), (1.0, 3.5), (2.0, 3.5)):
        refinement(alpha, eps)
    for alpha in (0.6, 1.0, 1.5, 2.0):
        shape_scan(alpha, 33)
