"""Decay of a bump on a square with a square hole, for several alpha.

Prints the L2 norm every 0.5 time units. Larger alpha damps the high
frequencies of the initial bump faster, so the norm drops sooner.
"""
from gimqfrac.bench.problems import diffusion_hole
from gimqfrac.bench.runner import evolve_benchmark
from gimqfrac.geometry import uniform_points
from gimqfrac.shapeparam import assign_constant

if __name__ == "__main__":
    for alpha in (0.4, 1.3, 2.0):
        bench = diffusion_hole(alpha)
        points = assign_constant(uniform_points(bench.domain, 17), 2.0)
        run = evolve_benchmark(bench, points, tau=0.01, steps=150)
        norms = "  ".join(f"{run.l2_norm[k]:.4f}" for k in range(0, 151, 50))
        print(f"alpha = {alpha}  N = {points.n_bar}  norms: {norms}")
