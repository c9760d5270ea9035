"""Meshless collocation for fractional and classical Laplacian problems.

The basis is the generalized inverse multiquadric (1 + eps^2 r^2)^(-(d+1)/2),
whose fractional Laplacian has a closed form through the Gauss
hypergeometric function.  Fractional (alpha < 2) and classical (alpha = 2)
operators share one discretization; the nonlocal case adds integrals over
the domain complement.
"""
from .assembly import (
    AssemblyError,
    CollocationSystem,
    ProblemData,
    build_a,
    build_b,
    build_g_vec,
    build_phi,
    build_system,
)
from .extquad import QuadConfig, QuadratureError, boundary_data_integral, kernel_tail_integral
from .geometry import (
    Interval,
    LShape,
    PointSet,
    Rectangle,
    RectangleWithHole,
    evaluation_points,
    points_near_count,
    uniform_points,
)
from .kernel import OperatorSpec, gimq_classical_lap, gimq_eval, gimq_fraclap
from .shapeparam import (
    CondIndicated,
    Constant,
    RandomPerturbed,
    assign_constant,
    assign_random_perturbed,
    search_cond_indicated,
)
from .solver import (
    SolveReport,
    cn_evolve,
    condition_number_2,
    evaluate_solution,
    initial_coeffs,
    l2_norm,
    rms_error,
    solve_steady,
)

__version__ = "0.1.0"
