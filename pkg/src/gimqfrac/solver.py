"""Steady solves, Crank-Nicolson stepping and error metrics."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .assembly import (
    CollocationSystem,
    ProblemData,
    build_b,
    build_g_vec,
    build_phi,
    exterior_data_vector,
)
from .extquad import QuadConfig
from .geometry import PointSet, midpoint_grid
from .kernel import OperatorSpec

__all__ = [
    "SingularSystemError",
    "SolveReport",
    "Evolution",
    "steady_matrix",
    "solve_steady",
    "initial_coeffs",
    "cn_evolve",
    "evaluate_solution",
    "rms_error",
    "condition_number_2",
    "l2_norm",
]

RESIDUAL_FACTOR = 1e-10


class SingularSystemError(np.linalg.LinAlgError):
    """Raised when a collocation matrix cannot be factored."""

    def __init__(self, message, cond=np.inf):
        super().__init__(f"{message} (condition estimate {cond:.3g})")
        self.cond = cond


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Coefficients of a solve plus diagnostics.

    ``rms`` is filled by callers that know the exact solution.  ``warning``
    is set when the residual check fails.
    """

    lambda_: np.ndarray
    cond2: float
    wall_time: float
    rms: float | None = None
    warning: str | None = None

    def with_rms(self, rms: float) -> "SolveReport":
        return SolveReport(self.lambda_, self.cond2, self.wall_time, rms, self.warning)


def _factor(matrix):
    if not np.all(np.isfinite(matrix)):
        raise SingularSystemError("matrix has non-finite entries")
    lu, piv = linalg.lu_factor(matrix, check_finite=False)
    diag = np.abs(np.diag(lu))
    if np.any(diag == 0.0):
        raise SingularSystemError("zero pivot in LU factorization")
    return lu, piv


def _residual_warning(matrix, lam, rhs):
    resid = np.max(np.abs(matrix @ lam - rhs)) if len(rhs) else 0.0
    norm = np.max(np.sum(np.abs(matrix), axis=1))
    bound = RESIDUAL_FACTOR * norm * np.max(np.abs(lam), initial=0.0)
    if resid > bound:
        return f"residual {resid:.3g} exceeds {bound:.3g}"
    return None


def steady_matrix(system: CollocationSystem, spec: OperatorSpec) -> np.ndarray:
    """Stacked square matrix [kappa A + c Phi_interior; Phi_boundary]."""
    top = spec.kappa * system.a_mat
    if spec.reaction:
        top = top + spec.reaction * system.phi_interior
    return np.vstack([top, system.phi_boundary])


def solve_steady(system: CollocationSystem, spec: OperatorSpec, b, g,
                 compute_cond: bool = True) -> SolveReport:
    """Solve kappa (-Lap)^(a/2) u + c u = f in the domain, u = g on the boundary.

    Dense LU with partial pivoting.  ``cond2`` is the SVD condition number
    of the stacked matrix (NaN when ``compute_cond`` is false).

    Raises
    ------
    SingularSystemError
        On a zero pivot or non-finite matrix.
    """
    start = time.perf_counter()
    matrix = steady_matrix(system, spec)
    rhs = np.concatenate([np.ravel(b), np.ravel(g)]).astype(float)
    if rhs.shape != (matrix.shape[0],):
        raise ValueError(f"right side has length {rhs.size}, expected {matrix.shape[0]}")
    factors = _factor(matrix)
    lam = linalg.lu_solve(factors, rhs, check_finite=False)
    warning = _residual_warning(matrix, lam, rhs)
    cond = condition_number_2(matrix) if compute_cond else float("nan")
    return SolveReport(lam, cond, time.perf_counter() - start, warning=warning)


def initial_coeffs(phi, u0_values) -> np.ndarray:
    """Coefficients that interpolate the initial state: phi @ lam = u0."""
    factors = _factor(np.asarray(phi, dtype=float))
    return linalg.lu_solve(factors, np.asarray(u0_values, dtype=float), check_finite=False)


@dataclass(eq=False)
class Evolution:
    """Coefficients at every time level of a Crank-Nicolson run."""

    times: np.ndarray
    lambdas: np.ndarray
    factorizations: int = 0
    load_evaluations: int = 0


def cn_evolve(system: CollocationSystem, points: PointSet, domain,
              spec: OperatorSpec, data: ProblemData, tau: float, n_steps: int,
              cfg: QuadConfig | None = None, lambda0=None,
              threads: int | None = None) -> Evolution:
    """Crank-Nicolson integration of u_t = -kappa (-Lap)^(a/2) u + c u + f.

    Interior rows step the collocated equation with the trapezoidal rule;
    boundary rows impose g at the new time level.  The stepping matrix is
    constant and is factored once.  With time-invariant data the load
    vector and boundary values are also computed once.
    """
    if not tau > 0:
        raise ValueError("time step must be positive")
    if n_steps < 0:
        raise ValueError("number of steps must be non-negative")
    phi_in = system.phi_interior
    oper = spec.kappa * system.a_mat
    if spec.reaction:
        oper = oper - spec.reaction * phi_in
    lhs = np.vstack([phi_in + 0.5 * tau * oper, system.phi_boundary])
    explicit = phi_in - 0.5 * tau * oper
    factors = _factor(lhs)
    run = Evolution(np.arange(n_steps + 1) * tau, np.empty((n_steps + 1, system.n_bar)),
                    factorizations=1)

    if lambda0 is None:
        if data.u0 is None:
            raise ValueError("either lambda0 or data.u0 is required")
        lambda0 = initial_coeffs(system.phi, data.u0(points.points))
    lam = np.asarray(lambda0, dtype=float)
    run.lambdas[0] = lam

    cache = {}

    def load(t):
        if data.time_invariant and "b" in cache:
            return cache["b"], cache["g"]
        ext = exterior_data_vector(points, domain, spec, data, t, cfg, threads)
        b = build_b(points, domain, spec, data, t, cfg, exterior=ext)
        g = build_g_vec(points, data, t)
        run.load_evaluations += 1
        cache["b"], cache["g"] = b, g
        return b, g

    b_now, _ = load(0.0)
    for n in range(n_steps):
        t_next = (n + 1) * tau
        b_next, g_next = load(t_next)
        rhs = np.concatenate([explicit @ lam + 0.5 * tau * (b_now + b_next), g_next])
        lam = linalg.lu_solve(factors, rhs, check_finite=False)
        run.lambdas[n + 1] = lam
        b_now = b_next
    return run


def evaluate_solution(points: PointSet, lam, eval_points) -> np.ndarray:
    """Value of sum_i lam_i phi_i at each evaluation point."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1] != points.n_bar:
        raise ValueError("coefficient vector does not match the point set")
    return build_phi(points, eval_points) @ lam.T


def rms_error(numeric, exact) -> float:
    """Root mean square of the pointwise difference."""
    numeric = np.ravel(numeric)
    exact = np.ravel(exact)
    if numeric.shape != exact.shape:
        raise ValueError("length mismatch")
    if numeric.size == 0:
        raise ValueError("need at least one value")
    return float(np.sqrt(np.mean((numeric - exact) ** 2)))


def condition_number_2(matrix) -> float:
    """Ratio of extreme singular values; infinity for a singular matrix."""
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("condition number needs a square matrix")
    sv = linalg.svd(mat, compute_uv=False)
    if sv[-1] == 0.0:
        return float("inf")
    return float(sv[0] / sv[-1])


def l2_norm(points: PointSet, lam, domain, cells: int = 100) -> np.ndarray:
    """Midpoint-rule L2 norm over the domain of the expansion(s) in ``lam``.

    ``lam`` may hold one coefficient vector or one per row.
    """
    centers, vol = midpoint_grid(domain, cells)
    vals = evaluate_solution(points, lam, centers)
    return np.sqrt(np.sum(vals**2, axis=0) * vol)
