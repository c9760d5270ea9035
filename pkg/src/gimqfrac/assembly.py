"""Dense collocation matrices for GIMQ expansions.

Rows of every matrix follow the point-set order: interior test points first,
boundary points after.  The differentiation matrix ``A`` has one row per
interior point; the boundary rows of ``phi`` enforce Dirichlet data.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import extquad
from .extquad import QuadConfig, QuadratureError, is_zero_data
from .geometry import PointSet, QuadPiece
from .kernel import OperatorSpec, gimq_classical_lap, gimq_eval, gimq_fraclap

__all__ = [
    "AssemblyError",
    "CollocationSystem",
    "ProblemData",
    "build_phi",
    "build_a",
    "build_b",
    "build_g_vec",
    "build_system",
    "exterior_data_vector",
    "dump_matrix",
    "load_matrix",
]


class AssemblyError(RuntimeError):
    """Quadrature failure while filling a matrix entry or load-vector row."""

    def __init__(self, message, row, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


@dataclass(frozen=True, eq=False)
class CollocationSystem:
    """Basis matrix ``phi`` (N x N) and differentiation matrix ``a_mat`` (M x N)."""

    phi: np.ndarray
    a_mat: np.ndarray

    def __post_init__(self):
        n = self.phi.shape[1]
        if self.phi.shape != (n, n):
            raise ValueError("phi must be square")
        if self.a_mat.ndim != 2 or self.a_mat.shape[1] != n:
            raise ValueError("a_mat must have as many columns as phi")
        if self.a_mat.shape[0] > n:
            raise ValueError("more interior rows than points")

    @property
    def m(self) -> int:
        return self.a_mat.shape[0]

    @property
    def n_bar(self) -> int:
        return self.phi.shape[0]

    @property
    def phi_interior(self) -> np.ndarray:
        return self.phi[: self.m]

    @property
    def phi_boundary(self) -> np.ndarray:
        return self.phi[self.m:]


def _zero(points, t=0.0):
    return np.zeros(len(points))


@dataclass(frozen=True)
class ProblemData:
    """Source, Dirichlet data and initial state of a problem.

    All callables take ``(points (n, d), t)`` and return ``(n,)`` values,
    except ``u0`` which takes points only.  ``g_exterior`` is the data on the
    whole complement and matters only for ``alpha < 2``; ``None`` means
    zero.  ``exterior_support`` lists boxes outside which ``g_exterior``
    vanishes, and ``time_invariant`` declares that ``f`` and both ``g``
    functions do not depend on t.
    """

    f: Callable = _zero
    g_boundary: Callable = _zero
    g_exterior: Callable | None = None
    u0: Callable | None = None
    exterior_support: Sequence[QuadPiece] | None = None
    time_invariant: bool = True


def _shape(points: PointSet) -> np.ndarray:
    if points.shape is None:
        raise ValueError("shape parameters have not been assigned")
    return points.shape


def _distances(x, centers):
    diff = x[:, None, :] - centers[None, :, :]
    return np.sqrt(np.sum(diff**2, axis=2))


def build_phi(points: PointSet, eval_points=None) -> np.ndarray:
    """Basis matrix with entries phi_i(|x_k - x_i|).

    ``eval_points`` defaults to the centers themselves, which gives the
    square collocation matrix with unit diagonal.
    """
    centers = points.points
    x = centers if eval_points is None else np.asarray(eval_points, dtype=float)
    return gimq_eval(points.dim, _shape(points)[None, :], _distances(x, centers))


def _map_rows(func, rows, threads):
    if threads is None or threads <= 1 or len(rows) < 2:
        return [func(k) for k in rows]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, rows))


def build_a(points: PointSet, domain, spec: OperatorSpec,
            cfg: QuadConfig | None = None, test_points=None,
            threads: int | None = None) -> np.ndarray:
    """Differentiation matrix of the fractional Laplacian, one row per test point.

    Each entry is the closed-form fractional Laplacian of the basis function
    plus, for alpha < 2, ``C * tail`` where ``tail`` is the basis function's
    integral against the kernel over the complement.  Test points default
    to the interior collocation points.

    Raises
    ------
    AssemblyError
        If a kernel-tail integral misses its tolerance; ``row`` and
        ``column`` locate the worst entry.
    """
    eps = _shape(points)
    centers = points.points
    tests = points.interior if test_points is None else np.atleast_2d(test_points)
    dist = _distances(tests, centers)
    if spec.zeta == 0:
        return gimq_classical_lap(spec.dim, eps[None, :], dist)
    amat = gimq_fraclap(spec, eps[None, :], dist)
    const = spec.fractional_constant
    cfg = cfg or QuadConfig()

    def tail_row(k):
        try:
            return extquad.kernel_tail_row(domain, tests[k], centers, eps, spec, cfg)
        except QuadratureError as exc:
            column = None
            if exc.error is not None and np.ndim(exc.error):
                column = int(np.argmax(np.abs(exc.error)))
            raise AssemblyError(f"A[{k}, {column}]: {exc}", k, column) from exc

    tails = _map_rows(tail_row, range(len(tests)), threads)
    return amat + const * np.asarray(tails)


def exterior_data_vector(points: PointSet, domain, spec: OperatorSpec,
                         data: ProblemData, t: float,
                         cfg: QuadConfig | None = None,
                         threads: int | None = None) -> np.ndarray:
    """Integrals of the exterior data against the kernel at interior points.

    Zero for alpha = 2 or zero data; no quadrature is done in either case.
    """
    if spec.zeta == 0 or is_zero_data(data.g_exterior):
        return np.zeros(points.m)

    def entry(k):
        try:
            return extquad.boundary_data_integral(
                domain, points.interior[k], data.g_exterior, t, spec, cfg,
                support=data.exterior_support)
        except QuadratureError as exc:
            raise AssemblyError(f"b[{k}]: {exc}", k) from exc

    return np.array(_map_rows(entry, range(points.m), threads), dtype=float)


def build_b(points: PointSet, domain, spec: OperatorSpec, data: ProblemData,
            t: float = 0.0, cfg: QuadConfig | None = None,
            threads: int | None = None, exterior=None) -> np.ndarray:
    """Load vector f(x_k, t) + kappa * C * (exterior data integral).

    ``exterior`` may pass a precomputed :func:`exterior_data_vector` to
    skip the quadrature.
    """
    b = np.asarray(data.f(points.interior, t), dtype=float).reshape(points.m)
    if spec.zeta == 0:
        return b
    if exterior is None:
        exterior = exterior_data_vector(points, domain, spec, data, t, cfg, threads)
    if not np.any(exterior):
        return b
    return b + spec.kappa * spec.fractional_constant * exterior


def build_g_vec(points: PointSet, data: ProblemData, t: float = 0.0) -> np.ndarray:
    """Dirichlet data at the boundary points."""
    n = points.n_bar - points.m
    if n == 0:
        return np.zeros(0)
    return np.asarray(data.g_boundary(points.boundary, t), dtype=float).reshape(n)


def build_system(points: PointSet, domain, spec: OperatorSpec,
                 cfg: QuadConfig | None = None,
                 threads: int | None = None) -> CollocationSystem:
    return CollocationSystem(build_phi(points),
                             build_a(points, domain, spec, cfg, threads=threads))


# binary matrix dump: 8 little-endian int64 header fields then float64 data
_MAGIC = int.from_bytes(b"GIMQMAT\0", "little")
_VERSION = 1


def dump_matrix(path, matrix, dim: int, m: int, n_bar: int) -> None:
    """Write a matrix as a header plus little-endian float64 values, row-major.

    Header: magic, version, rows, cols, dim, M, N, reserved.
    """
    mat = np.ascontiguousarray(matrix, dtype="<f8")
    if mat.ndim != 2:
        raise ValueError("expected a 2D matrix")
    header = np.array([_MAGIC, _VERSION, mat.shape[0], mat.shape[1], dim, m, n_bar, 0],
                      dtype="<i8")
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(mat.tobytes())


def load_matrix(path) -> tuple[np.ndarray, dict]:
    """Read a matrix written by :func:`dump_matrix`; returns (matrix, header)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    header = np.frombuffer(raw[:64], dtype="<i8")
    if len(header) != 8 or header[0] != _MAGIC:
        raise ValueError(f"{path} is not a matrix dump")
    if header[1] != _VERSION:
        raise ValueError(f"unsupported dump version {header[1]}")
    rows, cols = int(header[2]), int(header[3])
    data = np.frombuffer(raw[64:], dtype="<f8")
    if data.size != rows * cols:
        raise ValueError("truncated matrix dump")
    info = {"rows": rows, "cols": cols, "dim": int(header[4]),
            "m": int(header[5]), "n_bar": int(header[6])}
    return data.reshape(rows, cols).astype(float), info
