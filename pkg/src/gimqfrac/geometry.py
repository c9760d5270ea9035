"""Domains, collocation point sets and complement decomposition.

Supported domains are an interval, an axis-aligned rectangle and a rectangle
with a closed axis-aligned rectangle removed (either a corner notch, giving
an L-shape, or an interior hole).  The complement of every domain splits
into axis-aligned boxes, some of them unbounded, which is what the exterior
quadrature in :mod:`gimqfrac.extquad` integrates over.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

__all__ = [
    "BOUNDARY_TOL",
    "QuadPiece",
    "Interval",
    "Rectangle",
    "LShape",
    "RectangleWithHole",
    "PointSet",
    "uniform_points",
    "points_near_count",
    "complement_decomposition",
    "evaluation_points",
    "midpoint_grid",
]

BOUNDARY_TOL = 1e-12

INF = np.inf


@dataclass(frozen=True)
class QuadPiece:
    """Closed axis-aligned box; any bound may be infinite."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        for a, b in zip(self.lo, self.hi):
            if not a < b:
                raise ValueError(f"empty axis [{a}, {b}]")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lo)) and np.all(np.isfinite(self.hi)))

    def contains(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((p >= np.asarray(self.lo)) & (p <= np.asarray(self.hi)), axis=1)


def _box_exterior(lo, hi) -> list[QuadPiece]:
    """Pieces covering the complement of the closed box [lo, hi]."""
    if len(lo) == 1:
        return [QuadPiece((-INF,), (lo[0],)), QuadPiece((hi[0],), (INF,))]
    (ax, ay), (bx, by) = lo, hi
    xs = [(-INF, ax), (ax, bx), (bx, INF)]
    ys = [(-INF, ay), (ay, by), (by, INF)]
    pieces = []
    for i, (x0, x1) in enumerate(xs):
        for j, (y0, y1) in enumerate(ys):
            if i == 1 and j == 1:
                continue
            pieces.append(QuadPiece((x0, y0), (x1, y1)))
    return pieces


class _Domain:
    dim: int

    @property
    def lo(self) -> tuple:
        raise NotImplementedError

    @property
    def hi(self) -> tuple:
        raise NotImplementedError

    def contains(self, points) -> np.ndarray:
        """True for points in the open domain."""
        raise NotImplementedError

    def in_closure(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        raise NotImplementedError

    def on_boundary(self, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        p = self._as_points(points)
        return self.in_closure(p, tol) & ~self._inside(p, tol)

    def complement_pieces(self) -> list[QuadPiece]:
        raise NotImplementedError

    def _as_points(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        if p.ndim == 1:
            p = p.reshape(-1, self.dim) if self.dim > 1 else p[:, None]
        return p

    def _inside(self, p, tol):
        raise NotImplementedError

    def shifted(self, offset):
        raise NotImplementedError


@dataclass(frozen=True)
class Interval(_Domain):
    a: float
    b: float
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("interval must satisfy a < b")

    @property
    def lo(self):
        return (self.a,)

    @property
    def hi(self):
        return (self.b,)

    def _inside(self, p, tol):
        x = p[:, 0]
        return (x > self.a + tol) & (x < self.b - tol)

    def contains(self, points):
        return self._inside(self._as_points(points), 0.0)

    def in_closure(self, points, tol=BOUNDARY_TOL):
        x = self._as_points(points)[:, 0]
        return (x >= self.a - tol) & (x <= self.b + tol)

    def complement_pieces(self):
        return _box_exterior(self.lo, self.hi)

    def shifted(self, offset):
        o = float(np.ravel(offset)[0])
        return Interval(self.a + o, self.b + o)


@dataclass(frozen=True)
class Rectangle(_Domain):
    ax: float
    bx: float
    ay: float
    by: float
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not (self.ax < self.bx and self.ay < self.by):
            raise ValueError("rectangle must have positive extent")

    @property
    def lo(self):
        return (self.ax, self.ay)

    @property
    def hi(self):
        return (self.bx, self.by)

    def _inside(self, p, tol):
        return (
            (p[:, 0] > self.ax + tol) & (p[:, 0] < self.bx - tol)
            & (p[:, 1] > self.ay + tol) & (p[:, 1] < self.by - tol)
        )

    def contains(self, points):
        return self._inside(self._as_points(points), 0.0)

    def in_closure(self, points, tol=BOUNDARY_TOL):
        p = self._as_points(points)
        return (
            (p[:, 0] >= self.ax - tol) & (p[:, 0] <= self.bx + tol)
            & (p[:, 1] >= self.ay - tol) & (p[:, 1] <= self.by + tol)
        )

    def complement_pieces(self):
        return _box_exterior(self.lo, self.hi)

    def shifted(self, offset):
        ox, oy = np.ravel(offset)
        return Rectangle(self.ax + ox, self.bx + ox, self.ay + oy, self.by + oy)


@dataclass(frozen=True)
class _RectMinusRect(_Domain):
    """Open rectangle ``outer`` with the closed rectangle ``removed`` cut out."""

    outer: Rectangle
    removed: Rectangle
    dim: int = field(default=2, init=False)

    @property
    def lo(self):
        return self.outer.lo

    @property
    def hi(self):
        return self.outer.hi

    def _removed_open_extended(self, p, tol):
        # Sides of the removed box lying on the outer boundary are pushed out
        # to infinity, so the closure of the domain excludes them as well.
        o, r = self.outer, self.removed
        x0 = -INF if r.ax <= o.ax else r.ax
        x1 = INF if r.bx >= o.bx else r.bx
        y0 = -INF if r.ay <= o.ay else r.ay
        y1 = INF if r.by >= o.by else r.by
        return (
            (p[:, 0] > x0 + tol) & (p[:, 0] < x1 - tol)
            & (p[:, 1] > y0 + tol) & (p[:, 1] < y1 - tol)
        )

    def _inside(self, p, tol):
        return self.outer._inside(p, tol) & ~self.removed.in_closure(p, tol)

    def contains(self, points):
        return self._inside(self._as_points(points), 0.0)

    def in_closure(self, points, tol=BOUNDARY_TOL):
        p = self._as_points(points)
        return self.outer.in_closure(p, tol) & ~self._removed_open_extended(p, tol)

    def complement_pieces(self):
        o, r = self.outer, self.removed
        inner = QuadPiece(
            (max(o.ax, r.ax), max(o.ay, r.ay)), (min(o.bx, r.bx), min(o.by, r.by))
        )
        return [inner] + _box_exterior(o.lo, o.hi)

    def shifted(self, offset):
        return type(self)(self.outer.shifted(offset), self.removed.shifted(offset))


class LShape(_RectMinusRect):
    """Rectangle minus a closed corner rectangle, e.g. (-1,1)^2 minus [0,1)^2."""

    def __init__(self, outer: Rectangle = Rectangle(-1.0, 1.0, -1.0, 1.0),
                 notch: Rectangle = Rectangle(0.0, 1.0, 0.0, 1.0)):
        o, n = outer, notch
        touches_x = np.isclose(n.ax, o.ax) or np.isclose(n.bx, o.bx)
        touches_y = np.isclose(n.ay, o.ay) or np.isclose(n.by, o.by)
        inside = o.ax <= n.ax and n.bx <= o.bx and o.ay <= n.ay and n.by <= o.by
        spans = (n.ax <= o.ax and n.bx >= o.bx) or (n.ay <= o.ay and n.by >= o.by)
        if not (inside and touches_x and touches_y) or spans:
            raise ValueError("notch must be a proper corner sub-rectangle of outer")
        super().__init__(outer, notch)

    @property
    def notch(self) -> Rectangle:
        return self.removed


class RectangleWithHole(_RectMinusRect):
    """Rectangle with a closed rectangular hole strictly inside it."""

    def __init__(self, outer: Rectangle, hole: Rectangle):
        if not (outer.ax < hole.ax and hole.bx < outer.bx
                and outer.ay < hole.ay and hole.by < outer.by):
            raise ValueError("hole must lie strictly inside the outer rectangle")
        super().__init__(outer, hole)

    @property
    def hole(self) -> Rectangle:
        return self.removed


def complement_decomposition(domain) -> list[QuadPiece]:
    """Axis-aligned closed boxes whose union is the complement of ``domain``."""
    return domain.complement_pieces()


@dataclass(frozen=True, eq=False)
class PointSet:
    """Collocation points: interior points first, then boundary points.

    ``shape`` holds one positive shape parameter per point in the
    concatenated order, or ``None`` before a strategy assigns it.
    """

    interior: np.ndarray
    boundary: np.ndarray
    shape: np.ndarray | None = None

    def __post_init__(self):
        interior = np.atleast_2d(np.asarray(self.interior, dtype=float))
        boundary = np.asarray(self.boundary, dtype=float)
        if boundary.size == 0:
            boundary = boundary.reshape(0, interior.shape[1] if interior.size else 1)
        boundary = np.atleast_2d(boundary)
        if interior.size == 0:
            interior = interior.reshape(0, boundary.shape[1])
        if interior.shape[1] != boundary.shape[1]:
            raise ValueError("interior and boundary points differ in dimension")
        object.__setattr__(self, "interior", interior)
        object.__setattr__(self, "boundary", boundary)
        allp = np.vstack([interior, boundary])
        if len(np.unique(allp, axis=0)) != len(allp):
            raise ValueError("duplicate collocation points")
        if self.shape is not None:
            shape = np.asarray(self.shape, dtype=float).reshape(-1)
            if shape.shape != (len(allp),):
                raise ValueError(
                    f"expected {len(allp)} shape parameters, got {shape.shape[0]}"
                )
            if np.any(~(shape > 0)):
                raise ValueError("shape parameters must be positive")
            object.__setattr__(self, "shape", shape)

    @property
    def dim(self) -> int:
        return self.interior.shape[1]

    @property
    def m(self) -> int:
        return len(self.interior)

    @property
    def n_bar(self) -> int:
        return len(self.interior) + len(self.boundary)

    @property
    def points(self) -> np.ndarray:
        return np.vstack([self.interior, self.boundary])

    def with_shape(self, shape) -> "PointSet":
        return replace(self, shape=np.asarray(shape, dtype=float))

    def shifted(self, offset) -> "PointSet":
        o = np.asarray(offset, dtype=float).reshape(1, -1)
        return PointSet(self.interior + o, self.boundary + o, self.shape)

    def to_csv(self, path) -> None:
        """Write ``x[,y],role,epsilon`` rows (epsilon empty when unset)."""
        names = ["x", "y", "z"][: self.dim]
        roles = ["interior"] * self.m + ["boundary"] * (self.n_bar - self.m)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names + ["role", "epsilon"])
            for k, (p, role) in enumerate(zip(self.points, roles)):
                eps = "" if self.shape is None else repr(float(self.shape[k]))
                w.writerow([repr(float(c)) for c in p] + [role, eps])

    @classmethod
    def from_csv(cls, path) -> "PointSet":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        dim = header.index("role")
        coords = np.array([[float(v) for v in r[:dim]] for r in body]).reshape(-1, dim)
        role = np.array([r[dim] for r in body])
        eps = [r[dim + 1] for r in body]
        inner = role == "interior"
        shape = None
        if all(eps):
            e = np.array([float(v) for v in eps])
            shape = np.concatenate([e[inner], e[~inner]])
        return cls(coords[inner], coords[~inner], shape)


def _grid(domain, resolution: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(domain.lo, domain.hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def uniform_points(domain, resolution: int) -> PointSet:
    """Equispaced grid with ``resolution`` nodes per axis of the bounding box.

    Grid nodes outside the closed domain are dropped; nodes on the boundary
    within ``BOUNDARY_TOL`` are classified as boundary points.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    grid = _grid(domain, resolution)
    grid = grid[domain.in_closure(grid)]
    bnd = domain.on_boundary(grid)
    if not np.any(~bnd):
        raise ValueError(f"resolution {resolution} gives no interior points")
    return PointSet(grid[~bnd], grid[bnd])


def _grid_aligned(domain, resolution: int) -> bool:
    removed = getattr(domain, "removed", None)
    if removed is None:
        return True
    for lo, hi, edges in ((domain.lo[0], domain.hi[0], (removed.ax, removed.bx)),
                          (domain.lo[1], domain.hi[1], (removed.ay, removed.by))):
        h = (hi - lo) / (resolution - 1)
        for e in edges:
            if lo < e < hi:
                k = (e - lo) / h
                if abs(k - round(k)) > 1e-9:
                    return False
    return True


def points_near_count(domain, target: int, max_resolution: int = 200) -> PointSet:
    """Uniform point set whose total count is closest to ``target``.

    Only resolutions whose grid lines pass through the edges of a removed
    rectangle are considered, so inner boundaries always carry points.
    """
    best = None
    for res in range(3, max_resolution + 1):
        if not _grid_aligned(domain, res):
            continue
        try:
            ps = uniform_points(domain, res)
        except ValueError:
            continue
        if best is None or abs(ps.n_bar - target) < abs(best.n_bar - target):
            best = ps
        if ps.n_bar > target:
            break
    if best is None:
        raise ValueError("could not generate a point set")
    return best


def evaluation_points(domain, n: int | None = None) -> np.ndarray:
    """Dense points in the closed domain for error measurement.

    Defaults: 1000 equispaced points in 1D, a 101 x 101 grid clipped to the
    closed domain in 2D.
    """
    if domain.dim == 1:
        return np.linspace(domain.a, domain.b, n or 1000)[:, None]
    grid = _grid(domain, n or 101)
    return grid[domain.in_closure(grid)]


def midpoint_grid(domain, cells: int = 100) -> tuple[np.ndarray, float]:
    """Cell centers inside the domain and the common cell volume.

    Suitable for midpoint-rule integrals over the domain.
    """
    edges = [np.linspace(lo, hi, cells + 1) for lo, hi in zip(domain.lo, domain.hi)]
    centers = [0.5 * (e[1:] + e[:-1]) for e in edges]
    mesh = np.meshgrid(*centers, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    vol = float(np.prod([e[1] - e[0] for e in edges]))
    return pts[domain.contains(pts)], vol
