"""Exterior integrals over the complement of the domain.

Every integral here has the form

    I(x) = int_{complement} F(y) / |x - y|^(d + alpha) dy,   x in the domain,

with F either a GIMQ basis function (kernel tails) or exterior Dirichlet data.
The complement is split into axis-aligned boxes (see
:func:`gimqfrac.geometry.complement_decomposition`).  Unbounded axes are
mapped onto (0, 1] by s = 1 / (1 + |y - y0|), and each box is integrated by
adaptive subdivision with an embedded Gauss(7)-Kronrod(15) pair, tensorized
in 2D.  Integrands may be vector valued; a cell is refined until every
component meets its tolerance, which lets a whole row of the
differentiation matrix be computed in one adaptive pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import QuadPiece, complement_decomposition
from .kernel import OperatorSpec

__all__ = [
    "QuadPiece",
    "QuadConfig",
    "QuadratureError",
    "ZERO_DATA",
    "is_zero_data",
    "integrate_piece",
    "exterior_integral",
    "kernel_tail_integral",
    "kernel_tail_row",
    "boundary_data_integral",
    "wynn_epsilon",
]

# Kronrod-15 abscissae (descending, last is the midpoint) and weights, with
# the Gauss-7 weights for the even-indexed abscissae.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])  # 15 points on [-1, 1]
W_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
W_GAUSS = np.zeros(15)
W_GAUSS[1:7:2] = _WG[:3]
W_GAUSS[7] = _WG[3]
W_GAUSS[9:15:2] = _WG[2::-1]

# cells evaluated per batch; bounds memory for wide vector integrands
_BATCH_NODES = 4_000


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances for exterior quadrature.

    ``rel_tol=None`` selects the dimension default (1e-10 in 1D, 1e-8 in 2D).
    ``max_subdivisions`` caps the number of cells per complement piece.
    """

    rel_tol: float | None = None
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    presplit_levels: int = 5
    panel_length: float = 2.0
    max_panels: int = 400

    def __post_init__(self):
        if self.rel_tol is not None and not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")

    def rtol(self, dim: int) -> float:
        if self.rel_tol is not None:
            return self.rel_tol
        return 1e-10 if dim == 1 else 1e-8


class QuadratureError(RuntimeError):
    """Tolerance not met; carries the best estimate and its error bound."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


def ZERO_DATA(y, t=0.0):
    """Identically zero exterior data; exterior integrals skip it."""
    return np.zeros(len(y))


ZERO_DATA.is_zero = True


def is_zero_data(g) -> bool:
    return g is None or bool(getattr(g, "is_zero", False))


class _Axis:
    """Map between a physical axis [lo, hi] and the integration variable."""

    def __init__(self, lo: float, hi: float):
        self.lo, self.hi = lo, hi
        if math.isinf(lo) and math.isinf(hi):
            raise ValueError("doubly infinite axes are not supported")
        if math.isinf(hi):
            self.kind, self.anchor = "up", lo
        elif math.isinf(lo):
            self.kind, self.anchor = "down", hi
        else:
            self.kind, self.anchor = "finite", None

    @property
    def bounds(self) -> tuple[float, float]:
        return (self.lo, self.hi) if self.kind == "finite" else (0.0, 1.0)

    def to_physical(self, u):
        if self.kind == "finite":
            return u, np.ones_like(u)
        dist = 1.0 / u - 1.0
        y = self.anchor + dist if self.kind == "up" else self.anchor - dist
        return y, 1.0 / (u * u)

    def from_physical(self, y: float) -> float:
        if self.kind == "finite":
            return y
        return 1.0 / (1.0 + abs(y - self.anchor))


def _geometric_breaks(lo: float, hi: float, p: float, levels: int) -> list[float]:
    """Points clustering geometrically (ratio 2) toward p in [lo, hi]."""
    out = set()
    for side in (lo, hi):
        span = side - p
        if span == 0:
            continue
        for j in range(1, levels + 1):
            out.add(p + span * 0.5**j)
    if lo < p < hi:
        out.add(p)
    return sorted(b for b in out if lo < b < hi)


def _cell_rule(lo: np.ndarray, hi: np.ndarray):
    """Tensor Kronrod nodes for a batch of cells plus both weight sets."""
    ncell, dim = lo.shape
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    if dim == 1:
        nodes = mid[:, None, :] + half[:, None, :] * NODES[None, :, None]
        wk, wg = W_KRONROD, W_GAUSS
    else:
        gx, gy = np.meshgrid(NODES, NODES, indexing="ij")
        ref = np.column_stack([gx.ravel(), gy.ravel()])
        nodes = mid[:, None, :] + half[:, None, :] * ref[None, :, :]
        wk = np.outer(W_KRONROD, W_KRONROD).ravel()
        wg = np.outer(W_GAUSS, W_GAUSS).ravel()
    vol = np.prod(half, axis=1)
    return nodes, wk, wg, vol


class _Cubature:
    """Adaptive vector-valued cubature on one box in mapped coordinates.

    ``func`` maps nodes of shape (n, dim) to values of shape (n, m).  The
    initial cells come from the break lists; :meth:`refine` bisects the
    worst cells until every component meets its tolerance.
    """

    def __init__(self, func, lo, hi, breaks, max_cells):
        self.func = func
        self.dim = dim = len(lo)
        self.max_cells = max_cells
        edges = [np.array([lo[a]] + list(breaks[a]) + [hi[a]]) for a in range(dim)]
        if dim == 1:
            clo = edges[0][:-1, None]
            chi = edges[0][1:, None]
        else:
            x0, y0 = np.meshgrid(edges[0][:-1], edges[1][:-1], indexing="ij")
            x1, y1 = np.meshgrid(edges[0][1:], edges[1][1:], indexing="ij")
            clo = np.column_stack([x0.ravel(), y0.ravel()])
            chi = np.column_stack([x1.ravel(), y1.ravel()])
        self.clo, self.chi = clo, chi
        self.kval, self.kerr = self._evaluate(clo, chi)

    @property
    def ncells(self) -> int:
        return len(self.clo)

    @property
    def value(self):
        return self.kval.sum(axis=0)

    @property
    def error(self):
        return self.kerr.sum(axis=0)

    def _evaluate(self, clo, chi):
        dim = self.dim
        nodes, wk, wg, vol = _cell_rule(clo, chi)
        q = nodes.shape[1]
        weights = np.vstack([wk, wk - wg])
        per_batch = max(1, _BATCH_NODES // q)
        ks, es = [], []
        for start in range(0, len(clo), per_batch):
            sl = slice(start, start + per_batch)
            nb = nodes[sl]
            vals = self.func(nb.reshape(-1, dim)).reshape(nb.shape[0], q, -1)
            both = np.matmul(weights, vals) * vol[sl, None, None]
            ks.append(both[:, 0])
            es.append(np.abs(both[:, 1]))
        return np.concatenate(ks), np.concatenate(es)

    def refine(self, rtol, atol):
        """Subdivide until error <= max(atol, rtol |value|) componentwise."""
        dim = self.dim
        while True:
            total = self.value
            err = self.error
            if not np.all(np.isfinite(total)):
                raise QuadratureError("non-finite integrand", total, err)
            tol = np.maximum(atol, rtol * np.abs(total))
            if np.all(err <= tol):
                return total, err
            score = np.max(self.kerr / tol, axis=1)
            order = np.argsort(score)[::-1]
            cum = np.cumsum(score[order])
            nsplit = int(np.searchsorted(cum, 0.5 * cum[-1])) + 1
            split = order[:nsplit]
            grow = nsplit * (2**dim - 1)
            if self.ncells + grow > self.max_cells:
                raise QuadratureError(
                    f"tolerance not met with {self.ncells} cells", total, err
                )
            keep = np.ones(self.ncells, dtype=bool)
            keep[split] = False
            slo, shi = self.clo[split], self.chi[split]
            smid = 0.5 * (slo + shi)
            if dim == 1:
                nlo = np.vstack([slo, smid])
                nhi = np.vstack([smid, shi])
            else:
                nlo, nhi = [], []
                for bx in (0, 1):
                    for by in (0, 1):
                        nlo.append(np.column_stack([
                            slo[:, 0] if bx == 0 else smid[:, 0],
                            slo[:, 1] if by == 0 else smid[:, 1],
                        ]))
                        nhi.append(np.column_stack([
                            smid[:, 0] if bx == 0 else shi[:, 0],
                            smid[:, 1] if by == 0 else shi[:, 1],
                        ]))
                nlo, nhi = np.vstack(nlo), np.vstack(nhi)
            nk, ne = self._evaluate(nlo, nhi)
            self.clo = np.vstack([self.clo[keep], nlo])
            self.chi = np.vstack([self.chi[keep], nhi])
            self.kval = np.vstack([self.kval[keep], nk])
            self.kerr = np.vstack([self.kerr[keep], ne])


def _as_columns(values, n):
    v = np.asarray(values, dtype=float)
    return v.reshape(n, -1)


def _start_piece(func, piece: QuadPiece, focus, cfg: QuadConfig,
                 weight: Callable | None = None,
                 fresh_output: bool = False) -> _Cubature:
    # weight: optional per-point scalar factor, folded into the Jacobian;
    # fresh_output: func returns new arrays that may be scaled in place
    axes = [_Axis(lo, hi) for lo, hi in zip(piece.lo, piece.hi)]
    focus = np.ravel(np.asarray(focus, dtype=float))
    lo, hi, breaks = [], [], []
    for a, ax in enumerate(axes):
        ulo, uhi = ax.bounds
        proj = min(max(focus[a], ax.lo), ax.hi)
        lo.append(ulo)
        hi.append(uhi)
        breaks.append(_geometric_breaks(ulo, uhi, ax.from_physical(proj),
                                        cfg.presplit_levels))

    def mapped(u):
        ys, jac = [], np.ones(len(u))
        for a, ax in enumerate(axes):
            y, j = ax.to_physical(u[:, a])
            ys.append(y)
            jac = jac * j
        y = np.column_stack(ys)
        if weight is not None:
            jac = jac * weight(y)
        out = _as_columns(func(y), len(u))
        if fresh_output:
            out *= jac[:, None]
            return out
        return out * jac[:, None]

    return _Cubature(mapped, lo, hi, breaks, cfg.max_subdivisions)


def integrate_piece(func, piece: QuadPiece, focus, cfg: QuadConfig,
                    rtol: float | None = None, atol=None):
    """Integrate ``func`` over one closed box, refining toward ``focus``.

    ``func`` maps physical points (n, d) to (n,) or (n, m) values.  Returns
    (integral, error) as arrays of shape (m,).
    """
    cub = _start_piece(func, piece, focus, cfg)
    rtol = cfg.rtol(piece.dim) if rtol is None else rtol
    return cub.refine(rtol, cfg.abs_tol if atol is None else atol)


def wynn_epsilon(partial_sums: Sequence[float]) -> tuple[float, float]:
    """Wynn's epsilon extrapolation of a sequence of partial sums.

    Returns the accelerated limit and the difference between the two most
    recent accelerated estimates as an error indicator.
    """
    s = [float(v) for v in partial_sums]
    if len(s) < 3:
        return s[-1], math.inf
    prev = [0.0] * (len(s) + 1)
    cur = s[:]
    estimates = [cur[-1]]
    col = 0
    while len(cur) > 1:
        nxt = []
        for j in range(len(cur) - 1):
            diff = cur[j + 1] - cur[j]
            if diff == 0.0:
                return cur[j + 1], 0.0
            nxt.append(prev[j + 1] + 1.0 / diff)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            estimates.append(cur[-1])
    if len(estimates) < 2:
        return estimates[-1], math.inf
    return estimates[-1], abs(estimates[-1] - estimates[-2])


def _ray_panels(func, piece: QuadPiece, focus, cfg: QuadConfig, rtol: float):
    """Integrate a scalar function on a 1D ray by panels plus extrapolation.

    Meant for oscillatory data whose tail decays too slowly for the mapped
    rule.  The first panels are refined toward ``focus``; partial sums of
    consecutive panels are accelerated with the epsilon algorithm.
    """
    up = math.isinf(piece.hi[0])
    start = piece.lo[0] if up else piece.hi[0]
    sign = 1.0 if up else -1.0
    length = cfg.panel_length
    sums, acc, last = [], 0.0, None
    for j in range(cfg.max_panels):
        a = start + sign * j * length
        b = a + sign * length
        lo, hi = (a, b) if up else (b, a)
        val, _ = integrate_piece(func, QuadPiece((lo,), (hi,)), focus, cfg, rtol)
        acc += float(val[0])
        if abs(acc) > 1e12:
            raise QuadratureError("exterior data integral diverges", acc, math.inf)
        sums.append(acc)
        if j >= 6:
            est, err = wynn_epsilon(sums[-40:])
            tol = max(cfg.abs_tol, rtol * abs(est))
            if last is not None and err <= tol and abs(est - last) <= tol:
                return np.array([est]), np.array([err])
            last = est
    raise QuadratureError("panel extrapolation did not converge", acc, math.inf)


def _pieces(domain, support):
    pieces = complement_decomposition(domain)
    if support is None:
        return pieces
    out = []
    for p in pieces:
        for s in support:
            lo = tuple(max(a, b) for a, b in zip(p.lo, s.lo))
            hi = tuple(min(a, b) for a, b in zip(p.hi, s.hi))
            if all(a < b for a, b in zip(lo, hi)):
                out.append(QuadPiece(lo, hi))
    return out


def exterior_integral(domain, xk, func, alpha: float, cfg: QuadConfig | None = None,
                      support: Sequence[QuadPiece] | None = None,
                      oscillatory: bool = False, fresh_output: bool = False):
    """Integral of func(y) |xk - y|^-(d+alpha) over the domain complement.

    The tolerance applies to the sum over all complement pieces: each piece
    is first integrated on its initial cells, and the resulting total sets
    the absolute error budget shared by the pieces during refinement.

    Parameters
    ----------
    domain : geometry domain
    xk : point strictly inside the domain
    func : callable (n, d) -> (n,) or (n, m)
    alpha : float in (0, 2)
    support : optional boxes outside which ``func`` vanishes
    oscillatory : allow panel extrapolation on 1D rays when the mapped rule
        runs out of cells
    fresh_output : ``func`` returns a new array on every call, so it may be
        scaled in place

    Returns
    -------
    value, error : ndarrays of shape (m,)
    """
    cfg = cfg or QuadConfig()
    xk = np.ravel(np.asarray(xk, dtype=float))
    if not domain.contains(xk[None, :])[0]:
        raise ValueError(f"test point {xk} is not inside the domain")
    power = domain.dim + alpha

    def kernel(y):
        return np.sum((y - xk) ** 2, axis=1) ** (-0.5 * power)

    def integrand(y):
        return _as_columns(func(y), len(y)) * kernel(y)[:, None]

    pieces = _pieces(domain, support)
    if not pieces:
        return np.zeros(1), np.zeros(1)
    rtol = cfg.rtol(domain.dim)
    started = [_start_piece(func, p, xk, cfg, kernel, fresh_output) for p in pieces]
    scale = np.abs(sum(c.value for c in started))
    budget = np.maximum(cfg.abs_tol, rtol * scale / len(pieces))
    total, error = 0.0, 0.0
    for piece, cub in zip(pieces, started):
        try:
            val, err = cub.refine(rtol, budget)
        except QuadratureError:
            if not (oscillatory and domain.dim == 1 and not piece.bounded):
                raise
            val, err = _ray_panels(integrand, piece, xk, cfg, rtol)
        total = total + val
        error = error + err
    return np.atleast_1d(total), np.atleast_1d(error)


def kernel_tail_row(domain, xk, centers, eps, spec: OperatorSpec,
                    cfg: QuadConfig | None = None) -> np.ndarray:
    """Kernel-tail integrals of every basis function for one test point."""
    centers = np.asarray(centers, dtype=float).reshape(len(eps), -1)
    eps = np.asarray(eps, dtype=float)

    # 1 + eps^2 |y - c|^2 as one product [y, |y|^2, 1] @ coef
    eps2 = eps**2
    coef = np.vstack([
        -2.0 * eps2 * centers.T,
        eps2,
        1.0 + eps2 * np.sum(centers**2, axis=1),
    ])

    def basis(y):
        aug = np.column_stack([y, np.sum(y**2, axis=1), np.ones(len(y))])
        t = aug @ coef
        np.maximum(t, 1.0, out=t)
        if spec.dim == 1:
            return np.reciprocal(t, out=t)
        if spec.dim == 2:
            s = np.sqrt(t)
            s *= t
            return np.reciprocal(s, out=s)
        t *= t
        return np.reciprocal(t, out=t)

    try:
        val, _ = exterior_integral(domain, xk, basis, spec.alpha, cfg,
                                   fresh_output=True)
    except QuadratureError as exc:
        raise QuadratureError(f"kernel tail at test point {np.ravel(xk)}: {exc}",
                              exc.estimate, exc.error) from exc
    return val


def kernel_tail_integral(domain, xk, xi, eps_i: float, spec: OperatorSpec,
                         cfg: QuadConfig | None = None) -> float:
    """Integral of one GIMQ basis function against the exterior kernel."""
    if spec.zeta == 0:
        raise ValueError("kernel tails are not used for the classical Laplacian")
    if not eps_i > 0:
        raise ValueError("shape parameter must be positive")
    row = kernel_tail_row(domain, xk, np.atleast_2d(np.ravel(xi)), [eps_i], spec, cfg)
    return float(row[0])


def boundary_data_integral(domain, xk, g: Callable | None, t: float,
                           spec: OperatorSpec, cfg: QuadConfig | None = None,
                           support: Sequence[QuadPiece] | None = None) -> float:
    """Integral of exterior Dirichlet data g(., t) against the kernel.

    ``g`` takes (points (n, d), t) and returns (n,).  Zero data (``None`` or
    :data:`ZERO_DATA`) short-circuits to 0.0 without quadrature.
    """
    if is_zero_data(g):
        return 0.0
    if spec.zeta == 0:
        raise ValueError("exterior data integrals are not used for alpha = 2")
    val, _ = exterior_integral(domain, xk, lambda y: g(y, t), spec.alpha, cfg,
                               support=support, oscillatory=True)
    return float(val[0])
