"""GIMQ basis function and its classical/fractional Laplacian."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import Hyp2F1Params, gamma, hyp2f1_lemma, lemma_prefactor

__all__ = ["OperatorSpec", "gimq_eval", "gimq_fraclap", "gimq_classical_lap"]


@dataclass(frozen=True)
class OperatorSpec:
    """Operator ``kappa * (-Laplacian)^(alpha/2)`` in ``dim`` dimensions.

    ``reaction`` is the coefficient c of a zeroth-order term.  In steady
    problems it enters as ``(-Lap)^(alpha/2) u + c u = f``; in time-dependent
    problems as ``u_t = -kappa (-Lap)^(alpha/2) u + c u + f``.
    """

    dim: int
    alpha: float
    kappa: float = 1.0
    reaction: float = 0.0

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not 0.0 <= self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in [0, 2], got {self.alpha}")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    @property
    def zeta(self) -> int:
        """1 for the nonlocal case (alpha < 2), 0 for the classical Laplacian."""
        return 1 - math.floor(self.alpha / 2.0)

    @property
    def fractional_constant(self) -> float:
        """Normalization constant of the hypersingular integral form."""
        if self.zeta == 0:
            raise ValueError("the integral constant is undefined at alpha = 2")
        d, a = self.dim, self.alpha
        return (
            2.0 ** (a - 1) * a * gamma((a + d) / 2.0)
            / (math.pi ** (d / 2.0) * gamma(1.0 - a / 2.0))
        )

    @property
    def prefactor(self) -> float:
        return lemma_prefactor(self.dim, self.alpha)

    @property
    def hyp_params(self) -> Hyp2F1Params:
        return Hyp2F1Params(self.dim, self.alpha)


def gimq_eval(dim: int, eps, r):
    """Basis function (1 + eps^2 r^2)^(-(d+1)/2)."""
    eps = np.asarray(eps, dtype=float)
    r = np.asarray(r, dtype=float)
    return (1.0 + (eps * r) ** 2) ** (-(dim + 1) / 2.0)


def gimq_fraclap(spec: OperatorSpec, eps, r):
    """Fractional Laplacian of the scaled GIMQ at distance r from its center.

    Translation and scaling reduce everything to the unit-shape function,
    so the result is ``prefactor * eps^alpha * 2F1(...; -eps^2 r^2)``.
    """
    eps = np.asarray(eps, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(eps <= 0):
        raise ValueError("shape parameters must be positive")
    eps, r = np.broadcast_arrays(eps, r)
    scale = np.exp(spec.alpha * np.log(eps))
    out = spec.prefactor * scale * hyp2f1_lemma(spec.hyp_params, -(eps * r) ** 2)
    return out if np.ndim(out) else float(out)


def gimq_classical_lap(dim: int, eps, r):
    """-Laplacian of the scaled GIMQ, in closed form."""
    eps = np.asarray(eps, dtype=float)
    r = np.asarray(r, dtype=float)
    q = (eps * r) ** 2
    return eps**2 * (dim + 1) * (1.0 + q) ** (-(dim + 5) / 2.0) * (dim - 3.0 * q)
