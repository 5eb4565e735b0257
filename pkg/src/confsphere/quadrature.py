"""Gauss-Jacobi rules and product rules on S^n.

The polar rule integrates against (1-t^2)^{(n-2)/2}, the density of the
axial coordinate t = x0 on S^n.  Nesting it through S^{n-1}, ..., S^0
gives a product rule on the whole sphere, or on the functions of the
first ``active`` coordinates only (the remaining directions then only
contribute a volume factor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .sphere_calc import omega

__all__ = ["JacobiQuadrature", "jacobi_rule", "SphereRule", "sphere_rule", "nodes_for_degree"]


@dataclass(frozen=True)
class JacobiQuadrature:
    """Gauss rule for weight (1-t^2)^{(n-2)/2} on (-1, 1)."""

    n: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)

    def sphere_integral(self, values) -> float:
        """integral over S^n of a zonal function given by its values at the nodes."""
        return omega(self.n - 1) * float(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def jacobi_rule(n: int, size: int = 200) -> JacobiQuadrature:
    """Polar rule for S^n with ``size`` nodes; exact for degree <= 2*size - 1."""
    if n < 1:
        raise ValueError("polar rule needs n >= 1")
    a = (n - 2) / 2
    t, w = roots_jacobi(size, a, a)
    t.setflags(write=False)
    w.setflags(write=False)
    return JacobiQuadrature(n, t, w)


def nodes_for_degree(degree: int) -> int:
    return max(1, math.ceil((degree + 1) / 2))


@dataclass(frozen=True)
class SphereRule:
    """Points (first ``active`` coordinates) and weights summing to omega_n."""

    n: int
    active: int
    points: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    @property
    def size(self) -> int:
        return len(self.weights)


@lru_cache(maxsize=32)
def sphere_rule(n: int, degree: int, active: int | None = None) -> SphereRule:
    """Product rule on S^n exact for polynomials of degree <= ``degree``.

    ``active`` = p restricts to functions of x0..x_{p-1}; p = n+1 (default)
    is the full sphere.
    """
    p = n + 1 if active is None else active
    if not 0 <= p <= n + 1:
        raise ValueError("active coordinate count must lie in 0..n+1")
    m = nodes_for_degree(degree)
    pts, w = _rule(n, p, m)
    pts.setflags(write=False)
    w.setflags(write=False)
    return SphereRule(n, p, pts, w)


def _rule(n: int, p: int, m: int):
    if p == 0:
        return np.zeros((1, 0)), np.array([omega(n) if n > 0 else 2.0])
    if n == 0:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    a = (n - 2) / 2
    t, wt = roots_jacobi(m, a, a)
    sub_pts, sub_w = _rule(n - 1, p - 1, m)
    scale = np.sqrt(1.0 - t * t)
    first = np.repeat(t, len(sub_w))[:, None]
    rest = (scale[:, None, None] * sub_pts[None, :, :]).reshape(len(t) * len(sub_w), p - 1)
    return np.hstack([first, rest]), np.outer(wt, sub_w).ravel()
