"""Zonal functions on S^n in closed form.

A zonal function depends only on the axial coordinate t = xi_hat . zeta.
The class here holds finite sums  sum c * t^m * (1 + r t)^s  which is
closed under d/dt, products and multiplication by polynomials in t, so
every operator below stays exact in form; only integration is numeric
(Gauss-Jacobi in t).  Bubbles ((1 + r t)/sqrt(1 - r^2))^{-p} live here.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .operators import GjmsOrder, gjms_factor_constant
from .quadrature import jacobi_rule

__all__ = [
    "ZonalFunction",
    "bubble",
    "differentiate",
    "laplace_beltrami_zonal",
    "gjms_zonal",
    "grad_inner_zonal",
    "grad_sq_zonal",
    "divergence_zonal",
    "integrate_zonal",
    "sigma1_zonal",
    "sigma2_diagonal_zonal",
    "sigma2_energy_zonal",
]

_DROP = 0.0


def _exponent(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(s).limit_denominator(10**9)


class ZonalFunction:
    """sum over terms of c * t^m * (1 + r t)^s on S^n, with |r| < 1."""

    __slots__ = ("n", "r", "terms")

    def __init__(self, n: int, r: float = 0.0, terms=None):
        if not -1.0 < r < 1.0:
            raise ValueError("need |r| < 1 so that 1 + r t stays positive")
        self.n = n
        self.r = float(r)
        merged: dict = {}
        if isinstance(terms, dict):
            items = [(c, m, s) for (m, s), c in terms.items()]
        else:
            items = list(terms or [])
        for c, m, s in items:
            m, s = int(m), _exponent(s)
            if m < 0:
                raise ValueError("t-powers must be nonnegative")
            if self.r == 0.0:
                s = Fraction(0)
            merged[(m, s)] = merged.get((m, s), 0.0) + float(c)
        self.terms = {k: c for k, c in sorted(merged.items()) if c != _DROP}

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, n: int, c: float = 1.0, r: float = 0.0) -> ZonalFunction:
        return cls(n, r, {(0, 0): c})

    @classmethod
    def polynomial(cls, n: int, coeffs, r: float = 0.0) -> ZonalFunction:
        """sum_m coeffs[m] t^m."""
        return cls(n, r, {(m, 0): c for m, c in enumerate(coeffs)})

    @classmethod
    def t_power(cls, n: int, m: int, r: float = 0.0) -> ZonalFunction:
        return cls(n, r, {(m, 0): 1.0})

    # algebra --------------------------------------------------------------
    def _join_r(self, other: ZonalFunction) -> float:
        if self.n != other.n:
            raise ValueError("zonal functions on different spheres")
        if self.r == other.r or other.is_polynomial():
            return self.r
        if self.is_polynomial():
            return other.r
        raise ValueError("zonal functions with different axial parameters r")

    def is_polynomial(self) -> bool:
        return all(s == 0 for _, s in self.terms)

    def __add__(self, other):
        if not isinstance(other, ZonalFunction):
            other = ZonalFunction.constant(self.n, float(other), self.r)
        r = self._join_r(other)
        merged = dict(self.terms)
        for key, c in other.terms.items():
            merged[key] = merged.get(key, 0.0) + c
        return ZonalFunction(self.n, r, merged)

    __radd__ = __add__

    def __neg__(self):
        return ZonalFunction(self.n, self.r, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ZonalFunction):
            return ZonalFunction(self.n, self.r, {k: c * float(other) for k, c in self.terms.items()})
        r = self._join_r(other)
        out: dict = {}
        for (m1, s1), c1 in self.terms.items():
            for (m2, s2), c2 in other.terms.items():
                key = (m1 + m2, s1 + s2)
                out[key] = out.get(key, 0.0) + c1 * c2
        return ZonalFunction(self.n, r, out)

    __rmul__ = __mul__

    def times_t(self, power: int = 1) -> ZonalFunction:
        return ZonalFunction(self.n, self.r, {(m + power, s): c for (m, s), c in self.terms.items()})

    def one_minus_t2(self) -> ZonalFunction:
        """Multiply by (1 - t^2), the squared length of grad t."""
        return self - self.times_t(2)

    # evaluation -----------------------------------------------------------
    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        base = 1.0 + self.r * t
        out = np.zeros_like(t)
        for (m, s), c in self.terms.items():
            term = c * t**m
            if s != 0:
                term = term * base ** float(s)
            out = out + term
        return out

    def on_sphere(self, axis=None):
        """Callable on ``(m, n+1)`` point arrays, t = axis . zeta (default e0)."""
        axis = np.eye(self.n + 1)[0] if axis is None else np.asarray(axis, float)

        def f(points):
            return self(np.asarray(points, float) @ axis)

        return f

    def to_json(self) -> dict:
        return {"r": self.r, "terms": [[c, m, float(s)] for (m, s), c in self.terms.items()]}

    @classmethod
    def from_json(cls, n: int, data: dict) -> ZonalFunction:
        return cls(n, data["r"], [(c, m, s) for c, m, s in data["terms"]])

    def __repr__(self):
        body = " + ".join(f"{c:.6g}*t^{m}*(1+rt)^{s}" for (m, s), c in self.terms.items())
        return f"ZonalFunction(n={self.n}, r={self.r}, {body or '0'})"


def bubble(n: int, r: float, power: float, scale: float = 1.0) -> ZonalFunction:
    """scale * ((1 + r t)/sqrt(1 - r^2))^{-power}."""
    c = scale * (1.0 - r * r) ** (power / 2.0)
    return ZonalFunction(n, r, {(0, _exponent(-power)): c})


def differentiate(f: ZonalFunction) -> ZonalFunction:
    """d/dt [t^m (1+rt)^s] = m t^{m-1} (1+rt)^s + s r t^m (1+rt)^{s-1}."""
    out: dict = {}
    for (m, s), c in f.terms.items():
        if m:
            out[(m - 1, s)] = out.get((m - 1, s), 0.0) + c * m
        if s != 0 and f.r != 0.0:
            key = (m, s - 1)
            out[key] = out.get(key, 0.0) + c * float(s) * f.r
    return ZonalFunction(f.n, f.r, out)


def laplace_beltrami_zonal(f: ZonalFunction) -> ZonalFunction:
    """(1 - t^2) f'' - n t f'."""
    d1 = differentiate(f)
    return differentiate(d1).one_minus_t2() - d1.times_t() * f.n


def gjms_zonal(f: ZonalFunction, order: GjmsOrder) -> ZonalFunction:
    if order.n != f.n:
        raise ValueError("dimension mismatch")
    v = f
    for j in range(1, order.k + 1):
        v = -laplace_beltrami_zonal(v) + v * float(gjms_factor_constant(order.n, j))
    return v


def grad_inner_zonal(f: ZonalFunction, g: ZonalFunction) -> ZonalFunction:
    """<grad f, grad g> = (1 - t^2) f' g'."""
    return (differentiate(f) * differentiate(g)).one_minus_t2()


def grad_sq_zonal(f: ZonalFunction) -> ZonalFunction:
    return grad_inner_zonal(f, f)


def divergence_zonal(h: ZonalFunction, f: ZonalFunction) -> ZonalFunction:
    """delta(h df) = <grad h, grad f> + h Delta f."""
    return grad_inner_zonal(h, f) + h * laplace_beltrami_zonal(f)


def integrate_zonal(f: ZonalFunction, nodes: int = 200) -> float:
    """omega_{n-1} * integral_{-1}^{1} f(t) (1-t^2)^{(n-2)/2} dt by Gauss-Jacobi."""
    rule = jacobi_rule(f.n, nodes)
    return rule.sphere_integral(f(rule.nodes))


def sigma1_zonal(f: ZonalFunction) -> ZonalFunction:
    n = f.n
    a = (n - 4) / 4
    f2 = f * f
    return laplace_beltrami_zonal(f2) * (-(n - 4) / 8) - grad_sq_zonal(f) + f2 * (n / 2 * a * a)


def sigma2_diagonal_zonal(f: ZonalFunction) -> ZonalFunction:
    """L_sigma2(f, f, f) for zonal f (fourth-order expression)."""
    n = f.n
    a = (n - 4) / 4
    g = grad_sq_zonal(f)
    f2 = f * f
    lap_f2 = laplace_beltrami_zonal(f2)
    out = divergence_zonal(g, f) * 0.5
    out = out - (f * laplace_beltrami_zonal(g) - divergence_zonal(lap_f2, f)) * ((n - 4) / 16)
    out = out - f * lap_f2 * ((n - 1) / 4 * a * a)
    return out + f2 * f * (n * (n - 1) / 8 * a**3)


def sigma2_energy_zonal(f: ZonalFunction, nodes: int = 200) -> float:
    """First-order Dirichlet form of the sigma_2 energy, by quadrature."""
    n = f.n
    a = (n - 4) / 4
    g = grad_sq_zonal(f)
    f2 = f * f
    integrand = g * sigma1_zonal(f) + g * g * 0.5 + f2 * g * ((n - 2) / 2 * a * a) + f2 * f2 * (
        n * (n - 1) / 8 * a**3
    )
    return integrate_zonal(integrand, nodes)
