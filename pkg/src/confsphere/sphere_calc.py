"""Exact calculus on the round unit sphere S^n inside R^{n+1}.

A :class:`SphereFunction` is a polynomial function restricted to |x| = 1.
It is stored through a unique representative modulo the relation
|x|^2 = 1 (the remainder of division by |x|^2 - 1 in lex order with x0
largest, so x0 appears to degree at most one).  The harmonic expansion
sum_l h_l, with h_l harmonic and homogeneous of degree l, is computed
from that representative on demand and cached.

Sign conventions: ``laplace_beltrami`` has nonpositive spectrum,
-Delta h_l = l(l+n-1) h_l, and the divergence satisfies
integral(u * delta X) = -integral(<grad u, X>).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exact_poly import AmbientPoly, DimensionMismatch, _context, format_rational, _to_fmpq

__all__ = [
    "SphereFunction",
    "SphereIntegral",
    "omega",
    "reduce",
    "harmonic_decomposition",
    "laplace_beltrami",
    "laplace_beltrami_spectral",
    "grad_inner",
    "divergence_term",
    "integrate",
    "integrate_spectral",
    "multiply",
    "monomial_moment",
]


def omega(n: int) -> float:
    """Volume of the unit n-sphere, 2 pi^{(n+1)/2} / Gamma((n+1)/2)."""
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


@lru_cache(maxsize=None)
def _sphere_relation(n: int):
    return (AmbientPoly.norm_squared(n) - 1).raw


def _normal_form(p: AmbientPoly) -> AmbientPoly:
    _, r = divmod(p.raw, _sphere_relation(p.n))
    return AmbientPoly(p.n, r)


def harmonic_decomposition(p: AmbientPoly, degree: int | None = None) -> dict:
    """Write homogeneous ``p`` of degree m as sum_j |x|^{2j} h_{m-2j}.

    Returns ``{m - 2j: h_{m-2j}}`` (zero pieces omitted).  Each harmonic
    part comes from the closed projection
    h = sum_j c_j |x|^{2j} Lap^j p,  c_{j+1} = -c_j / (2(j+1)(N + 2m - 4 - 2j)),
    with N = n+1 variables; the remainder is then divided by |x|^2 exactly.
    """
    n = p.n
    nvars = n + 1
    m = p.degree if degree is None else degree
    if not p.is_homogeneous():
        raise ValueError("harmonic_decomposition needs a homogeneous polynomial")
    r2 = AmbientPoly.norm_squared(n).raw
    ctx = _context(n)
    out = {}
    rest = p.raw
    while not rest.is_zero():
        acc = rest
        lap = rest
        power = ctx.constant(1)
        c = Fraction(1)
        j = 0
        while True:
            lap = AmbientPoly(n, lap).laplacian().raw
            if lap.is_zero():
                break
            c = -c / (2 * (j + 1) * (nvars + 2 * m - 4 - 2 * j))
            j += 1
            power = power * r2
            acc = acc + _to_fmpq(c) * power * lap
        if not acc.is_zero():
            out[m] = AmbientPoly(n, acc)
        q, r = divmod(rest - acc, r2)
        if not r.is_zero():  # pragma: no cover - guarded by the projection identity
            raise ArithmeticError("harmonic projection left a non-divisible remainder")
        rest = q
        m -= 2
    return out


class SphereFunction:
    """Polynomial function on S^n, compared and hashed by its restriction."""

    __slots__ = ("n", "_rep", "_components")

    def __init__(self, n: int, rep: AmbientPoly, *, _normalized: bool = False):
        if rep.n != n:
            raise DimensionMismatch(f"dimension {n} vs {rep.n}")
        self.n = n
        self._rep = rep if _normalized else _normal_form(rep)
        self._components = None

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, n: int, c) -> SphereFunction:
        return cls(n, AmbientPoly.constant(n, c), _normalized=True)

    @classmethod
    def zero(cls, n: int) -> SphereFunction:
        return cls(n, AmbientPoly.zero(n), _normalized=True)

    @classmethod
    def coordinate(cls, n: int, i: int) -> SphereFunction:
        return cls(n, AmbientPoly.coordinate(n, i), _normalized=True)

    @classmethod
    def parse(cls, n: int, text: str) -> SphereFunction:
        return reduce(AmbientPoly.parse(n, text))

    @classmethod
    def from_components(cls, n: int, components) -> SphereFunction:
        """Assemble from ``{l: h_l}`` or ``[(l, h_l), ...]``, checking each h_l."""
        items = components.items() if isinstance(components, dict) else components
        total = AmbientPoly.zero(n)
        seen = set()
        for l, h in items:
            if l in seen:
                raise ValueError(f"two components of degree {l}")
            seen.add(l)
            if isinstance(h, str):
                h = AmbientPoly.parse(n, h)
            if h.is_zero():
                continue
            if not h.is_homogeneous(l):
                raise ValueError(f"component of degree {l} is not homogeneous of that degree")
            if not h.laplacian().is_zero():
                raise ValueError(f"component of degree {l} is not harmonic")
            total = total + h
        return cls(n, total)

    # views ----------------------------------------------------------------
    @property
    def representative(self) -> AmbientPoly:
        """Unique representative with x0-degree at most one."""
        return self._rep

    @property
    def components(self) -> dict:
        """Harmonic expansion ``{l: h_l}`` in increasing degree."""
        if self._components is None:
            comps: dict = {}
            for d, part in self._rep.homogeneous_parts().items():
                for l, h in harmonic_decomposition(part, d).items():
                    comps[l] = comps[l] + h if l in comps else h
            self._components = {l: h for l, h in sorted(comps.items()) if not h.is_zero()}
        return self._components

    def ambient(self) -> AmbientPoly:
        """Harmonic ambient representative sum_l h_l."""
        total = AmbientPoly.zero(self.n)
        for h in self.components.values():
            total = total + h
        return total

    def component(self, l: int) -> SphereFunction:
        h = self.components.get(l)
        return SphereFunction.zero(self.n) if h is None else SphereFunction(self.n, h)

    @property
    def degree(self) -> int:
        """Largest harmonic degree present; -1 for zero."""
        return self._rep.degree

    def is_zero(self) -> bool:
        return self._rep.is_zero()

    def is_constant(self) -> bool:
        return self._rep.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("function is not constant")
        return self._rep.constant_term()

    def evaluate(self, points) -> np.ndarray:
        return self._rep.evaluate(points)

    # arithmetic -----------------------------------------------------------
    def _check(self, other: SphereFunction):
        if self.n != other.n:
            raise DimensionMismatch(f"dimension {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, SphereFunction):
            self._check(other)
            return SphereFunction(self.n, self._rep + other._rep, _normalized=True)
        return SphereFunction(self.n, self._rep + other, _normalized=True)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, SphereFunction):
            self._check(other)
            return SphereFunction(self.n, self._rep - other._rep, _normalized=True)
        return SphereFunction(self.n, self._rep - other, _normalized=True)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return SphereFunction(self.n, -self._rep, _normalized=True)

    def __mul__(self, other):
        if isinstance(other, SphereFunction):
            return multiply(self, other)
        return SphereFunction(self.n, self._rep * other, _normalized=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return SphereFunction(self.n, self._rep / other, _normalized=True)

    def __pow__(self, e: int):
        out = SphereFunction.constant(self.n, 1)
        for _ in range(e):
            out = multiply(out, self)
        return out

    def __eq__(self, other):
        if isinstance(other, SphereFunction):
            return self.n == other.n and self._rep == other._rep
        if isinstance(other, (int, Fraction)):
            return self._rep == other
        return NotImplemented

    def __hash__(self):
        return hash(self._rep)

    # serialization --------------------------------------------------------
    def to_pairs(self) -> list:
        """``[[l, "polynomial text"], ...]`` over the harmonic components."""
        return [[l, str(h)] for l, h in self.components.items()]

    @classmethod
    def from_pairs(cls, n: int, pairs) -> SphereFunction:
        return cls.from_components(n, [(int(l), AmbientPoly.parse(n, t)) for l, t in pairs])

    def __str__(self):
        return str(self._rep)

    def __repr__(self):
        return f"SphereFunction(n={self.n}, {self._rep})"


@dataclass(frozen=True)
class SphereIntegral:
    """Exact value ``coefficient * omega_n``."""

    n: int
    coefficient: Fraction

    @property
    def value(self) -> float:
        return float(self.coefficient) * omega(self.n)

    def __float__(self):
        return self.value

    def _other(self, other):
        if isinstance(other, SphereIntegral):
            if other.n != self.n:
                raise DimensionMismatch(f"dimension {self.n} vs {other.n}")
            return other.coefficient
        if other == 0:
            return Fraction(0)
        return NotImplemented

    def __add__(self, other):
        c = self._other(other)
        return NotImplemented if c is NotImplemented else SphereIntegral(self.n, self.coefficient + c)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._other(other)
        return NotImplemented if c is NotImplemented else SphereIntegral(self.n, self.coefficient - c)

    def __neg__(self):
        return SphereIntegral(self.n, -self.coefficient)

    def __mul__(self, scalar):
        return SphereIntegral(self.n, self.coefficient * Fraction(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SphereIntegral(self.n, self.coefficient / Fraction(scalar))

    def __str__(self):
        return f"{format_rational(self.coefficient)} * omega_{self.n}"


# ---------------------------------------------------------------------------
# operations


def reduce(p: AmbientPoly) -> SphereFunction:
    """Restriction of an ambient polynomial to the sphere."""
    return SphereFunction(p.n, p)


def multiply(u: SphereFunction, v: SphereFunction) -> SphereFunction:
    u._check(v)
    return SphereFunction(u.n, u.representative * v.representative)


def laplace_beltrami(f: SphereFunction) -> SphereFunction:
    """Delta f = (flat Laplacian - E(E + n - 1)) F on |x| = 1, E the Euler operator.

    Valid for any extension F; the representative's x0-degree is not raised,
    so no re-normalization is needed.
    """
    F = f.representative
    EF = F.euler()
    out = F.laplacian() - EF.euler() - (f.n - 1) * EF
    return SphereFunction(f.n, out, _normalized=True)


def laplace_beltrami_spectral(f: SphereFunction) -> SphereFunction:
    """Delta through the harmonic expansion: h_l -> -l(l+n-1) h_l."""
    n = f.n
    total = AmbientPoly.zero(n)
    for l, h in f.components.items():
        total = total + (-l * (l + n - 1)) * h
    return SphereFunction(n, total)


def grad_inner(u: SphereFunction, v: SphereFunction) -> SphereFunction:
    """Round-metric pairing <grad u, grad v>."""
    u._check(v)
    U, V = u.representative, v.representative
    return SphereFunction(u.n, U.dot_gradients(V) - U.euler() * V.euler())


def divergence_term(f: SphereFunction, u: SphereFunction) -> SphereFunction:
    """delta(f du) = <grad f, grad u> + f Delta u."""
    return grad_inner(f, u) + multiply(f, laplace_beltrami(u))


@lru_cache(maxsize=200_000)
def monomial_moment(alpha: tuple) -> Fraction:
    """integral over S^n of x^alpha, divided by omega_n (n = len(alpha) - 1)."""
    if any(a % 2 for a in alpha):
        return Fraction(0)
    nvars = len(alpha)
    num = 1
    for a in alpha:
        for k in range(a - 1, 0, -2):
            num *= k
    den = 1
    for i in range(sum(alpha) // 2):
        den *= nvars + 2 * i
    return Fraction(num, den)


def integrate(f: SphereFunction) -> SphereIntegral:
    """Exact integral, monomial by monomial on the stored representative."""
    total = Fraction(0)
    for alpha, c in f.representative.terms().items():
        if c and not any(a % 2 for a in alpha):
            total += c * monomial_moment(alpha)
    return SphereIntegral(f.n, total)


def integrate_spectral(f: SphereFunction) -> SphereIntegral:
    """Exact integral as the degree-0 harmonic coefficient."""
    h0 = f.components.get(0)
    return SphereIntegral(f.n, Fraction(0) if h0 is None else h0.constant_term())
