"""Exact multivariate polynomials in the ambient coordinates x0, ..., xn.

Coefficients are exact rationals.  Values are immutable; every operation
returns a new polynomial.  Storage is sparse (FLINT ``fmpq_mpoly`` in lex
order with x0 largest), which also gives a fast exact division by the
sphere relation used in :mod:`confsphere.sphere_calc`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import flint
import numpy as np

__all__ = [
    "AmbientPoly",
    "DimensionMismatch",
    "add",
    "mul",
    "ambient_laplacian",
    "ambient_gradient",
    "parse_rational",
    "format_rational",
]


class DimensionMismatch(ValueError):
    """Raised when polynomials on spheres of different dimension are combined."""


@lru_cache(maxsize=None)
def _context(n: int):
    return flint.fmpq_mpoly_ctx.get((("x", n + 1)), "lex")


def _to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, int):
        return flint.fmpq(c)
    if isinstance(c, Rational):
        return flint.fmpq(int(c.numerator), int(c.denominator))
    if isinstance(c, str):
        f = parse_rational(c)
        return flint.fmpq(f.numerator, f.denominator)
    raise TypeError(f"not an exact rational: {c!r}")


def _to_fraction(c: flint.fmpq) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def parse_rational(text: str) -> Fraction:
    """Parse an exact literal ``p`` or ``p/q``; decimals are refused."""
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f"not an exact rational literal: {text!r}")
    return Fraction(text)


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class AmbientPoly:
    """Polynomial over Q in the n+1 coordinates of R^{n+1} (sphere dimension n)."""

    __slots__ = ("n", "_p")

    def __init__(self, n: int, raw=None):
        if n < 1:
            raise ValueError("sphere dimension must be positive")
        self.n = n
        self._p = raw if raw is not None else _context(n).from_dict({})

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> AmbientPoly:
        return cls(n)

    @classmethod
    def constant(cls, n: int, c) -> AmbientPoly:
        return cls(n, _context(n).constant(_to_fmpq(c)))

    @classmethod
    def one(cls, n: int) -> AmbientPoly:
        return cls.constant(n, 1)

    @classmethod
    def coordinate(cls, n: int, i: int) -> AmbientPoly:
        if not 0 <= i <= n:
            raise IndexError(f"coordinate index {i} outside 0..{n}")
        return cls(n, _context(n).gen(i))

    @classmethod
    def norm_squared(cls, n: int) -> AmbientPoly:
        """|x|^2 = sum of squares of all ambient coordinates."""
        return _norm_squared(n)

    @classmethod
    def from_terms(cls, n: int, terms: dict) -> AmbientPoly:
        """Build from ``{exponent tuple: rational}``; zero coefficients are dropped."""
        data = {}
        for alpha, c in terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != n + 1 or min(alpha) < 0:
                raise ValueError(f"bad exponent {alpha} for n={n}")
            q = _to_fmpq(c)
            if q != 0:
                data[alpha] = data.get(alpha, flint.fmpq(0)) + q
        return cls(n, _context(n).from_dict(data))

    @classmethod
    def parse(cls, n: int, text: str) -> AmbientPoly:
        """Inverse of ``str``: ``"3/2 * x0^2 x1 + -1 * x2 + 5"``."""
        return _parse(n, text)

    # inspection -----------------------------------------------------------
    @property
    def raw(self):
        return self._p

    def terms(self) -> dict:
        return {
            tuple(int(a) for a in m): _to_fraction(c)
            for m, c in zip(self._p.monoms(), self._p.coeffs())
        }

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.is_constant()

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return -1 if self._p.is_zero() else int(self._p.total_degree())

    def __len__(self) -> int:
        return len(self._p)

    def constant_term(self) -> Fraction:
        return self.terms().get((0,) * (self.n + 1), Fraction(0))

    def homogeneous_parts(self) -> dict:
        """``{d: homogeneous degree-d part}`` for every degree present."""
        parts: dict = {}
        for m, c in zip(self._p.monoms(), self._p.coeffs()):
            parts.setdefault(int(sum(m)), {})[m] = c
        ctx = _context(self.n)
        return {d: AmbientPoly(self.n, ctx.from_dict(t)) for d, t in sorted(parts.items())}

    def is_homogeneous(self, d: int | None = None) -> bool:
        degrees = {int(sum(m)) for m in self._p.monoms()}
        if not degrees:
            return True
        if d is None:
            return len(degrees) == 1
        return degrees == {d}

    # arithmetic -----------------------------------------------------------
    def _check(self, other: AmbientPoly):
        if self.n != other.n:
            raise DimensionMismatch(f"dimension {self.n} vs {other.n}")

    def _coerce(self, other):
        if isinstance(other, AmbientPoly):
            self._check(other)
            return other._p
        return _to_fmpq(other)

    def __add__(self, other):
        try:
            return AmbientPoly(self.n, self._p + self._coerce(other))
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return AmbientPoly(self.n, self._p - self._coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        try:
            return AmbientPoly(self.n, self._coerce(other) - self._p)
        except TypeError:
            return NotImplemented

    def __neg__(self):
        return AmbientPoly(self.n, -self._p)

    def __mul__(self, other):
        try:
            return AmbientPoly(self.n, self._p * self._coerce(other))
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, AmbientPoly):
            self._check(other)
            q, r = divmod(self._p, other._p)
            if not r.is_zero():
                raise ArithmeticError("inexact polynomial division")
            return AmbientPoly(self.n, q)
        return AmbientPoly(self.n, self._p * (1 / _to_fmpq(other)))

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative integer")
        return AmbientPoly(self.n, self._p**e)

    def __eq__(self, other):
        if isinstance(other, AmbientPoly):
            return self.n == other.n and self._p == other._p
        try:
            return self._p == AmbientPoly.constant(self.n, other)._p
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms().items())))

    # calculus -------------------------------------------------------------
    def partial(self, i: int) -> AmbientPoly:
        return AmbientPoly(self.n, self._p.derivative(i))

    def gradient(self) -> list:
        return [self.partial(i) for i in range(self.n + 1)]

    def laplacian(self) -> AmbientPoly:
        p = self._p
        out = _context(self.n).from_dict({})
        for i in range(self.n + 1):
            out += p.derivative(i).derivative(i)
        return AmbientPoly(self.n, out)

    def euler(self) -> AmbientPoly:
        """Radial derivative sum_i x^i d/dx^i."""
        p = self._p
        gens = _context(self.n).gens()
        out = _context(self.n).from_dict({})
        for i in range(self.n + 1):
            out += gens[i] * p.derivative(i)
        return AmbientPoly(self.n, out)

    def dot_gradients(self, other: AmbientPoly) -> AmbientPoly:
        """<grad p, grad q> in the flat metric of R^{n+1}."""
        self._check(other)
        out = _context(self.n).from_dict({})
        for i in range(self.n + 1):
            out += self._p.derivative(i) * other._p.derivative(i)
        return AmbientPoly(self.n, out)

    # evaluation -----------------------------------------------------------
    def __call__(self, *point):
        """Exact evaluation at a rational point."""
        if len(point) != self.n + 1:
            raise ValueError("wrong number of coordinates")
        return _to_fraction(self._p(*[_to_fmpq(c) for c in point]))

    def evaluate(self, points) -> np.ndarray:
        """Float evaluation at an ``(m, n+1)`` array of points."""
        points = np.asarray(points, dtype=float)
        exps = np.array([[int(a) for a in m] for m in self._p.monoms()], dtype=int)
        if exps.size == 0:
            return np.zeros(points.shape[0])
        coeffs = np.array([float(int(c.p)) / float(int(c.q)) for c in self._p.coeffs()])
        out = np.zeros(points.shape[0])
        # monomials grouped column by column to avoid repeated powers
        powers = [
            np.stack([points[:, i] ** e for e in range(exps[:, i].max() + 1)], axis=1)
            for i in range(self.n + 1)
        ]
        for row, c in zip(exps, coeffs):
            term = np.full(points.shape[0], c)
            for i, e in enumerate(row):
                if e:
                    term = term * powers[i][:, e]
            out += term
        return out

    # text -----------------------------------------------------------------
    def __str__(self):
        if self._p.is_zero():
            return "0"
        pieces = []
        for m, c in zip(self._p.monoms(), self._p.coeffs()):
            factors = " ".join(
                f"x{i}" if a == 1 else f"x{i}^{int(a)}" for i, a in enumerate(m) if a
            )
            coef = format_rational(_to_fraction(c))
            pieces.append(f"{coef} * {factors}" if factors else coef)
        return " + ".join(pieces)

    def __repr__(self):
        return f"AmbientPoly(n={self.n}, {self})"


@lru_cache(maxsize=None)
def _norm_squared(n: int) -> AmbientPoly:
    gens = _context(n).gens()
    return AmbientPoly(n, sum((g * g for g in gens[1:]), gens[0] * gens[0]))


_TERM = re.compile(
    r"^\s*(?:(?P<coef>[+-]?\s*\d+(?:/\d+)?)\s*(?:\*\s*)?)?(?P<rest>.*)$"
)
_FACTOR = re.compile(r"x(\d+)(?:\^(\d+))?")


def _parse(n: int, text: str) -> AmbientPoly:
    text = text.strip()
    if text in ("", "0"):
        return AmbientPoly.zero(n)
    # split at '+' and at binary '-' (a '-' directly after '+' or at start is a sign)
    chunks = [c for c in re.split(r"\+", text.replace("-", "+-")) if c.strip()]
    terms: dict = {}
    for chunk in chunks:
        chunk = chunk.strip()
        sign = 1
        while chunk.startswith("-"):
            sign = -sign
            chunk = chunk[1:].strip()
        m = _TERM.match(chunk)
        coef = parse_rational(m.group("coef").replace(" ", "")) if m.group("coef") else Fraction(1)
        rest = m.group("rest").replace("*", " ").strip()
        alpha = [0] * (n + 1)
        pos = 0
        for f in _FACTOR.finditer(rest):
            if rest[pos : f.start()].strip():
                raise ValueError(f"cannot parse term {chunk!r}")
            i = int(f.group(1))
            if i > n:
                raise ValueError(f"variable x{i} outside x0..x{n}")
            alpha[i] += int(f.group(2) or 1)
            pos = f.end()
        if rest[pos:].strip():
            raise ValueError(f"cannot parse term {chunk!r}")
        key = tuple(alpha)
        terms[key] = terms.get(key, Fraction(0)) + sign * coef
    return AmbientPoly.from_terms(n, terms)


def add(p: AmbientPoly, q: AmbientPoly) -> AmbientPoly:
    p._check(q)
    return p + q


def mul(p: AmbientPoly, q: AmbientPoly) -> AmbientPoly:
    p._check(q)
    return p * q


def ambient_laplacian(p: AmbientPoly) -> AmbientPoly:
    """Flat Laplacian of R^{n+1} (not the Lorentzian one)."""
    return p.laplacian()


def ambient_gradient(p: AmbientPoly) -> list:
    return p.gradient()
