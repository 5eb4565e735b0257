"""Conformally covariant operators on the round sphere, exact path.

GJMS operators L_2k, the bidifferential sigma_1, the I-operator, the
trilinear sigma_2-operator and their Dirichlet energies.  Everything here
acts on :class:`~confsphere.sphere_calc.SphereFunction` and returns exact
results; the sigma_2 machinery is the round-metric specialization
(Schouten tensor g0/2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .sphere_calc import (
    SphereFunction,
    SphereIntegral,
    grad_inner,
    divergence_term,
    integrate,
    laplace_beltrami,
    multiply,
)

__all__ = [
    "GjmsOrder",
    "OperatorDescriptor",
    "gjms_factor_constant",
    "gjms_eigenvalue",
    "gjms_apply",
    "gjms_apply_factored",
    "gjms_energy",
    "sigma1",
    "i_operator",
    "sigma2_form",
    "sigma2_diagonal",
    "sigma2_trilinear",
    "polarize_cubic",
    "sigma2_energy",
    "sigma2_dirichlet_energy",
    "sigma2_constant",
    "gjms_descriptor",
    "sigma2_descriptor",
]


@dataclass(frozen=True)
class GjmsOrder:
    """Order parameter of L_2k on S^n; k = 0 is the identity."""

    n: int
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if not 2 * self.k < self.n:
            raise ValueError(f"GJMS order needs 2k < n, got n={self.n}, k={self.k}")

    def lower(self) -> GjmsOrder:
        """The order k-1 operator appearing in the commutator identities."""
        if self.k == 0:
            raise ValueError("no operator below L_0")
        return GjmsOrder(self.n, self.k - 1)


def gjms_factor_constant(n: int, j: int) -> Fraction:
    """(n-2j)(n+2j-2)/4, the shift in the j-th factor of L_2k."""
    return Fraction((n - 2 * j) * (n + 2 * j - 2), 4)


def gjms_eigenvalue(l: int, order: GjmsOrder) -> Fraction:
    """Eigenvalue of L_2k on degree-l spherical harmonics."""
    if l < 0:
        raise ValueError("harmonic degree must be nonnegative")
    n = order.n
    value = Fraction(1)
    for j in range(1, order.k + 1):
        value *= l * (l + n - 1) + gjms_factor_constant(n, j)
    return value


def gjms_apply(u: SphereFunction, order: GjmsOrder) -> SphereFunction:
    """Spectral evaluation: each harmonic component scaled by its eigenvalue."""
    _same_n(u, order.n)
    if order.k == 0:
        return u
    total = SphereFunction.zero(u.n)
    for l, h in u.components.items():
        total = total + SphereFunction(u.n, h) * gjms_eigenvalue(l, order)
    return total


def gjms_apply_factored(u: SphereFunction, order: GjmsOrder) -> SphereFunction:
    """The product of shifted Laplacians applied factor by factor."""
    _same_n(u, order.n)
    v = u
    for j in range(1, order.k + 1):
        v = -laplace_beltrami(v) + v * gjms_factor_constant(order.n, j)
    return v


def gjms_energy(u: SphereFunction, order: GjmsOrder) -> SphereIntegral:
    return integrate(multiply(u, gjms_apply(u, order)))


def _same_n(u: SphereFunction, n: int):
    if u.n != n:
        raise ValueError(f"function lives on S^{u.n}, operator on S^{n}")


def _require_not_four(n: int):
    if n == 4:
        raise ValueError("the sigma_1/sigma_2 operators are undefined for n = 4")


def sigma2_constant(n: int) -> Fraction:
    """n(n-1)/8 ((n-4)/4)^3."""
    return Fraction(n * (n - 1), 8) * Fraction(n - 4, 4) ** 3


def sigma1(u: SphereFunction) -> SphereFunction:
    """sigma_1(u) = -(n-4)/8 Delta u^2 - |grad u|^2 + (n/2)((n-4)/4)^2 u^2."""
    n = u.n
    _require_not_four(n)
    u2 = multiply(u, u)
    a = Fraction(n - 4, 4)
    return (
        laplace_beltrami(u2) * Fraction(-(n - 4), 8)
        - grad_inner(u, u)
        + u2 * (Fraction(n, 2) * a * a)
    )


def i_operator(u: SphereFunction, w) -> SphereFunction:
    """I(u) = -(n+2w-2)/2 |grad u|^2 + w u (Delta + wJ) u with J = n/2."""
    n = u.n
    w = Fraction(w)
    if w == Fraction(-(n - 2), 2):
        raise ValueError("weight -(n-2)/2 is excluded")
    J = Fraction(n, 2)
    inner = laplace_beltrami(u) + u * (w * J)
    return grad_inner(u, u) * (-(n + 2 * w - 2) / 2) + multiply(u, inner) * w


def sigma2_form(a: SphereFunction, b: SphereFunction, c: SphereFunction) -> SphereFunction:
    """Slot form B(a, b; c), symmetric in (a, b), whose diagonal is L_sigma2(u,u,u).

    B = 1/2 delta(<da,db> dc) - (n-4)/16 (c Delta<da,db> - delta(Delta(ab) dc))
        - (n-1)/4 ((n-4)/4)^2 c Delta(ab) + n(n-1)/8 ((n-4)/4)^3 abc
    """
    n = a.n
    _require_not_four(n)
    s = Fraction(n - 4, 4)
    gab = grad_inner(a, b)
    ab = multiply(a, b)
    lap_ab = laplace_beltrami(ab)
    out = divergence_term(gab, c) * Fraction(1, 2)
    out = out - (multiply(c, laplace_beltrami(gab)) - divergence_term(lap_ab, c)) * Fraction(n - 4, 16)
    out = out - multiply(c, lap_ab) * (Fraction(n - 1, 4) * s * s)
    out = out + multiply(ab, c) * sigma2_constant(n)
    return out


def sigma2_diagonal(u: SphereFunction) -> SphereFunction:
    return sigma2_form(u, u, u)


def sigma2_trilinear(a: SphereFunction, b: SphereFunction, c: SphereFunction) -> SphereFunction:
    """Symmetric trilinear L_sigma2(a, b, c): cyclic average of the slot form."""
    a._check(b)
    a._check(c)
    if a == b == c:
        return sigma2_diagonal(a)
    if a == b:
        total = sigma2_form(a, a, c) + sigma2_form(c, a, a) * 2
    elif b == c:
        total = sigma2_form(b, b, a) + sigma2_form(a, b, b) * 2
    elif a == c:
        total = sigma2_form(a, a, b) + sigma2_form(b, a, a) * 2
    else:
        total = sigma2_form(a, b, c) + sigma2_form(c, a, b) + sigma2_form(b, c, a)
    return total / 3


def polarize_cubic(
    diagonal: Callable[[SphereFunction], SphereFunction],
    a: SphereFunction,
    b: SphereFunction,
    c: SphereFunction | None = None,
) -> SphereFunction:
    """Symmetric trilinear form recovered from a cubic map's diagonal alone.

    With ``c`` omitted, returns T(a, b, b) from D(b + s a) at s = 1, -1, 2:
    D(b + s a) - D(b) = 3 s T(a,b,b) + 3 s^2 T(a,a,b) + s^3 D(a).
    With all three given, uses the inclusion-exclusion identity
    6 T(a,b,c) = D(a+b+c) - D(a+b) - D(b+c) - D(a+c) + D(a) + D(b) + D(c).
    """
    if c is None:
        base = diagonal(b)
        d1 = diagonal(b + a) - base
        dm = diagonal(b - a) - base
        d2 = diagonal(b + a * 2) - base
        # d1 = 3x + 3y + z, dm = -3x + 3y - z, d2 = 6x + 12y + 8z
        odd = (d1 - dm) / 2  # 3x + z
        even = (d1 + dm) / 2  # 3y
        z = (d2 - even * 4 - odd * 2) / 6  # (6x+12y+8z - 12y - 6x - 2z)/6
        return (odd - z) / 3
    total = (
        diagonal(a + b + c)
        - diagonal(a + b)
        - diagonal(b + c)
        - diagonal(a + c)
        + diagonal(a)
        + diagonal(b)
        + diagonal(c)
    )
    return total / 6


def sigma2_energy(u: SphereFunction) -> SphereIntegral:
    """integral of u L_sigma2(u, u, u)."""
    return integrate(multiply(u, sigma2_diagonal(u)))


def sigma2_dirichlet_energy(u: SphereFunction) -> SphereIntegral:
    """The same energy written without fourth derivatives:

    integral of |grad u|^2 sigma_1(u) + |grad u|^4 / 2
                + (n-2)/2 ((n-4)/4)^2 u^2 |grad u|^2 + n(n-1)/8 ((n-4)/4)^3 u^4.
    """
    n = u.n
    s = Fraction(n - 4, 4)
    g = grad_inner(u, u)
    u2 = multiply(u, u)
    integrand = (
        multiply(g, sigma1(u))
        + multiply(g, g) * Fraction(1, 2)
        + multiply(u2, g) * (Fraction(n - 2, 2) * s * s)
        + multiply(u2, u2) * sigma2_constant(n)
    )
    return integrate(integrand)


@dataclass(frozen=True)
class OperatorDescriptor:
    """A j-linear conformally covariant operator of total order 2k on S^n."""

    name: str
    n: int
    j: int
    k: int
    operator: Callable[..., SphereFunction] = field(repr=False, compare=False)
    sharp: Fraction = field(compare=False)

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("arity must be at least one")
        if not 2 * self.k < self.n:
            raise ValueError("need 2k < n")

    def __call__(self, *args: SphereFunction) -> SphereFunction:
        if len(args) != self.j:
            raise TypeError(f"{self.name} takes {self.j} arguments")
        return self.operator(*args)

    def diagonal(self, u: SphereFunction) -> SphereFunction:
        return self(*([u] * self.j))

    def energy(self, u: SphereFunction) -> SphereIntegral:
        return integrate(multiply(u, self.diagonal(u)))

    def commutator(self, u: SphereFunction, i: int) -> SphereFunction:
        """[L, x^i](u, ..., u) = L(x^i u, u, ..., u) - x^i L(u, ..., u)."""
        x = SphereFunction.coordinate(self.n, i)
        return self(multiply(x, u), *([u] * (self.j - 1))) - multiply(x, self.diagonal(u))

    @property
    def mass_exponent(self) -> Fraction:
        """n(j+1)/(n-2k), the power in the constraint integral."""
        return Fraction(self.n * (self.j + 1), self.n - 2 * self.k)

    @property
    def critical_exponent(self) -> Fraction:
        """(nj+2k)/(n-2k), the power on the right of the Euler-Lagrange equation."""
        return Fraction(self.n * self.j + 2 * self.k, self.n - 2 * self.k)

    @property
    def density_weight(self) -> Fraction:
        """(n-2k)/(n(j+1)), the Jacobian power in the conformal pullback."""
        return 1 / self.mass_exponent


def gjms_descriptor(n: int, k: int) -> OperatorDescriptor:
    order = GjmsOrder(n, k)
    if k == 0:
        raise ValueError("the variational framework needs k >= 1")
    return OperatorDescriptor(
        name="gjms",
        n=n,
        j=1,
        k=k,
        operator=lambda u: gjms_apply(u, order),
        sharp=gjms_eigenvalue(0, order),
    )


def sigma2_descriptor(n: int) -> OperatorDescriptor:
    if n < 5:
        raise ValueError("the sigma_2 functional needs n >= 5")
    return OperatorDescriptor(
        name="sigma2",
        n=n,
        j=3,
        k=2,
        operator=sigma2_trilinear,
        sharp=sigma2_constant(n),
    )
