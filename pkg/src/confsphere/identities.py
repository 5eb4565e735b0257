"""Exact verification of the commutator and Dirichlet-form identities.

Each check builds both sides as exact sphere functions (or exact integrals
for the integral-level identities) and compares them structurally.  A
report records everything needed to rerun the check: dimension, order,
seed and degree of the random input.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exact_poly import AmbientPoly
from .operators import (
    GjmsOrder,
    gjms_apply,
    sigma1,
    sigma2_diagonal,
    sigma2_dirichlet_energy,
    sigma2_energy,
    sigma2_trilinear,
)
from .sphere_calc import SphereFunction, grad_inner, integrate, multiply, reduce

__all__ = [
    "IdentityReport",
    "random_sphere_function",
    "check_gjms_commutator",
    "check_gjms_first_order",
    "check_sigma2_commutator",
    "check_self_adjointness",
    "check_dirichlet_identity",
    "check_trilinear_symmetry",
    "gjms_battery",
    "sigma2_battery",
]


@dataclass
class IdentityReport:
    identity: str
    n: int
    lhs: object
    rhs: object
    k: int | None = None
    seed: int | None = None
    degree: int | None = None
    input: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def difference(self):
        return self.lhs - self.rhs

    @property
    def verdict(self) -> bool:
        d = self.difference
        if isinstance(d, SphereFunction):
            return d.is_zero()
        return d.coefficient == 0

    def to_json(self) -> dict:
        d = self.difference
        out = {
            "identity": self.identity,
            "n": self.n,
            "k": self.k,
            "seed": self.seed,
            "degree": self.degree,
            "verdict": self.verdict,
            "lhs_minus_rhs": str(d) if isinstance(d, SphereFunction) else str(d.coefficient),
        }
        out.update(self.extra)
        return out


def random_sphere_function(n: int, degree: int, seed: int) -> SphereFunction:
    """Integer coefficients in [-3, 3] on every monomial of degree <= ``degree``."""
    rng = random.Random(seed)
    monomials = [
        alpha
        for d in range(degree + 1)
        for alpha in _monomials(n + 1, d)
    ]
    return reduce(AmbientPoly.from_terms(n, {a: rng.randint(-3, 3) for a in monomials}))


def _monomials(nvars: int, d: int):
    # stars and bars, deterministic order
    for cuts in itertools.combinations(range(d + nvars - 1), nvars - 1):
        prev = -1
        alpha = []
        for c in cuts:
            alpha.append(c - prev - 1)
            prev = c
        alpha.append(d + nvars - 2 - prev)
        yield tuple(alpha)


def _coords(n: int):
    return [SphereFunction.coordinate(n, i) for i in range(n + 1)]


def check_gjms_commutator(u: SphereFunction, order: GjmsOrder, **meta) -> IdentityReport:
    """sum_i x^i [L_2k, x^i] u  against  k(n+2k-2) L_{2k-2} u."""
    n, k = order.n, order.k
    Lu = gjms_apply(u, order)
    lhs = SphereFunction.zero(n)
    for x in _coords(n):
        comm = gjms_apply(multiply(x, u), order) - multiply(x, Lu)
        lhs = lhs + multiply(x, comm)
    rhs = gjms_apply(u, order.lower()) * (k * (n + 2 * k - 2))
    return IdentityReport("gjms_commutator", n, lhs, rhs, k=k, **meta)


def check_gjms_first_order(u: SphereFunction, order: GjmsOrder, i: int, **meta) -> IdentityReport:
    """[L_2k, x^i] u  against  k((n+2k-2) x^i - 2 <grad x^i, grad .>) L_{2k-2} u."""
    n, k = order.n, order.k
    x = SphereFunction.coordinate(n, i)
    lhs = gjms_apply(multiply(x, u), order) - multiply(x, gjms_apply(u, order))
    lower = gjms_apply(u, order.lower())
    rhs = multiply(x, lower) * (k * (n + 2 * k - 2)) - grad_inner(x, lower) * (2 * k)
    report = IdentityReport("gjms_first_order", n, lhs, rhs, k=k, **meta)
    report.extra["i"] = i
    return report


def check_sigma2_commutator(u: SphereFunction, **meta) -> IdentityReport:
    """sum_i x^i [L_sigma2, x^i](u,u,u)  against  (n-1)/3 u sigma_1(u)."""
    n = u.n
    if n < 5:
        raise ValueError("sigma_2 commutator identity needs n >= 5")
    Lu = sigma2_diagonal(u)
    lhs = SphereFunction.zero(n)
    for x in _coords(n):
        xu = multiply(x, u)
        comm = sigma2_trilinear(xu, u, u) - multiply(x, Lu)
        lhs = lhs + multiply(x, comm)
    rhs = multiply(u, sigma1(u)) * Fraction(n - 1, 3)
    return IdentityReport("sigma2_commutator", n, lhs, rhs, k=2, **meta)


def check_self_adjointness(u: SphereFunction, v: SphereFunction, order: GjmsOrder, **meta) -> IdentityReport:
    lhs = integrate(multiply(v, gjms_apply(u, order)))
    rhs = integrate(multiply(u, gjms_apply(v, order)))
    return IdentityReport("gjms_self_adjoint", order.n, lhs, rhs, k=order.k, **meta)


def check_dirichlet_identity(u: SphereFunction, **meta) -> IdentityReport:
    """integral u L_sigma2(u,u,u)  against the first-order Dirichlet form."""
    if u.n < 5:
        raise ValueError("sigma_2 Dirichlet identity needs n >= 5")
    return IdentityReport("sigma2_dirichlet", u.n, sigma2_energy(u), sigma2_dirichlet_energy(u), k=2, **meta)


def check_trilinear_symmetry(inputs) -> IdentityReport:
    """(u0,u1,u2,u3) -> integral u0 L_sigma2(u1,u2,u3) under all 24 permutations.

    lhs is the value for the given order; rhs is the first value that
    disagrees (or lhs itself if all 24 agree).
    """
    u0, u1, u2, u3 = inputs
    base = integrate(multiply(u0, sigma2_trilinear(u1, u2, u3)))
    witness = base
    for p in itertools.permutations(inputs):
        value = integrate(multiply(p[0], sigma2_trilinear(p[1], p[2], p[3])))
        if value != base:
            witness = value
            break
    return IdentityReport("sigma2_quadrilinear_symmetry", u0.n, base, witness, k=2)


def gjms_battery(n: int, k: int, degree: int, trials: int, seed: int, first_order: bool = True) -> list:
    """Seeded fuzz sweep of the GJMS commutator identities at one (n, k)."""
    order = GjmsOrder(n, k)
    reports = []
    for t in range(trials):
        s = seed + t
        u = random_sphere_function(n, degree, s)
        meta = dict(seed=s, degree=degree)
        reports.append(check_gjms_commutator(u, order, **meta))
        if first_order:
            reports.extend(check_gjms_first_order(u, order, i, **meta) for i in range(n + 1))
    return reports


def sigma2_battery(n: int, degree: int, trials: int, seed: int, dirichlet: bool = True) -> list:
    reports = []
    for t in range(trials):
        s = seed + t
        u = random_sphere_function(n, degree, s)
        meta = dict(seed=s, degree=degree)
        reports.append(check_sigma2_commutator(u, **meta))
        if dirichlet:
            reports.append(check_dirichlet_identity(u, **meta))
    return reports
