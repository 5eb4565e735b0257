"""Sharp constants, constraint sets, stability checks and quotient minimization.

The framework is the generic j-linear, order-2k one: a descriptor from
:mod:`confsphere.operators` supplies L(u, ..., u); the constraint is
integral u^N = omega_n with N = n(j+1)/(n-2k).  Two function types are
accepted wherever an "evaluable" u is expected:

* :class:`~confsphere.sphere_calc.SphereFunction` (exact operators,
  fractional powers by quadrature),
* :class:`~confsphere.zonal.ZonalFunction` (closed-form zonal operators,
  Gauss-Jacobi in the axial variable).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
from scipy.optimize import least_squares

from .operators import (
    GjmsOrder,
    OperatorDescriptor,
    gjms_eigenvalue,
    gjms_factor_constant,
    sigma1,
    sigma2_constant,
)
from .quadrature import jacobi_rule, sphere_rule
from .sphere_calc import SphereFunction, SphereIntegral, integrate, multiply, omega
from .zonal import (
    ZonalFunction,
    gjms_zonal,
    integrate_zonal,
    sigma1_zonal,
    sigma2_diagonal_zonal,
    sigma2_energy_zonal,
)

__all__ = [
    "ConstraintSet",
    "MinimizationResult",
    "sharp_constant_gjms",
    "sharp_constant_sigma2",
    "sharp_constant",
    "gamma_ratio",
    "energy",
    "mass",
    "normalize",
    "euler_lagrange_residual",
    "stability_pair",
    "commutator_stability_gap",
    "gjms_gap_closed_form",
    "deficit",
    "first_variation",
    "minimize_quotient",
    "AdmissibilityError",
    "TangencyError",
    "BalanceRequired",
]

log = logging.getLogger(__name__)


class AdmissibilityError(ValueError):
    pass


class TangencyError(ValueError):
    pass


class BalanceRequired(ValueError):
    pass


# sharp constants ------------------------------------------------------------


def sharp_constant_gjms(n: int, k: int) -> Fraction:
    """Gamma((n+2k)/2)/Gamma((n-2k)/2) as the product of the factor shifts."""
    order = GjmsOrder(n, k)
    return gjms_eigenvalue(0, order)


def gamma_ratio(n: int, k: int) -> Fraction:
    """Gamma(n/2 + k)/Gamma(n/2 - k) by telescoping Gamma(x+1) = x Gamma(x)."""
    a = Fraction(n, 2)
    out = Fraction(1)
    for i in range(-k, k):
        out *= a + i
    return out


def sharp_constant_sigma2(n: int) -> Fraction:
    if n < 5:
        raise ValueError("the sigma_2 inequality needs n >= 5")
    return sigma2_constant(n)


def sharp_constant(desc: OperatorDescriptor) -> Fraction:
    return Fraction(desc.sharp)


def _is_sigma2(desc: OperatorDescriptor) -> bool:
    return desc.name == "sigma2"


# constraint set -------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintSet:
    n: int
    j: int
    k: int
    require_sigma1: bool = False

    @classmethod
    def of(cls, desc: OperatorDescriptor) -> ConstraintSet:
        return cls(desc.n, desc.j, desc.k, _is_sigma2(desc))

    def __post_init__(self):
        if not self.exponent > 2:
            raise ValueError("constraint exponent must exceed 2")

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.n * (self.j + 1), self.n - 2 * self.k)

    @property
    def target_mass(self) -> float:
        return omega(self.n)

    def contains(self, u, tol: float = 1e-8) -> bool:
        values = _grid_values(u)
        if np.min(values) <= 0:
            return False
        if self.require_sigma1 and np.min(_sigma1_grid(u)) <= 0:
            return False
        return abs(mass(u, self.exponent) - self.target_mass) <= tol * self.target_mass


# evaluation helpers ---------------------------------------------------------


def _zonal_rule(n: int, nodes: int = 200):
    return jacobi_rule(n, nodes)


def _full_rule(n: int, degree: int):
    # product rule on all n+1 coordinates, capped to stay below ~1e6 points
    per_level = math.ceil((degree + 1) / 2)
    cap = max(4, int((1e6 / 2) ** (1.0 / n)))
    return sphere_rule(n, 2 * min(per_level, cap) - 1)


def _grid_values(u, grid=None) -> np.ndarray:
    if isinstance(u, ZonalFunction):
        t = _zonal_rule(u.n).nodes if grid is None else grid
        return u(t)
    if isinstance(u, SphereFunction):
        pts = _full_rule(u.n, 2 * max(u.degree, 1) + 8).points if grid is None else grid
        return u.evaluate(pts)
    raise TypeError(f"unsupported function type {type(u).__name__}")


def _sigma1_grid(u, grid=None) -> np.ndarray:
    if isinstance(u, ZonalFunction):
        return _grid_values(sigma1_zonal(u), grid)
    return _grid_values(sigma1(u), grid)


def _eval_grid(u):
    """Evaluation grid for sup-norms: quadrature nodes plus the poles."""
    if isinstance(u, ZonalFunction):
        return np.concatenate([[-1.0], _zonal_rule(u.n).nodes, [1.0]])
    n = u.n
    pts = _full_rule(n, 2 * max(u.degree, 1) + 4).points
    return np.vstack([pts, np.eye(n + 1), -np.eye(n + 1)])


def _integrate_values(u, values) -> float:
    """Integrate values sampled on the default grid of u."""
    if isinstance(u, ZonalFunction):
        return _zonal_rule(u.n).sphere_integral(values)
    rule = _full_rule(u.n, 2 * max(u.degree, 1) + 8)
    return rule.integrate(values)


def diagonal(u, desc: OperatorDescriptor):
    """L(u, ..., u) in the function type of u."""
    if u.n != desc.n:
        raise ValueError("dimension mismatch")
    if isinstance(u, ZonalFunction):
        if _is_sigma2(desc):
            return sigma2_diagonal_zonal(u)
        return gjms_zonal(u, GjmsOrder(desc.n, desc.k))
    return desc.diagonal(u)


def energy(u, desc: OperatorDescriptor):
    """E(u) = integral u L(u, ..., u); exact SphereIntegral for SphereFunction input."""
    if isinstance(u, ZonalFunction):
        if _is_sigma2(desc):
            return sigma2_energy_zonal(u)
        return integrate_zonal(u * diagonal(u, desc))
    return desc.energy(u)


def mass(u, exponent) -> float:
    """integral |u|^exponent by quadrature."""
    values = np.abs(_grid_values(u))
    return _integrate_values(u, values ** float(exponent))


def normalize(u, desc: OperatorDescriptor):
    """Rescale u onto the constraint set."""
    N = ConstraintSet.of(desc).exponent
    c = (omega(desc.n) / mass(u, N)) ** (1.0 / float(N))
    return u * c


def _float(x) -> float:
    return float(x)


# first-order and second-order conditions ------------------------------------


def euler_lagrange_residual(u, desc: OperatorDescriptor, E=None) -> float:
    """sup |L(u,...,u) - E(u)/omega_n u^{(nj+2k)/(n-2k)}| over the evaluation grid."""
    E = _float(energy(u, desc)) if E is None else _float(E)
    grid = _eval_grid(u)
    lhs = _grid_values(diagonal(u, desc), grid)
    p = float(desc.critical_exponent)
    rhs = E / omega(desc.n) * _grid_values(u, grid) ** p
    return float(np.max(np.abs(lhs - rhs)))


def _linearized(v: SphereFunction, u: SphereFunction, desc: OperatorDescriptor) -> SphereFunction:
    """L(v, u, ..., u)."""
    return desc(v, *([u] * (desc.j - 1)))


def stability_pair(u: SphereFunction, v: SphereFunction, desc: OperatorDescriptor, tol: float = 1e-10):
    """Both sides of the second-variation inequality at a constrained minimizer u.

    lhs = integral v L(v, u, ..., u)
    rhs = (nj+2k)/(j(n-2k)) E(u)/omega_n integral v^2 u^{(n(j-1)+4k)/(n-2k)}

    Exact (SphereIntegral) when u is constant; floats otherwise.
    """
    n, j, k = desc.n, desc.j, desc.k
    ratio = Fraction(n * j + 2 * k, j * (n - 2 * k))
    crit = desc.critical_exponent
    wexp = Fraction(n * (j - 1) + 4 * k, n - 2 * k)
    lhs = integrate(multiply(v, _linearized(v, u, desc)))
    E = desc.energy(u)
    if u.is_constant():
        c = u.constant_value()
        if crit.denominator != 1 or wexp.denominator != 1:
            if c != 1:
                raise ValueError("exact path for constant u needs u = 1 or integer exponents")
        tangency = integrate(v) * (c ** int(crit) if crit.denominator == 1 else 1)
        if tangency.coefficient != 0:
            raise TangencyError(f"v is not tangent: {tangency}")
        weight = c ** int(wexp) if wexp.denominator == 1 else Fraction(1)
        rhs = integrate(multiply(v, v)) * (ratio * E.coefficient * weight)
        return lhs, rhs
    rule = _full_rule(n, 2 * (u.degree * 4 + v.degree) + 4)
    uvals = u.evaluate(rule.points)
    vvals = v.evaluate(rule.points)
    if np.min(uvals) <= 0:
        raise AdmissibilityError("u must be positive")
    tang = rule.integrate(vvals * uvals ** float(crit))
    if abs(tang) > tol * omega(n):
        raise TangencyError(f"v is not tangent: {tang:.3e}")
    rhs = float(ratio) * E.value / omega(n) * rule.integrate(vvals**2 * uvals ** float(wexp))
    return lhs.value, rhs


def _moments_of(u: SphereFunction, exponent) -> np.ndarray:
    rule = _full_rule(u.n, 2 * max(u.degree, 1) * 4 + 8)
    vals = u.evaluate(rule.points)
    return rule.points.T @ (rule.weights * vals ** float(exponent))


def commutator_stability_gap(u: SphereFunction, desc: OperatorDescriptor, tol: float = 1e-8):
    """(lhs, rhs) of the commutator form of the stability inequality, exact.

    lhs = sum_i integral x^i u [L, x^i](u, ..., u)
    rhs = 2(j+1)k/(j(n-2k)) E(u)

    For GJMS, lhs - rhs = -4k/(n-2k) integral u (-Delta) L_{2k-2} u, which
    is zero for constants and negative otherwise.
    """
    n, j, k = desc.n, desc.j, desc.k
    if not u.is_constant():
        if np.min(_grid_values(u)) <= 0:
            raise AdmissibilityError("u must be positive")
        m = _moments_of(u, ConstraintSet.of(desc).exponent)
        if np.linalg.norm(m) > tol:
            raise BalanceRequired(f"u is not balanced (moment norm {np.linalg.norm(m):.3e})")
    elif u.constant_value() <= 0:
        raise AdmissibilityError("u must be positive")
    lhs = None
    for i in range(n + 1):
        x = SphereFunction.coordinate(n, i)
        term = integrate(multiply(multiply(x, u), desc.commutator(u, i)))
        lhs = term if lhs is None else lhs + term
    rhs = desc.energy(u) * Fraction(2 * (j + 1) * k, j * (n - 2 * k))
    return lhs, rhs


def gjms_gap_closed_form(u: SphereFunction, k: int):
    """4k/(n-2k) integral u (-Delta) L_{2k-2} u, spectrally."""
    n = u.n
    lower = GjmsOrder(n, k - 1)
    total = Fraction(0)
    for l, h in u.components.items():
        hl = SphereFunction(n, h)
        total += l * (l + n - 1) * gjms_eigenvalue(l, lower) * integrate(multiply(hl, hl)).coefficient
    return SphereIntegral(n, total * Fraction(4 * k, n - 2 * k))


def deficit(u, desc: OperatorDescriptor):
    """E(u) - Lambda omega_n^{1-(j+1)/N} (integral u^N)^{(j+1)/N}.

    Scale invariant; equals E(u) - Lambda omega_n on the constraint set.
    Exact zero for positive constants.
    """
    if _is_sigma2(desc) and np.min(_sigma1_grid(u)) <= 0:
        raise AdmissibilityError("sigma_1(u) must be positive on the grid")
    if np.min(_grid_values(u)) <= 0:
        raise AdmissibilityError("u must be positive")
    if isinstance(u, SphereFunction) and u.is_constant():
        return Fraction(0)
    N = ConstraintSet.of(desc).exponent
    q = float(Fraction(desc.j + 1) / N)
    w = omega(desc.n)
    E = _float(energy(u, desc))
    return E - float(desc.sharp) * w ** (1 - q) * mass(u, N) ** q


def first_variation(u: SphereFunction, v: SphereFunction, desc: OperatorDescriptor, steps=None):
    """Central differences of E along v against (j+1) integral v L(u, ..., u).

    Steps are exact rationals, so the only error is the O(h^2) truncation.
    Returns (exact, [(h, difference quotient, error), ...]).
    """
    steps = steps or [Fraction(1, 10**3), Fraction(1, 10**4), Fraction(1, 10**5)]
    exact = integrate(multiply(v, desc.diagonal(u))).coefficient * (desc.j + 1)
    rows = []
    for h in steps:
        h = Fraction(h)
        fd = (desc.energy(u + v * h).coefficient - desc.energy(u - v * h).coefficient) / (2 * h)
        rows.append((h, fd, fd - exact))
    return exact, rows


# minimization ---------------------------------------------------------------


def _monomial_exponents(p: int, L: int):
    out = []
    for d in range(L + 1):
        for combo in combinations_with_replacement(range(p), d):
            alpha = [0] * p
            for c in combo:
                alpha[c] += 1
            out.append(tuple(alpha))
    return out


class _SectorBasis:
    """Polynomials of degree <= L in the first p coordinates, orthonormal on S^n.

    On the sphere the Euler operator acts on a degree-d monomial in y by d,
    so Delta_S f = Delta_y f - sum_d d(d+n-1) f_d and
    |grad f|^2 = |grad_y f|^2 - (y . grad_y f)^2.
    """

    def __init__(self, n: int, p: int, L: int, degree: int):
        self.n, self.p, self.L = n, p, L
        self.rule = sphere_rule(n, degree, active=p)
        y = self.rule.points
        w = self.rule.weights
        exps = _monomial_exponents(p, L)
        self.exponents = exps
        m = len(w)
        vals = np.empty((m, len(exps)))
        grads = np.zeros((m, len(exps), p))
        lap = np.zeros((m, len(exps)))

        def mono(alpha):
            out = np.ones(m)
            for i, a in enumerate(alpha):
                if a:
                    out = out * y[:, i] ** a
            return out

        for b, alpha in enumerate(exps):
            vals[:, b] = mono(alpha)
            d = sum(alpha)
            for i, a in enumerate(alpha):
                if a:
                    lower = list(alpha)
                    lower[i] -= 1
                    grads[:, b, i] = a * mono(lower)
                if a >= 2:
                    lower = list(alpha)
                    lower[i] -= 2
                    lap[:, b] += a * (a - 1) * mono(lower)
            lap[:, b] -= d * (d + n - 1) * vals[:, b]
        gram = vals.T @ (w[:, None] * vals)
        chol = np.linalg.cholesky(gram)
        # orthonormal basis = monomials @ T
        T = np.linalg.inv(chol).T
        self.T = T
        self.values = vals @ T
        self.lap = lap @ T
        self.grads = np.einsum("mbp,bc->mcp", grads, T)
        self.euler = np.einsum("mcp,mp->mc", self.grads, y)
        W = self.values.T * w
        D = W @ self.lap
        self.delta = (D + D.T) / 2
        self.weights = w
        self.points = y

    @property
    def size(self) -> int:
        return self.values.shape[1]

    def constant_coefficients(self) -> np.ndarray:
        c = np.zeros(self.size)
        c[0] = 1.0
        return c * math.sqrt(self.rule.integrate(np.ones(len(self.weights))))

    def evaluate(self, coeffs, points) -> np.ndarray:
        y = np.asarray(points, float)[:, : self.p]
        mono = np.column_stack([np.prod(y**np.array(a), axis=1) for a in self.exponents])
        return mono @ (self.T @ coeffs)


@dataclass
class MinimizationResult:
    descriptor: str
    n: int
    j: int
    k: int
    L: int
    seed: int
    coefficients: np.ndarray = field(repr=False)
    quotient: float
    sharp: float
    iterations: int
    grad_norm: float
    converged: bool
    bubble_fit: dict
    min_u: float
    min_sigma1: float | None
    active: int
    nodes: int

    @property
    def deficit(self) -> float:
        return self.quotient - self.sharp

    def to_json(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "n": self.n,
            "k": self.k,
            "j": self.j,
            "L": self.L,
            "seed": self.seed,
            "quotient": self.quotient,
            "sharp": self.sharp,
            "deficit": self.deficit,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "converged": self.converged,
            "bubble_fit": self.bubble_fit,
            "min_u": self.min_u,
            "min_sigma1": self.min_sigma1,
            "active": self.active,
            "nodes": self.nodes,
            "coefficients": [float(c) for c in self.coefficients],
        }


class _Objective:
    """Scale-invariant quotient E(u) / (M(u)/omega_n)^{(j+1)/N} on a sector basis."""

    def __init__(self, desc: OperatorDescriptor, basis: _SectorBasis):
        self.desc = desc
        self.basis = basis
        n = desc.n
        self.N = float(ConstraintSet.of(desc).exponent)
        self.q = (desc.j + 1) / self.N
        self.omega = omega(n)
        self.sigma2 = _is_sigma2(desc)
        if not self.sigma2:
            A = np.eye(basis.size)
            for jj in range(1, desc.k + 1):
                A = A @ (-basis.delta + float(gjms_factor_constant(n, jj)) * np.eye(basis.size))
            self.A = (A + A.T) / 2
        # Sobolev-type metric for the descent direction
        P = np.eye(basis.size)
        for _ in range(desc.k):
            P = P @ (np.eye(basis.size) - basis.delta)
        self.precond = np.linalg.cholesky((P + P.T) / 2)

    def fields(self, c):
        b = self.basis
        u = b.values @ c
        lap = b.lap @ c
        gy = np.einsum("mbp,b->mp", b.grads, c)
        eu = b.euler @ c
        g = np.sum(gy * gy, axis=1) - eu * eu
        return u, lap, gy, eu, g

    def sigma1_values(self, u, lap, g):
        n = self.desc.n
        s = (n - 4) / 4
        lap_u2 = 2 * u * lap + 2 * g
        return -(n - 4) / 8 * lap_u2 - g + n / 2 * s * s * u * u

    def energy_and_grad(self, c):
        if not self.sigma2:
            Ac = self.A @ c
            return float(c @ Ac), 2 * Ac
        n = self.desc.n
        s = (n - 4) / 4
        lam = float(self.desc.sharp)
        b = self.basis
        w = b.weights
        u, lap, gy, eu, g = self.fields(c)
        s1 = self.sigma1_values(u, lap, g)
        a2 = (n - 2) / 2 * s * s
        F = g * s1 + 0.5 * g * g + a2 * u * u * g + lam * u**4
        # partial derivatives of F in (u, Delta u, g); sigma_1 depends on all three
        ds1_du = -(n - 4) / 4 * lap + n * s * s * u
        ds1_dlap = -(n - 4) / 4 * u
        ds1_dg = -(n - 4) / 4 - 1
        F_u = g * ds1_du + 2 * a2 * u * g + 4 * lam * u**3
        F_lap = g * ds1_dlap
        F_g = s1 + g * ds1_dg + g + a2 * u * u
        # d g / d c_b = 2 (grad_y u . grad_y phi_b - (y.grad u)(y.grad phi_b))
        dg = 2 * (np.einsum("mp,mbp->mb", gy, b.grads) - eu[:, None] * b.euler)
        grad = (w * F_u) @ b.values + (w * F_lap) @ b.lap + (w * F_g) @ dg
        return float(w @ F), grad

    def value_and_grad(self, c):
        b = self.basis
        w = b.weights
        E, dE = self.energy_and_grad(c)
        u = b.values @ c
        M = float(w @ np.abs(u) ** self.N)
        dM = self.N * ((w * np.abs(u) ** (self.N - 1) * np.sign(u)) @ b.values)
        scale = (M / self.omega) ** self.q
        Q = E / scale
        dQ = dE / scale - self.q * E / scale * dM / M
        return Q, dQ, M

    def admissible(self, c) -> bool:
        u, lap, gy, eu, g = self.fields(c)
        if np.min(u) <= 0:
            return False
        if self.sigma2 and np.min(self.sigma1_values(u, lap, g)) <= 0:
            return False
        return True

    def project(self, c):
        u = self.basis.values @ c
        M = float(self.basis.weights @ np.abs(u) ** self.N)
        return c * (self.omega / M) ** (1.0 / self.N)


def _precondition(chol, g):
    from scipy.linalg import cho_solve

    return cho_solve((chol, True), g)


def _bubble_power(desc: OperatorDescriptor) -> float:
    return (desc.n - 2 * desc.k) / 2 if not _is_sigma2(desc) else (desc.n - 4) / 4


def _fit_bubble(desc, basis: _SectorBasis, c) -> dict:
    y = basis.points
    w = np.sqrt(basis.weights)
    u = basis.values @ c
    p = _bubble_power(desc)

    def model(params):
        a, xi = params[0], params[1:]
        s = float(xi @ xi)
        return a * ((1.0 + y @ xi) / math.sqrt(max(1.0 - s, 1e-300))) ** (-p)

    def resid(params):
        if float(params[1:] @ params[1:]) >= 1.0:
            return np.full(len(u), 1e3)
        return w * (model(params) - u)

    x0 = np.zeros(basis.p + 1)
    x0[0] = float(np.sqrt(np.sum(w**2 * u**2) / np.sum(w**2)))
    sol = least_squares(resid, x0, xtol=1e-14, ftol=1e-14, gtol=1e-14)
    rel = float(np.linalg.norm(sol.fun) / np.linalg.norm(w * u))
    xi = np.zeros(desc.n + 1)
    xi[: basis.p] = sol.x[1:]
    return {"a": float(sol.x[0]), "xi": xi.tolist(), "residual": rel}


def minimize_quotient(
    desc: OperatorDescriptor,
    L: int,
    seed: int = 1,
    *,
    init: str = "random",
    active: int = 3,
    perturbation: float = 0.1,
    max_iter: int = 5000,
    grad_tol: float = 1e-7,
    degree: int | None = None,
    precondition: bool = True,
) -> MinimizationResult:
    """Projected gradient descent of the Sobolev quotient on a truncated sector.

    The trial space is polynomials of degree <= L in x^0, ..., x^{active-1};
    it contains the constants and is invariant under Delta, so the GJMS
    energy is an exact quadratic form there.  Iterates are kept on the
    constraint set by rescaling; steps that break positivity (and
    sigma_1 > 0 for sigma_2) are rejected by backtracking.  With
    ``precondition`` the step is the gradient in the (1 - Delta)^k metric,
    which evens out the spread of curvatures across harmonic degrees.
    """
    if not 0 <= L <= 8:
        raise ValueError("truncation degree must lie in 0..8")
    n = desc.n
    p = min(active, n)
    N = float(ConstraintSet.of(desc).exponent)
    deg = degree if degree is not None else 2 * math.ceil(L * N)
    basis = _SectorBasis(n, p, L, deg)
    obj = _Objective(desc, basis)

    c = basis.constant_coefficients()
    if init == "random":
        rng = np.random.default_rng(seed)
        pert = rng.normal(size=basis.size)
        pert[0] = 0.0
        unit = basis.values @ pert
        pert *= perturbation / np.max(np.abs(unit))
        # shrink until the start is admissible (sigma_1 reacts to second derivatives)
        for _ in range(30):
            if obj.admissible(c + pert):
                break
            pert *= 0.5
        c = c + pert
    elif init != "constant":
        raise ValueError(f"unknown init {init!r}")
    c = obj.project(c)
    if not obj.admissible(c):
        raise AdmissibilityError("initial iterate is not admissible")

    Q, dQ, _ = obj.value_and_grad(c)
    step = 1.0
    it = 0
    converged = False
    while True:
        gnorm = float(np.linalg.norm(dQ))
        if gnorm < grad_tol:
            converged = True
            break
        if it >= max_iter:
            break
        it += 1
        direction = _precondition(obj.precond, dQ) if precondition else dQ
        slope = float(dQ @ direction)
        slack = 8 * np.finfo(float).eps * abs(Q)
        t = step
        while True:
            trial = obj.project(c - t * direction)
            if obj.admissible(trial):
                Qt, dQt, _ = obj.value_and_grad(trial)
                if Qt <= Q - 1e-4 * t * slope:
                    break
                # below the resolution of Q, fall back on the gradient norm
                if Qt <= Q + slack and np.linalg.norm(dQt) < gnorm:
                    break
            t *= 0.5
            if t < 1e-16:
                log.warning("line search failed at iteration %d", it)
                break
        if t < 1e-16:
            break
        c, Q, dQ = trial, Qt, dQt
        step = min(2.0 * t, 1.0)
        if it % 500 == 0:
            log.info("iteration %d quotient %.12g |grad| %.3e", it, Q, gnorm)

    u, lap, gy, eu, g = obj.fields(c)
    min_s1 = float(np.min(obj.sigma1_values(u, lap, g))) if obj.sigma2 else None
    return MinimizationResult(
        descriptor=desc.name,
        n=n,
        j=desc.j,
        k=desc.k,
        L=L,
        seed=seed,
        coefficients=c,
        quotient=float(Q),
        sharp=float(desc.sharp) * omega(n),
        iterations=it,
        grad_norm=float(np.linalg.norm(dQ)),
        converged=converged,
        bubble_fit=_fit_bubble(desc, basis, c),
        min_u=float(np.min(u)),
        min_sigma1=min_s1,
        active=p,
        nodes=basis.rule.size,
    )
