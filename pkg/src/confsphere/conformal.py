"""Conformal maps of S^n, Jacobian-weighted pullbacks and balancing.

A map is stored as a point xi of the open unit ball together with a
rotation R.  Its conformal factor is

    lambda(zeta) = sqrt(1 - |xi|^2) / (1 + xi . zeta),

so |J|(zeta) = lambda(zeta)^n.  The point map is the ball-model Moebius
transformation x -> ((1-|a|^2)(x-a) - |x-a|^2 a) / |x-a|^2 (on |x| = 1)
with a = -xi / (1 + sqrt(1 - |xi|^2)), followed by R.

Everything in this module is binary64.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import SphereRule, sphere_rule

__all__ = [
    "MobiusMap",
    "BalanceError",
    "BalanceResult",
    "jacobian",
    "apply",
    "pullback_density",
    "moments",
    "default_moment_rule",
    "balance",
    "numeric_jacobian",
]

log = logging.getLogger(__name__)

SPHERE_TOL = 1e-12


def _check_on_sphere(zeta: np.ndarray):
    dev = np.max(np.abs(np.sum(zeta * zeta, axis=-1) - 1.0))
    if dev > SPHERE_TOL * 10 * max(1, zeta.shape[-1]):
        raise ValueError(f"points are off the unit sphere (|zeta|^2 - 1 up to {dev:.3g})")


@dataclass(frozen=True)
class MobiusMap:
    xi: np.ndarray
    rotation: np.ndarray | None = None

    def __post_init__(self):
        xi = np.array(self.xi, dtype=float)
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        if not np.dot(xi, xi) < 1.0:
            raise ValueError("xi must lie in the open unit ball")
        if self.rotation is not None:
            R = np.array(self.rotation, dtype=float)
            if R.shape != (len(xi), len(xi)):
                raise ValueError("rotation has the wrong shape")
            if np.max(np.abs(R.T @ R - np.eye(len(xi)))) > 1e-12:
                raise ValueError("rotation is not orthogonal")
            R.setflags(write=False)
            object.__setattr__(self, "rotation", R)

    @classmethod
    def identity(cls, n: int) -> MobiusMap:
        return cls(np.zeros(n + 1))

    @property
    def n(self) -> int:
        return len(self.xi) - 1

    @property
    def ball_point(self) -> np.ndarray:
        """The a with phi_a(a) = 0 realizing this conformal factor."""
        s = float(np.dot(self.xi, self.xi))
        return -self.xi / (1.0 + np.sqrt(1.0 - s))

    def conformal_factor(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=float)
        s = float(np.dot(self.xi, self.xi))
        return np.sqrt(1.0 - s) / (1.0 + zeta @ self.xi)

    def jacobian(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=float)
        _check_on_sphere(np.atleast_2d(zeta))
        return self.conformal_factor(zeta) ** self.n

    def __call__(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=float)
        _check_on_sphere(np.atleast_2d(zeta))
        out = _moebius(self.ball_point, zeta)
        if self.rotation is not None:
            out = out @ self.rotation.T
        return out

    def compose(self, other: MobiusMap) -> MobiusMap:
        """self o other."""
        n = self.n
        e = np.eye(n + 1)
        # 1/lambda is affine in zeta: c0 + c . zeta
        inv_plus = 1.0 / (self.conformal_factor(other(e)) * other.conformal_factor(e))
        inv_minus = 1.0 / (self.conformal_factor(other(-e)) * other.conformal_factor(-e))
        c = (inv_plus - inv_minus) / 2.0
        c0 = float(np.mean((inv_plus + inv_minus) / 2.0))
        xi = c / c0
        bare = MobiusMap(xi)
        # rotation: composite o bare^{-1} is linear on the sphere
        pre = _moebius(-bare.ball_point, e)
        R = self(other(pre)).T
        u, _, vt = np.linalg.svd(R)
        return MobiusMap(xi, u @ vt)

    def inverse(self) -> MobiusMap:
        """Inverse map; phi_a^{-1} = phi_{-a}."""
        n = self.n
        e = np.eye(n + 1)
        rot = np.eye(n + 1) if self.rotation is None else self.rotation
        # zeta -> phi_{-a}(R^T zeta) has conformal factor of the bare map at -a
        bare_inv = _from_ball_point(-self.ball_point)
        unrotate = MobiusMap(np.zeros(n + 1), rot.T)
        return bare_inv.compose(unrotate) if self.rotation is not None else bare_inv

    def to_json(self) -> dict:
        rot = "identity" if self.rotation is None or np.allclose(self.rotation, np.eye(self.n + 1), atol=1e-15) \
            else self.rotation.tolist()
        return {"xi": self.xi.tolist(), "rotation": rot}

    @classmethod
    def from_json(cls, data: dict) -> MobiusMap:
        rot = data.get("rotation", "identity")
        return cls(np.array(data["xi"], float), None if rot == "identity" else np.array(rot, float))


def _from_ball_point(a: np.ndarray) -> MobiusMap:
    # |xi| = 2|a| / (1 + |a|^2), direction opposite to a
    s = float(np.dot(a, a))
    return MobiusMap(-2.0 * a / (1.0 + s))


def _moebius(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    diff = x - a
    d2 = np.sum(diff * diff, axis=-1, keepdims=True)
    return ((1.0 - np.dot(a, a)) * diff - d2 * a) / d2


def jacobian(phi: MobiusMap, zeta) -> np.ndarray:
    return phi.jacobian(zeta)


def apply(phi: MobiusMap, zeta) -> np.ndarray:
    return phi(zeta)


def numeric_jacobian(phi: MobiusMap, zeta: np.ndarray, h: float = 1e-6) -> float:
    """|det d phi| at zeta by central differences in an orthonormal tangent frame."""
    zeta = np.asarray(zeta, float)
    n = len(zeta) - 1
    # tangent frame: complete zeta to an orthonormal basis
    q, _ = np.linalg.qr(np.column_stack([zeta, np.eye(n + 1)]))
    frame = q[:, 1 : n + 1]
    image = phi(zeta[None, :])[0]
    columns = []
    for v in frame.T:
        plus = (zeta + h * v) / np.linalg.norm(zeta + h * v)
        minus = (zeta - h * v) / np.linalg.norm(zeta - h * v)
        columns.append((phi(plus[None, :])[0] - phi(minus[None, :])[0]) / (2 * h))
    D = np.column_stack(columns)
    q2, _ = np.linalg.qr(np.column_stack([image, np.eye(n + 1)]))
    out_frame = q2[:, 1 : n + 1]
    return abs(np.linalg.det(out_frame.T @ D))


def pullback_density(phi: MobiusMap, u: Callable, theta: float) -> Callable:
    """zeta -> |J_phi|(zeta)^theta * u(phi(zeta))."""

    def pulled(zeta):
        zeta = np.asarray(zeta, float)
        return phi.jacobian(zeta) ** theta * u(phi(zeta))

    return pulled


def default_moment_rule(n: int) -> SphereRule:
    # keeps the full product grid around half a million points
    per_level = max(5, int((5e5 / 2) ** (1.0 / n)))
    return sphere_rule(n, 2 * per_level - 1)


def moments(u: Callable, exponent: float, n: int, rule: SphereRule | None = None) -> np.ndarray:
    """Vector of integrals of x^i u^exponent over S^n, i = 0..n."""
    rule = default_moment_rule(n) if rule is None else rule
    values = np.asarray(u(rule.points), float)
    if float(exponent) != int(exponent) and np.any(values <= 0):
        raise ValueError("fractional power of a function that is not positive")
    dens = values ** float(exponent)
    return rule.points.T @ (rule.weights * dens)


class BalanceError(RuntimeError):
    def __init__(self, message: str, residual: float, xi: np.ndarray):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
        self.xi = xi


@dataclass
class BalanceResult:
    phi: MobiusMap
    function: Callable = field(repr=False)
    residual: float
    iterations: int

    def to_json(self) -> dict:
        return {"xi": self.phi.xi.tolist(), "residual": self.residual, "iterations": self.iterations}


def balance(
    u: Callable,
    exponent: float,
    n: int,
    *,
    rule: SphereRule | None = None,
    tol: float = 1e-10,
    max_iter: int = 200,
    fd_step: float = 1e-6,
) -> BalanceResult:
    """Find xi with vanishing first moments of (u_Phi)^exponent.

    u_Phi = |J_Phi|^{1/exponent} u o Phi.  Damped Newton on xi in the ball,
    central finite-difference Jacobian, step halving to stay inside the
    ball and to decrease the residual norm.
    """
    rule = default_moment_rule(n) if rule is None else rule
    theta = 1.0 / float(exponent)
    values = np.asarray(u(rule.points), float)
    if np.any(values <= 0):
        raise ValueError("balance needs a positive function")

    def residual(xi):
        return moments(pullback_density(MobiusMap(xi), u, theta), exponent, n, rule)

    xi = np.zeros(n + 1)
    F = residual(xi)
    norm = float(np.linalg.norm(F))
    it = 0
    while norm >= tol:
        if it >= max_iter:
            raise BalanceError("balancing did not converge", norm, xi)
        it += 1
        J = np.empty((n + 1, n + 1))
        for i in range(n + 1):
            step = np.zeros(n + 1)
            step[i] = fd_step
            J[:, i] = (residual(xi + step) - residual(xi - step)) / (2 * fd_step)
        delta = np.linalg.solve(J, -F)
        t = 1.0
        while True:
            trial = xi + t * delta
            if np.dot(trial, trial) < (1.0 - 1e-9) ** 2:
                F_trial = residual(trial)
                if np.linalg.norm(F_trial) < norm:
                    break
            t *= 0.5
            if t < 1e-8:
                # roundoff floor of the quadrature reached before tol
                raise BalanceError("line search stalled", norm, xi)
        xi, F = trial, F_trial
        norm = float(np.linalg.norm(F))
        log.debug("balance iteration %d: |xi|=%.3g residual=%.3e", it, np.linalg.norm(xi), norm)
    phi = MobiusMap(xi)
    return BalanceResult(phi, pullback_density(phi, u, theta), norm, it)
