"""Command-line front end.

    confsphere verify-identities --n 5 --k 2 --degree 3 --trials 20 --seed 1
    confsphere bubble-check --n 5 --k 1 --xi 0,0.3,0.6
    confsphere balance --n 5 --k 1 --init bubble:0.4
    confsphere minimize --n 5 --k 1 --L 6 --seed 1

Every command writes a JSON report ("schema": 1) to --out, or to stdout
when --out is absent, and a one-line summary to stdout (stderr when the
JSON itself goes to stdout).  Exit codes: 0 ok,
1 a check failed or a solver did not converge, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .conformal import BalanceError, balance, default_moment_rule
from .exact_poly import DimensionMismatch
from .extremal import (
    AdmissibilityError,
    deficit,
    energy,
    euler_lagrange_residual,
    mass,
    minimize_quotient,
)
from .identities import gjms_battery, sigma2_battery
from .operators import gjms_descriptor, sigma2_descriptor
from .quadrature import jacobi_rule, sphere_rule
from .sphere_calc import SphereFunction, omega
from .zonal import ZonalFunction, bubble, sigma1_zonal

SCHEMA = 1
log = logging.getLogger("confsphere")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int
    k: int | None = None
    sigma2: bool = False
    degree: int = 3
    seed: int = 1
    trials: int = 20
    nodes: int | None = None
    tol: float | None = None
    xi: str = "0,0.3,0.6"
    L: int = 6
    init: str | None = None
    out: str | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        fields = {k: v for k, v in vars(args).items() if k in cls.__dataclass_fields__}
        return cls(**fields)

    def descriptor(self):
        try:
            if self.sigma2:
                return sigma2_descriptor(self.n)
            if self.k is None:
                raise ConfigError("--k is required unless --sigma2 is given")
            return gjms_descriptor(self.n, self.k)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _emit(report: dict, cfg: RunConfig, summary: str) -> None:
    report = {"schema": SCHEMA, "version": __version__, **report}
    text = json.dumps(report, indent=2, sort_keys=False)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
        print(summary)
    else:
        # stdout carries the JSON, so the summary goes to stderr
        sys.stdout.write(text + "\n")
        print(summary, file=sys.stderr)


# commands ------------------------------------------------------------------


def cmd_verify_identities(cfg: RunConfig) -> int:
    n = cfg.n
    if n < 3:
        raise ConfigError("need n >= 3")
    if cfg.degree < 0 or cfg.trials < 1:
        raise ConfigError("degree must be >= 0 and trials >= 1")
    suites = []
    if cfg.sigma2:
        if n < 5:
            raise ConfigError("sigma_2 identities need n >= 5")
        suites.append(("sigma2", None))
    elif cfg.k is not None:
        if not 1 <= cfg.k or not 2 * cfg.k < n:
            raise ConfigError(f"k must satisfy 1 <= k < n/2, got k={cfg.k}")
        suites.append(("gjms", cfg.k))
    else:
        # the full suite: every GJMS order and the sigma_2 identities
        if n < 5:
            raise ConfigError("the full suite includes sigma_2, which needs n >= 5")
        suites.extend(("gjms", k) for k in range(1, (n - 1) // 2 + 1))
        suites.append(("sigma2", None))

    reports = []
    for name, k in suites:
        if name == "gjms":
            reports.extend(gjms_battery(n, k, cfg.degree, cfg.trials, cfg.seed))
        else:
            reports.extend(sigma2_battery(n, cfg.degree, cfg.trials, cfg.seed))
    rows = [r.to_json() for r in reports]
    failed = [r for r in rows if not r["verdict"]]
    _emit(
        {"command": "verify-identities", "config": asdict(cfg), "passed": not failed, "checks": len(rows), "reports": rows},
        cfg,
        f"verify-identities n={n}: {len(rows) - len(failed)}/{len(rows)} exact",
    )
    return 0 if not failed else 1


def _parse_xi(text: str) -> list:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --xi list {text!r}") from exc
    if not values or any(not 0 <= v < 1 for v in values):
        raise ConfigError("--xi values must lie in [0, 1)")
    return values


def cmd_bubble_check(cfg: RunConfig) -> int:
    desc = cfg.descriptor()
    n = desc.n
    tol = 1e-6 if cfg.tol is None else cfg.tol
    nodes = cfg.nodes or 200
    w = omega(n)
    power = (n - 4) / 4 if cfg.sigma2 else (n - 2 * desc.k) / 2
    N = float(desc.mass_exponent)
    rows = []
    ok = True
    for r in _parse_xi(cfg.xi):
        row = {"xi": r}
        if r == 0.0:
            one = SphereFunction.constant(n, 1)
            row.update(
                mass_rel_err=0.0,
                energy_rel_err=float(abs(energy(one, desc).coefficient - desc.sharp) / desc.sharp),
                deficit=float(deficit(one, desc)),
                el_residual=float(euler_lagrange_residual(ZonalFunction.constant(n, 1.0), desc)),
                exact=True,
            )
            if cfg.sigma2:
                row["min_sigma1"] = float(sigma1_zonal(ZonalFunction.constant(n, 1.0))(0.0))
        else:
            u = bubble(n, r, power)
            E = float(energy(u, desc))
            M = mass(u, N)
            row.update(
                mass_rel_err=abs(M - w) / w,
                energy_rel_err=abs(E - float(desc.sharp) * w) / (float(desc.sharp) * w),
                deficit=float(deficit(u, desc)) / w,
                el_residual=euler_lagrange_residual(u, desc, E),
                exact=False,
            )
            if cfg.sigma2:
                row["min_sigma1"] = float(np.min(sigma1_zonal(u)(jacobi_rule(n, nodes).nodes)))
        row["passed"] = bool(
            row["mass_rel_err"] < 1e-8
            and abs(row["deficit"]) < tol
            and row["el_residual"] < 1e-7
            and row.get("min_sigma1", 1.0) > 0
        )
        ok &= row["passed"]
        rows.append(row)
    _emit(
        {"command": "bubble-check", "config": asdict(cfg), "descriptor": desc.name, "passed": ok, "cases": rows},
        cfg,
        f"bubble-check {desc.name} n={n}: {sum(r['passed'] for r in rows)}/{len(rows)} within tolerance",
    )
    return 0 if ok else 1


def _input_function(spec: str, n: int, power: float):
    """constant | bubble:R | perturbed:EPS | poly:<polynomial in x0..xn>."""
    kind, _, arg = (spec or "constant").partition(":")
    if kind in ("bubble", "perturbed") and arg:
        try:
            float(arg)
        except ValueError as exc:
            raise ConfigError(f"bad parameter in {spec!r}") from exc
    if kind == "constant":
        return lambda pts: np.ones(len(pts))
    if kind == "bubble":
        return bubble(n, float(arg), power).on_sphere()
    if kind == "perturbed":
        eps = float(arg or 0.1)
        return lambda pts: 1.0 + eps * np.asarray(pts)[:, 0]
    if kind == "poly":
        try:
            f = SphereFunction.parse(n, arg)
        except ValueError as exc:
            raise ConfigError(f"cannot parse polynomial {arg!r}") from exc
        return f.evaluate
    raise ConfigError(f"unknown input function {spec!r}")


def cmd_balance(cfg: RunConfig) -> int:
    desc = cfg.descriptor()
    n = desc.n
    power = (n - 4) / 4 if cfg.sigma2 else (n - 2 * desc.k) / 2
    u = _input_function(cfg.init, n, power)
    N = float(desc.mass_exponent)
    rule = sphere_rule(n, 2 * cfg.nodes - 1) if cfg.nodes else None
    try:
        result = balance(u, N, n, rule=rule, tol=cfg.tol or 1e-10)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    except BalanceError as exc:
        _emit(
            {"command": "balance", "config": asdict(cfg), "converged": False, "xi": exc.xi.tolist(), "residual": exc.residual},
            cfg,
            f"balance: no convergence ({exc})",
        )
        return 1
    pts = (rule or default_moment_rule(n)).points
    vals = result.function(pts)
    _emit(
        {
            "command": "balance",
            "config": asdict(cfg),
            "converged": True,
            "xi": result.phi.xi.tolist(),
            "residual": result.residual,
            "iterations": result.iterations,
            "balanced_min": float(np.min(vals)),
            "balanced_max": float(np.max(vals)),
        },
        cfg,
        f"balance: |xi| = {np.linalg.norm(result.phi.xi):.6g}, residual {result.residual:.3e}",
    )
    return 0


def cmd_minimize(cfg: RunConfig) -> int:
    desc = cfg.descriptor()
    if not 0 <= cfg.L <= 8:
        raise ConfigError("--L must lie in 0..8")
    tol = cfg.tol if cfg.tol is not None else (1e-3 if cfg.sigma2 else 1e-4)
    try:
        result = minimize_quotient(desc, cfg.L, cfg.seed, init=cfg.init or "random", degree=cfg.nodes)
    except AdmissibilityError as exc:
        _emit({"command": "minimize", "config": asdict(cfg), "converged": False, "error": str(exc)}, cfg, f"minimize: {exc}")
        return 1
    gap = abs(result.quotient - result.sharp) / omega(desc.n)
    ok = result.converged and gap <= tol
    report = {"command": "minimize", "config": asdict(cfg), **result.to_json(), "within_tolerance": gap <= tol}
    _emit(
        report,
        cfg,
        f"minimize {desc.name} n={desc.n}: quotient {result.quotient:.12g} vs sharp {result.sharp:.12g} "
        f"after {result.iterations} iterations",
    )
    return 0 if ok else 1


COMMANDS = {
    "verify-identities": cmd_verify_identities,
    "bubble-check": cmd_bubble_check,
    "balance": cmd_balance,
    "minimize": cmd_minimize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="confsphere", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, required=True, help="sphere dimension")
        p.add_argument("--k", type=int, help="GJMS half-order")
        p.add_argument("--sigma2", action="store_true", help="use the sigma_2 operator")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--nodes", type=int, help="quadrature size override")
        p.add_argument("--tol", type=float, help="acceptance tolerance")
        p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("verify-identities", help="exact commutator and Dirichlet-form batteries")
    common(p)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--trials", type=int, default=20)

    p = sub.add_parser("bubble-check", help="equality cases on bubbles")
    common(p)
    p.add_argument("--xi", default="0,0.3,0.6", help="comma list of |xi| values")

    p = sub.add_parser("balance", help="conformally balance a positive function")
    common(p)
    p.add_argument("--init", default="constant", help="constant | bubble:R | perturbed:EPS | poly:EXPR")

    p = sub.add_parser("minimize", help="minimize the Sobolev quotient")
    common(p)
    p.add_argument("--L", type=int, default=6, help="truncation degree")
    p.add_argument("--init", default="random", choices=["random", "constant"])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    cfg = RunConfig.from_args(args)
    try:
        return COMMANDS[args.command](cfg)
    except (ConfigError, DimensionMismatch) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
