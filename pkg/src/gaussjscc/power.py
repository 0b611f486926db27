"""Power allocation under per-user power caps.

For AF the weighted distortion is not monotone in the powers: beyond a
critical power one user's signal mostly interferes with the other, so the
optimum may leave power unused. SB and LT always use full power; the
checker here tries to falsify that on a grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import _validate as v
from .errors import DegenerateCorrelation, InvalidParams, UnsupportedScheme
from .lt import lt_optimize, lt_weighted
from .sb import sb_optimize

KKT_TOL = 1e-6


@dataclass(frozen=True)
class PowerSolution:
    a_star: float
    b_star: float
    D_min: float
    active_constraints: tuple[str, ...]
    kkt_residual: float


def _check_weights(beta1, beta2):
    if not (beta1 > 0 and beta2 > 0):
        raise InvalidParams("weights must be positive")


def af_weighted_objective(a, b, rho, beta1=1.0, beta2=1.0) -> float:
    """beta1 D1 + beta2 D2 for AF at powers (a, b), unit variances and noise."""
    a, b = v.nonneg("a", a), v.nonneg("b", b)
    rho = v.rho(rho)
    _check_weights(beta1, beta2)
    return _obj(a, b, rho, beta1, beta2)


def _obj(a, b, rho, beta1, beta2):
    u = 1.0 - rho ** 2
    den = a + b + 2.0 * math.sqrt(a * b) * rho + 1.0
    return (beta1 * (b * u + 1.0) + beta2 * (a * u + 1.0)) / den


def _grad(a, b, rho, beta1, beta2):
    u = 1.0 - rho ** 2
    den = a + b + 2.0 * math.sqrt(a * b) * rho + 1.0
    num = beta1 * (b * u + 1.0) + beta2 * (a * u + 1.0)
    # d sqrt(ab)/da blows up at a = 0 when b > 0
    da_den = 1.0 + (rho * math.sqrt(b / a) if a > 0 else (math.inf if b > 0 and rho > 0 else 0.0))
    db_den = 1.0 + (rho * math.sqrt(a / b) if b > 0 else (math.inf if a > 0 and rho > 0 else 0.0))
    ga = (beta2 * u * den - num * da_den) / den ** 2
    gb = (beta1 * u * den - num * db_den) / den ** 2
    return ga, gb


def af_critical_power(a: float, rho: float) -> float:
    """Power b minimizing D1 + D2 when the other user transmits at power a."""
    a = v.positive("a", a)
    rho = v.rho(rho)
    if rho == 0.0:
        raise DegenerateCorrelation("critical power is infinite at rho = 0")
    p, u = 1.0 + rho ** 2, 1.0 - rho ** 2
    root = math.sqrt(p ** 2 + 4.0 * a * rho ** 2 * u * (a * u + 2.0))
    return ((p + root) / (2.0 * math.sqrt(a) * rho * u)) ** 2


def _slice_min(f, upper, n=400):
    """Minimize f on [0, upper] by a sqrt-spaced grid then bounded Brent."""
    if upper <= 0:
        return 0.0, f(0.0)
    t = np.linspace(0.0, math.sqrt(upper), n)
    vals = [f(x * x) for x in t]
    k = int(np.argmin(vals))
    lo, hi = t[max(k - 1, 0)], t[min(k + 1, n - 1)]
    res = minimize_scalar(lambda x: f(x * x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-13 * max(1.0, hi)})
    cands = [(vals[k], t[k] ** 2), (res.fun, res.x ** 2), (f(0.0), 0.0), (f(upper), upper)]
    best = min(cands)
    return best[1], best[0]


def _kkt_residual(a, b, P1, P2, rho, beta1, beta2):
    ga, gb = _grad(a, b, rho, beta1, beta2)
    out = 0.0
    for x, g, hi in ((a, ga, P1), (b, gb, P2)):
        at_hi = abs(x - hi) <= 1e-9 * max(hi, 1.0)
        at_lo = x <= 1e-12
        if at_hi and at_lo:
            r = 0.0
        elif at_hi:
            r = max(g, 0.0)
        elif at_lo:
            r = max(-g, 0.0)
        else:
            r = abs(g)
        out = max(out, r)
    return out


def optimize_af_powers(P1, P2, rho, beta1=1.0, beta2=1.0) -> PowerSolution:
    """Global minimizer of the weighted AF distortion on [0, P1] x [0, P2]."""
    P1, P2 = v.positive("P1", P1), v.positive("P2", P2)
    rho = v.rho(rho)
    _check_weights(beta1, beta2)

    def f(a, b):
        return _obj(a, b, rho, beta1, beta2)

    cands = [(P1, P2)]
    equal = beta1 == beta2 and rho > 0
    # slice a = P1: closed form for the unweighted sum, numerical otherwise
    if equal:
        cands.append((P1, min(af_critical_power(P1, rho), P2)))
        cands.append((min(af_critical_power(P2, rho), P1), P2))
    else:
        cands.append((P1, _slice_min(lambda b: f(P1, b), P2)[0]))
        cands.append((_slice_min(lambda a: f(a, P2), P1)[0], P2))
    cands.append((0.0, _slice_min(lambda b: f(0.0, b), P2)[0]))
    cands.append((_slice_min(lambda a: f(a, 0.0), P1)[0], 0.0))

    # interior stationary points
    def fun(x):
        a, b = np.clip(x, [0.0, 0.0], [P1, P2])
        return f(a, b), np.array(_grad(max(a, 1e-300), max(b, 1e-300), rho, beta1, beta2))

    for fa in (0.1, 0.5, 0.9):
        for fb in (0.1, 0.5, 0.9):
            res = minimize(fun, [fa * P1, fb * P2], jac=True, method="L-BFGS-B",
                           bounds=[(1e-12, P1), (1e-12, P2)],
                           options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 500})
            cands.append(tuple(float(x) for x in res.x))

    scored = sorted((f(a, b), i, a, b) for i, (a, b) in enumerate(cands))
    d, _, a, b = scored[0]
    active = []
    if abs(a - P1) <= 1e-9 * P1:
        active.append("a<=P1")
    if abs(b - P2) <= 1e-9 * P2:
        active.append("b<=P2")
    kkt = _kkt_residual(a, b, P1, P2, rho, beta1, beta2)
    return PowerSolution(float(a), float(b), float(d), tuple(active), float(kkt))


def lt_weighted_objective(R1, R2, rho, var1=1.0, var2=1.0, beta1=1.0, beta2=1.0) -> float:
    _check_weights(beta1, beta2)
    return lt_weighted(R1, R2, rho, var1, var2, beta1, beta2)


def scheme_objective(scheme: str, a, b, rho, beta1=1.0, beta2=1.0) -> float:
    """Optimal weighted distortion of SB or LT when transmitting at powers (a, b)."""
    scheme = scheme.upper()
    if scheme == "SB":
        return sb_optimize(a, b, rho, beta1=beta1, beta2=beta2).weighted(beta1, beta2)
    if scheme == "LT":
        return lt_optimize(a, b, rho, beta1=beta1, beta2=beta2).weighted(beta1, beta2)
    raise UnsupportedScheme(f"full-power check applies to SB and LT only, got {scheme!r}")


def verify_full_power_optimal(scheme: str, P1, P2, rho, beta1=1.0, beta2=1.0,
                              grid: int = 20, tol: float = 1e-9) -> bool:
    """Check that no interior grid point beats transmitting at (P1, P2).

    A falsification test over a ``grid`` x ``grid`` lattice, not a proof.
    """
    if scheme.upper() not in ("SB", "LT"):
        raise UnsupportedScheme(f"full-power check applies to SB and LT only, got {scheme!r}")
    P1, P2 = v.positive("P1", P1), v.positive("P2", P2)
    rho = v.rho(rho)
    full = scheme_objective(scheme, P1, P2, rho, beta1, beta2)
    fr = np.arange(1, grid + 1) / (grid + 1)
    for a in fr * P1:
        for b in fr * P2:
            if scheme_objective(scheme, a, b, rho, beta1, beta2) < full - tol:
                return False
    return True
