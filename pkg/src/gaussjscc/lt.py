"""LT scheme: quantize onto correlated Gaussian codebooks.

Quantizer outputs W1, W2 keep a correlation ``rho_tilde`` that the channel
inputs inherit, so the MAC sum rate benefits from coherent combining.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _validate as v
from ._ratesolve import solve_two_rates
from .errors import InvalidParams, NoConvergence
from .gauss import JointGaussian
from .results import SchemeResult

RESID_TOL = 1e-10
MAX_ITER = 200


@dataclass(frozen=True)
class LtDesign:
    R1: float
    R2: float
    rho_tilde: float
    a: float
    b: float


def lt_rho_tilde(R1: float, R2: float, rho: float) -> float:
    R1, R2 = v.nonneg("R1", R1), v.nonneg("R2", R2)
    rho = v.rho(rho)
    return rho * math.sqrt(-math.expm1(-2 * R1 * math.log(2)) * -math.expm1(-2 * R2 * math.log(2)))


def lt_rate_bounds(a: float, b: float, rho_tilde: float, noise_var: float = 1.0):
    """Right-hand sides of the three LT rate constraints, in bits."""
    a, b = v.nonneg("a", a), v.nonneg("b", b)
    rt = v.rho(rho_tilde, "rho_tilde")
    n = v.positive("noise_var", noise_var)
    inv = 1.0 / (1.0 - rt ** 2)
    r1 = 0.5 * math.log2(a / n + inv)
    r2 = 0.5 * math.log2(b / n + inv)
    rs = 0.5 * math.log2((n + a + b + 2.0 * rt * math.sqrt(a * b)) * inv / n)
    return r1, r2, rs


def lt_distortions(R1: float, R2: float, rho: float, var1: float = 1.0, var2: float = 1.0):
    """MMSE distortions of (U1, U2) given both quantizer outputs."""
    rt = lt_rho_tilde(R1, R2, rho)
    var1, var2 = v.positive("var1", var1), v.positive("var2", var2)
    x1, x2 = 2.0 ** (-2 * R1), 2.0 ** (-2 * R2)
    den = 1.0 - rt ** 2
    d1 = var1 * x1 * (1.0 - rho ** 2 * (1.0 - x2)) / den
    d2 = var2 * x2 * (1.0 - rho ** 2 * (1.0 - x1)) / den
    return d1, d2


def lt_covariance(R1: float, R2: float, rho: float, var1: float = 1.0, var2: float = 1.0) -> JointGaussian:
    """Joint law of (U1, U2, W1, W2) for quantizer rates (R1, R2).

    W_i is scaled so that E[U_i W_i] = var(W_i) = var_i (1 - 2^{-2R_i}),
    which makes corr(W1, W2) equal to ``lt_rho_tilde``.
    """
    s1, s2 = math.sqrt(var1), math.sqrt(var2)
    k1, k2 = 1.0 - 2.0 ** (-2 * R1), 1.0 - 2.0 ** (-2 * R2)
    c = rho * s1 * s2
    cov = np.array([
        [var1, c, var1 * k1, c * k2],
        [c, var2, c * k1, var2 * k2],
        [var1 * k1, c * k1, var1 * k1, c * k1 * k2],
        [c * k2, var2 * k2, c * k1 * k2, var2 * k2],
    ])
    return JointGaussian(("U1", "U2", "W1", "W2"), cov)


def lt_slack(R1, R2, a, b, rho, noise_var=1.0):
    """``bound - rate`` for the individual and sum constraints."""
    rt = lt_rho_tilde(R1, R2, rho)
    b1, b2, bs = lt_rate_bounds(a, b, rt, noise_var)
    return np.array([b1 - R1, b2 - R2, bs - R1 - R2])


@dataclass(frozen=True)
class LtSymmetricSolution:
    D: float
    R: float
    rho_tilde: float
    residual: float
    iterations: int
    method: str
    slack: tuple[float, float, float]

    def __iter__(self):
        return iter((self.D, self.R, self.rho_tilde))


def _sum_rate(S, rt):
    return 0.25 * math.log2((1.0 + 2.0 * S * (1.0 + rt)) / (1.0 - rt ** 2))


def _indiv_rate(S, rt):
    return 0.5 * math.log2(S + 1.0 / (1.0 - rt ** 2))


def _fixed_point(S, rho, rate_fn):
    def resid_at(rt):
        return rho * -math.expm1(-2.0 * rate_fn(S, rt) * math.log(2)) - rt

    # iterate well past RESID_TOL so the sum-rate constraint is tight to rounding
    target = 1e-14
    rt, it = 0.0, 0
    for it in range(1, MAX_ITER + 1):
        r = resid_at(rt)
        if abs(r) <= target:
            return rt, abs(r), it, "fixed-point"
        rt = min(max(rt + 0.5 * r, 0.0), rho)
    if abs(resid_at(rt)) <= RESID_TOL:
        return rt, abs(resid_at(rt)), it, "fixed-point"
    # residual is >= 0 at 0 and < 0 at rho; bisect
    lo, hi = 0.0, rho
    for k in range(1, MAX_ITER + 1):
        mid = 0.5 * (lo + hi)
        r = resid_at(mid)
        if abs(r) <= target or hi - lo <= 1e-16:
            break
        if r > 0:
            lo = mid
        else:
            hi = mid
    if abs(r) > RESID_TOL:
        raise NoConvergence(f"LT fixed point did not converge (S={S}, rho={rho})")
    return mid, abs(r), it + k, "bisection"


def lt_optimize_symmetric(S: float, rho: float, var: float = 1.0) -> LtSymmetricSolution:
    """Symmetric LT design where the sum-rate constraint holds with equality."""
    S = v.nonneg("S", S)
    rho = v.rho(rho)
    var = v.positive("var", var)
    rt, resid, it, method = _fixed_point(S, rho, _sum_rate)
    R = _sum_rate(S, rt)
    slack = tuple(float(x) for x in lt_slack(R, R, S, S, rho))
    if min(slack[:2]) < -1e-9:
        rt, resid, it, method = _fixed_point(S, rho, _indiv_rate)
        R = _indiv_rate(S, rt)
        slack = tuple(float(x) for x in lt_slack(R, R, S, S, rho))
        method += "+individual"
    D = lt_distortions(R, R, rho)[0] * var
    return LtSymmetricSolution(D, R, rt, resid, it, method, slack)


def lt_high_snr_approx(S: float, rho: float, var: float = 1.0) -> float:
    return var * math.sqrt((1.0 - rho) / (2.0 * S))


def lt_low_snr_approx(S: float, rho: float, rho_tilde: float, var: float = 1.0) -> float:
    """Low-SNR closed form, evaluated at a given input correlation."""
    sb = S * (1.0 + rho_tilde)
    e = 2.0 ** (-sb)
    root = math.sqrt(1.0 - rho_tilde ** 2)
    return var * e * (1.0 - rho ** 2 * (1.0 - root * e)) / root


def lt_weighted(R1, R2, rho, var1=1.0, var2=1.0, beta1=1.0, beta2=1.0) -> float:
    d1, d2 = lt_distortions(R1, R2, rho, var1, var2)
    return beta1 * d1 + beta2 * d2


def lt_optimize(P1, P2, rho, noise_var=1.0, var1=1.0, var2=1.0, beta1=1.0, beta2=1.0) -> SchemeResult:
    """Minimize the weighted LT distortion over quantizer rates at fixed powers."""
    P1, P2 = v.nonneg("P1", P1), v.nonneg("P2", P2)
    rho = v.rho(rho)
    noise_var = v.positive("noise_var", noise_var)
    if beta1 <= 0 or beta2 <= 0:
        raise InvalidParams("weights must be positive")

    def obj(r):
        return lt_weighted(max(r[0], 0.0), max(r[1], 0.0), rho, var1, var2, beta1, beta2)

    def cons(r):
        return lt_slack(max(r[0], 0.0), max(r[1], 0.0), P1, P2, rho, noise_var)

    rmax = lt_rate_bounds(P1, P2, rho, noise_var)
    r, f = solve_two_rates(obj, cons, [rmax[0] + 0.5, rmax[1] + 0.5])
    d1, d2 = lt_distortions(r[0], r[1], rho, var1, var2)
    s = cons(r)
    return SchemeResult(
        "LT", float(d1), float(d2), (P1, P2), (float(r[0]), float(r[1])),
        {"R1": float(s[0]), "R2": float(s[1]), "sum": float(s[2])},
        {"rho_tilde": lt_rho_tilde(r[0], r[1], rho), "objective": f},
    )
