"""Separation-based scheme: quantize, Slepian-Wolf bin, send on independent codes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _validate as v
from ._ratesolve import solve_two_rates
from .errors import InvalidParams
from .lt import lt_distortions, lt_rho_tilde
from .results import SchemeResult

SLACK = 1e-12


@dataclass(frozen=True)
class RatePair:
    R1: float
    R2: float

    def __post_init__(self):
        v.nonneg("R1", self.R1)
        v.nonneg("R2", self.R2)


def capacity(snr: float) -> float:
    """Point-to-point AWGN capacity in bits."""
    return 0.5 * math.log2(1.0 + snr)


def sb_beta(D1, D2, var1, var2, rho) -> float:
    return 1.0 + math.sqrt(1.0 + 4.0 * rho ** 2 * D1 * D2 / (var1 * var2 * (1.0 - rho ** 2) ** 2))


def _check_region_args(D1, D2, var1, var2, rho):
    var1, var2 = v.positive("var1", var1), v.positive("var2", var2)
    D1, D2 = v.positive("D1", D1), v.positive("D2", D2)
    if D1 > var1 * (1 + 1e-12) or D2 > var2 * (1 + 1e-12):
        raise InvalidParams("distortions must not exceed the source variances")
    return D1, D2, var1, var2, v.rho(rho)


def sb_region_bounds(r: RatePair, D1, D2, var1=1.0, var2=1.0, rho=0.0):
    """Minimum (R1, R2, R1 + R2) required for distortions (D1, D2).

    The individual bounds depend on the other user's rate, so the pair
    ``r`` is needed to evaluate them.
    """
    D1, D2, var1, var2, rho = _check_region_args(D1, D2, var1, var2, rho)
    r2 = 1.0 - rho ** 2
    need1 = 0.5 * math.log2(var1 * (r2 + rho ** 2 * 2.0 ** (-2 * r.R2)) / D1)
    need2 = 0.5 * math.log2(var2 * (r2 + rho ** 2 * 2.0 ** (-2 * r.R1)) / D2)
    beta = sb_beta(D1, D2, var1, var2, rho)
    need_sum = 0.5 * math.log2(var1 * var2 * r2 * beta / (2.0 * D1 * D2))
    return need1, need2, need_sum


def sb_region_contains(r: RatePair, D1, D2, var1=1.0, var2=1.0, rho=0.0) -> bool:
    need1, need2, need_sum = sb_region_bounds(r, D1, D2, var1, var2, rho)
    return (r.R1 >= need1 - SLACK and r.R2 >= need2 - SLACK
            and r.R1 + r.R2 >= need_sum - SLACK)


def sb_symmetric_distortion_from_rate(R: float, rho: float) -> float:
    """Per-user distortion when both unit-variance sources are coded at rate R."""
    R = v.nonneg("R", R)
    rho = v.rho(rho)
    return math.sqrt(2.0 ** (-4 * R) * (1.0 - rho ** 2) + rho ** 2 * 2.0 ** (-8 * R))


def sb_gmac_rate(S: float) -> float:
    """Per-user rate: half the independent-input sum capacity of the MAC."""
    return 0.25 * math.log2(1.0 + 2.0 * v.nonneg("S", S))


def sb_gmac_distortion(S: float, rho: float, var: float = 1.0) -> float:
    return v.positive("var", var) * sb_symmetric_distortion_from_rate(sb_gmac_rate(S), rho)


def sb_high_snr_bound(S_eff: float, rho: float, var: float = 1.0) -> float:
    """sqrt(var^2 (1-rho^2)/S + var^2 rho^2/S^2); tight when 2^{4R} = S."""
    S_eff = v.positive("S_eff", S_eff)
    return var * math.sqrt((1.0 - rho ** 2) / S_eff + rho ** 2 / S_eff ** 2)


def sb_low_snr_bound(S: float, rho: float, var: float = 1.0) -> float:
    S = v.nonneg("S", S)
    return rho ** 2 * var ** 2 * 2.0 ** (-4 * S) + var * (1.0 - rho ** 2) * 2.0 ** (-2 * S)


def binned_rates(r1: float, r2: float, rho: float):
    """Slepian-Wolf rates needed for Gaussian quantizers of rates (r1, r2).

    Returns (I(U1;W1|W2), I(U2;W2|W1), I(U1U2;W1W2)).
    """
    rt = lt_rho_tilde(r1, r2, rho)
    corr = 0.5 * math.log2(1.0 - rt ** 2)
    return r1 + corr, r2 + corr, r1 + r2 + corr


def channel_capacities(P1, P2, noise_var=1.0, channel="gmac", noise_var2=None):
    """Independent-input capacity polytope (C1, C2, C12)."""
    if channel == "gmac":
        return capacity(P1 / noise_var), capacity(P2 / noise_var), capacity((P1 + P2) / noise_var)
    if channel == "orthogonal":
        n2 = noise_var if noise_var2 is None else noise_var2
        c1, c2 = capacity(P1 / noise_var), capacity(P2 / n2)
        return c1, c2, c1 + c2
    raise InvalidParams(f"unknown channel {channel!r}")


def sb_optimize(P1, P2, rho, noise_var=1.0, var1=1.0, var2=1.0, beta1=1.0, beta2=1.0,
                channel="gmac", noise_var2=None) -> SchemeResult:
    """Best weighted distortion of SB at powers (P1, P2).

    Quantizers are Gaussian test channels; a quantizer-rate pair is usable
    when its Slepian-Wolf rates fit inside the channel capacity polytope.
    """
    P1, P2 = v.nonneg("P1", P1), v.nonneg("P2", P2)
    rho = v.rho(rho)
    noise_var = v.positive("noise_var", noise_var)
    if beta1 <= 0 or beta2 <= 0:
        raise InvalidParams("weights must be positive")
    caps = np.array(channel_capacities(P1, P2, noise_var, channel, noise_var2))

    def obj(r):
        d1, d2 = lt_distortions(r[0], r[1], rho, var1, var2)
        return beta1 * d1 + beta2 * d2

    def cons(r):
        return caps - np.array(binned_rates(r[0], r[1], rho))

    extra = 0.5 * math.log2(1.0 / (1.0 - rho ** 2)) + 0.5
    r, f = solve_two_rates(obj, cons, [caps[0] + extra, caps[1] + extra])
    d1, d2 = lt_distortions(r[0], r[1], rho, var1, var2)
    s = cons(r)
    bins = binned_rates(r[0], r[1], rho)
    # operating point inside both the Slepian-Wolf region and the capacity polytope
    excess = max(bins[2] - bins[0] - bins[1], 0.0)
    t = min(excess, max(caps[0] - bins[0], 0.0))
    R1, R2 = bins[0] + t, bins[1] + excess - t
    return SchemeResult(
        "SB", float(d1), float(d2), (P1, P2), (float(R1), float(R2)),
        {"R1": float(s[0]), "R2": float(s[1]), "sum": float(s[2])},
        {"quantizer_rates": (float(r[0]), float(r[1])), "sum_rate": float(bins[2]),
         "objective": f, "channel": channel},
    )
