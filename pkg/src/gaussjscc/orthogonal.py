"""Correlated Gaussian sources over two orthogonal AWGN channels.

Separation is optimal here, so the SB curve is the benchmark and the
interest is in how far uncoded AF falls short of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import _validate as v


@dataclass(frozen=True)
class OrthParams:
    P1: float
    P2: float
    var1: float = 1.0
    var2: float = 1.0
    rho: float = 0.0
    noise_var1: float = 1.0
    noise_var2: float = 1.0

    def __post_init__(self):
        v.nonneg("P1", self.P1)
        v.nonneg("P2", self.P2)
        v.positive("var1", self.var1)
        v.positive("var2", self.var2)
        v.rho(self.rho)
        v.positive("noise_var1", self.noise_var1)
        v.positive("noise_var2", self.noise_var2)


def orth_af_distortions(p: OrthParams) -> tuple[float, float]:
    r2 = 1.0 - p.rho ** 2
    n1, n2 = p.noise_var1, p.noise_var2
    den = p.P1 * p.P2 * r2 + n2 * p.P1 + n1 * p.P2 + n1 * n2
    d1 = p.var1 * n1 * (p.P2 * r2 + n2) / den
    d2 = p.var2 * n2 * (p.P1 * r2 + n1) / den
    return d1, d2


def orth_sb_distortion(S: float, rho: float) -> float:
    S = v.nonneg("S", S)
    rho = v.rho(rho)
    return math.sqrt((1.0 - rho ** 2) / (1.0 + S) ** 2 + rho ** 2 / (1.0 + S) ** 4)


def orth_af_symmetric(S: float, rho: float) -> float:
    S = v.nonneg("S", S)
    rho = v.rho(rho)
    r2 = 1.0 - rho ** 2
    return (S * r2 + 1.0) / (1.0 + 2.0 * S + S ** 2 * r2)


@dataclass(frozen=True)
class GapBounds:
    """Sandwich and gap bounds for AF versus SB on orthogonal channels.

    ``hi_snr``, ``lo_snr`` and ``rho`` are the final bounds on
    D(AF) - D(SB); the ``*_stages`` tuples hold every intermediate bound of
    each chain, loosest last.

    ``D_LB`` is S(1-rho^2)/(1+S)^2. The intermediate steps of the high-SNR
    and rho chains only hold with the tighter common lower bound
    ``D_LB_tight`` = (1 + S(1-rho^2))/(1+S)^2, so those stages use it.
    """

    D_LB: float
    D_UB: float
    hi_snr: float
    lo_snr: float
    rho: float
    hi_snr_stages: tuple[float, ...]
    lo_snr_stages: tuple[float, ...]
    rho_stages: tuple[float, ...]
    D_LB_tight: float

    def __iter__(self):
        return iter((self.D_LB, self.D_UB, self.hi_snr, self.lo_snr, self.rho))


def orth_gap_bounds(S: float, rho: float) -> GapBounds:
    S = v.nonneg("S", S)
    rho = v.rho(rho)
    r2 = 1.0 - rho ** 2
    p2 = rho ** 2
    lb = S * r2 / (1.0 + S) ** 2
    lb_tight = (1.0 + S * r2) / (1.0 + S) ** 2
    ub = (1.0 + S) / (1.0 + S * r2) ** 2

    if S > 0:
        hi = p2 / S * (1.0 / r2 ** 2 + 1.0 / r2 + 1.0)
    else:
        hi = math.inf
    hi_stages = (ub - lb_tight, hi)

    lo_stages = (S * (2.0 + S) * (1.0 + S * r2) / (1.0 + S) ** 2, S + S / (1.0 + S))

    q = 1.0 + 2.0 * S + S ** 2 * r2
    rho_stages = (
        S ** 2 * p2 * (1.0 + S * r2) / ((1.0 + S) ** 2 * q),
        p2 * (1.0 + S * r2) / q,
        p2 / (1.0 + S * r2),
        p2,
    )
    return GapBounds(lb, ub, hi, lo_stages[-1], p2, hi_stages, lo_stages, rho_stages, lb_tight)
