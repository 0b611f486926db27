"""Symmetric N-user SB and LT, by the same recipe as the two-user case.

Each source is quantized by a Gaussian test channel at a common rate r;
the only constraint imposed is the total one, quantizer information
I(U; W) against the sum capacity (independent inputs for SB, coherent
inputs with correlation rho_tilde for LT). Sub-sum constraints are ignored,
so for N > 2 this is an approximation; at N = 2 it is exact.
"""
from __future__ import annotations

import math

from scipy.optimize import brentq

from . import _validate as v
from .af import MultiUserParams, af_multiuser
from .errors import InvalidParams


def _shape(N, r, rho):
    k = -math.expm1(-2 * r * math.log(2))  # 1 - 2^{-2r}
    return k, rho * k


def symmetric_bt_distortion(N: int, r: float, rho: float) -> float:
    """Per-user MMSE of U_1 from all N quantizer outputs at rate r each."""
    k, _ = _shape(N, r, rho)
    d = 1.0 - k
    lam1, lam0 = 1.0 + (N - 1) * rho, 1.0 - rho

    def f(lam):
        return k * lam * lam / (k * lam + d) if k > 0 else 0.0

    return 1.0 - f(lam1) / N - f(lam0) * (N - 1) / N


def symmetric_bt_info(N: int, r: float, rho: float) -> float:
    """I(U_1..U_N; W_1..W_N) in bits."""
    _, rt = _shape(N, r, rho)
    return N * r + 0.5 * ((N - 1) * math.log2(1.0 - rt) + math.log2(1.0 + (N - 1) * rt))


def _rate(N, P, rho, noise_var, coherent):
    def cap(r):
        rt = _shape(N, r, rho)[1] if coherent else 0.0
        return 0.5 * math.log2(1.0 + N * P * (1.0 + (N - 1) * rt) / noise_var)

    g = lambda r: cap(r) - symmetric_bt_info(N, r, rho)  # noqa: E731
    hi = cap(60.0) / N + 1.0
    while g(hi) > 0:
        hi *= 2
    return brentq(g, 0.0, hi, xtol=1e-14, rtol=1e-14) if g(0.0) > 0 else 0.0


def sb_multiuser(p: MultiUserParams) -> float:
    r = _rate(p.N, p.P, p.rho, p.noise_var, coherent=False)
    return symmetric_bt_distortion(p.N, r, p.rho)


def lt_multiuser(p: MultiUserParams) -> float:
    r = _rate(p.N, p.P, p.rho, p.noise_var, coherent=True)
    return symmetric_bt_distortion(p.N, r, p.rho)


def multiuser_distortion(scheme: str, N: int, P: float, rho: float, noise_var: float = 1.0) -> float:
    p = MultiUserParams(N, v.nonneg("P", P), rho, noise_var)
    fn = {"AF": af_multiuser, "SB": sb_multiuser, "LT": lt_multiuser}.get(scheme.upper())
    if fn is None:
        raise InvalidParams(f"no multi-user formula for scheme {scheme!r}")
    return fn(p)
