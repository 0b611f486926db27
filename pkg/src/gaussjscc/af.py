"""Amplify-and-forward over the Gaussian MAC.

Each encoder scales its source sample to full power and the receiver forms
the linear MMSE estimate from the superposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import _validate as v
from .errors import InvalidParams


@dataclass(frozen=True)
class AfParams:
    P1: float
    P2: float
    var1: float = 1.0
    var2: float = 1.0
    rho: float = 0.0
    noise_var: float = 1.0

    def __post_init__(self):
        v.nonneg("P1", self.P1)
        v.nonneg("P2", self.P2)
        v.positive("var1", self.var1)
        v.positive("var2", self.var2)
        v.rho(self.rho)
        v.positive("noise_var", self.noise_var)


@dataclass(frozen=True)
class MultiUserParams:
    N: int
    P: float
    rho: float
    noise_var: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise InvalidParams(f"N must be a positive integer, got {self.N}")
        v.nonneg("P", self.P)
        v.rho(self.rho)
        v.positive("noise_var", self.noise_var)


def af_distortions(p: AfParams) -> tuple[float, float]:
    """MMSE distortions (D1, D2) of uncoded transmission over the GMAC."""
    r2 = 1.0 - p.rho ** 2
    den = p.P1 + p.P2 + 2.0 * p.rho * math.sqrt(p.P1 * p.P2) + p.noise_var
    d1 = p.var1 * (p.P2 * r2 + p.noise_var) / den
    d2 = p.var2 * (p.P1 * r2 + p.noise_var) / den
    return d1, d2


def af_symmetric(S: float, rho: float, var: float = 1.0) -> float:
    """Per-user distortion for equal powers and variances at SNR ``S``."""
    S = v.nonneg("S", S)
    rho = v.rho(rho)
    var = v.positive("var", var)
    return var * (S * (1.0 - rho ** 2) + 1.0) / (2.0 * S * (1.0 + rho) + 1.0)


def af_symmetric_limit(rho: float, var: float = 1.0) -> float:
    """High-SNR floor of :func:`af_symmetric`."""
    return v.positive("var", var) * (1.0 - v.rho(rho)) / 2.0


def af_multiuser(p: MultiUserParams) -> float:
    """Per-user distortion of N-user symmetric AF with unit-variance sources."""
    g = 1.0 + (p.N - 1) * p.rho
    return 1.0 - p.P * g ** 2 / (p.N * p.P * g + p.noise_var)


def af_multiuser_limits(N: int, rho: float) -> tuple[float, float]:
    """(N -> inf limit, P -> inf limit) of the per-user distortion."""
    return 1.0 - rho, (N - 1) / N * (1.0 - rho)
