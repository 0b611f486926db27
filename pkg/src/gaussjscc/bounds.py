"""Converse (necessary-condition) lower bound for the symmetric GMAC."""
from __future__ import annotations

import math

from . import _validate as v


def nc_threshold(rho: float) -> float:
    """SNR where the bound switches from the uncoded branch to the coded one."""
    rho = v.rho(rho)
    return rho / (1.0 - rho ** 2)


def nc_low_branch(S: float, rho: float, var: float = 1.0) -> float:
    return var * (S * (1.0 - rho ** 2) + 1.0) / (2.0 * S * (1.0 + rho) + 1.0)


def nc_high_branch(S: float, rho: float, var: float = 1.0) -> float:
    return var * math.sqrt((1.0 - rho ** 2) / (2.0 * S * (1.0 + rho) + 1.0))


def nc_distortion(S: float, rho: float, var: float = 1.0) -> float:
    """No symmetric scheme can achieve a per-user distortion below this."""
    S = v.nonneg("S", S)
    rho = v.rho(rho)
    var = v.positive("var", var)
    if S <= nc_threshold(rho):
        return nc_low_branch(S, rho, var)
    return nc_high_branch(S, rho, var)
