import math

from .errors import InvalidParams


def finite(name, x):
    x = float(x)
    if not math.isfinite(x):
        raise InvalidParams(f"{name} must be finite, got {x}")
    return x


def nonneg(name, x):
    x = finite(name, x)
    if x < 0:
        raise InvalidParams(f"{name} must be >= 0, got {x}")
    return x


def positive(name, x):
    x = finite(name, x)
    if x <= 0:
        raise InvalidParams(f"{name} must be > 0, got {x}")
    return x


def rho(x, name="rho"):
    x = finite(name, x)
    if not 0.0 <= x < 1.0:
        raise InvalidParams(f"{name} must lie in [0, 1), got {x}")
    return x
