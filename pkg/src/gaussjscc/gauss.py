"""Exact algebra for zero-mean jointly Gaussian vectors.

Every decoder in this package is a conditional expectation of a Gaussian
vector, so everything downstream reduces to the Schur complement and to
log-determinants computed here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParams, SingularObservation, UnknownLabel

MAX_DIM = 16
EPS_PSD = 1e-10
EPS_SING = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class JointGaussian:
    """Zero-mean Gaussian vector with named coordinates."""

    labels: tuple[str, ...]
    cov: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        cov = np.asarray(self.cov, dtype=float)
        n = len(labels)
        if n == 0 or n > MAX_DIM:
            raise InvalidParams(f"dimension must be in 1..{MAX_DIM}, got {n}")
        if len(set(labels)) != n:
            raise InvalidParams(f"duplicate labels in {labels}")
        if cov.shape != (n, n):
            raise InvalidParams(f"covariance shape {cov.shape} does not match {n} labels")
        if not np.all(np.isfinite(cov)):
            raise InvalidParams("covariance has non-finite entries")
        cov = 0.5 * (cov + cov.T)
        scale = max(np.trace(cov), np.finfo(float).tiny)
        if np.linalg.eigvalsh(cov)[0] < -EPS_PSD * scale:
            raise InvalidParams("covariance is not positive semidefinite")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "cov", _freeze(cov))

    @classmethod
    def from_linear(cls, labels: Sequence[str], rows) -> "JointGaussian":
        """Build the law of ``rows @ E`` where ``E`` is a vector of iid N(0, 1)."""
        a = np.atleast_2d(np.asarray(rows, dtype=float))
        return cls(tuple(labels), a @ a.T)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, names: Iterable[str]) -> list[int]:
        pos = {k: i for i, k in enumerate(self.labels)}
        out = []
        for name in names:
            if name not in pos:
                raise UnknownLabel(name)
            out.append(pos[name])
        return out

    def var(self, name: str) -> float:
        i = self.index([name])[0]
        return float(self.cov[i, i])

    def block(self, rows: Sequence[str], cols: Sequence[str]) -> np.ndarray:
        return self.cov[np.ix_(self.index(rows), self.index(cols))]

    def marginal(self, names: Sequence[str]) -> "JointGaussian":
        return JointGaussian(tuple(names), self.block(names, names))

    def cholesky(self) -> np.ndarray:
        """Lower factor with jitter fallback; used for sampling."""
        return _chol(self.cov)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``n`` samples, shape ``(n, dim)``."""
        z = rng.standard_normal((n, self.dim))
        return z @ self.cholesky().T


def _chol(m: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        jitter = EPS_SING * max(np.trace(m), 1.0)
        return np.linalg.cholesky(m + jitter * np.eye(m.shape[0]))


def _check_nonsingular(m: np.ndarray, what: str) -> None:
    d = np.sqrt(np.clip(np.diag(m), 0.0, None))
    if np.any(d <= 0.0):
        raise SingularObservation(f"{what} has a zero-variance coordinate")
    corr = m / np.outer(d, d)
    if np.linalg.eigvalsh(corr)[0] <= EPS_SING:
        raise SingularObservation(f"{what} is numerically singular")


@dataclass(frozen=True)
class ConditionalLaw:
    """Law of the unobserved coordinates given the observed ones.

    ``gain`` maps observed values to the conditional mean:
    ``E[u | o] = gain @ o``.
    """

    unobserved: tuple[str, ...]
    observed: tuple[str, ...]
    gain: np.ndarray
    cov: np.ndarray

    def var(self, name: str) -> float:
        i = self.unobserved.index(name)
        return float(self.cov[i, i])

    def coef(self, target: str, source: str) -> float:
        return float(self.gain[self.unobserved.index(target), self.observed.index(source)])

    def as_joint(self) -> JointGaussian:
        return JointGaussian(self.unobserved, self.cov)


def condition(g: JointGaussian, observed: Iterable[str]) -> ConditionalLaw:
    observed = tuple(dict.fromkeys(observed))
    obs_idx = g.index(observed)
    unobs = tuple(k for k in g.labels if k not in observed)
    un_idx = g.index(unobs)
    if not observed:
        return ConditionalLaw(unobs, (), _freeze(np.zeros((len(unobs), 0))), g.cov)

    s_oo = g.cov[np.ix_(obs_idx, obs_idx)]
    s_uo = g.cov[np.ix_(un_idx, obs_idx)]
    s_uu = g.cov[np.ix_(un_idx, un_idx)]
    _check_nonsingular(s_oo, "observed covariance")
    lo = _chol(s_oo)
    # gain = S_uo S_oo^{-1}, via two triangular solves
    tmp = np.linalg.solve(lo, s_uo.T)
    gain = np.linalg.solve(lo.T, tmp).T
    cov = s_uu - tmp.T @ tmp
    cov = 0.5 * (cov + cov.T)
    return ConditionalLaw(unobs, observed, _freeze(gain), _freeze(cov))


def conditional_variance(g: JointGaussian, target: str, observed: Iterable[str]) -> float:
    observed = tuple(observed)
    if target in observed:
        return 0.0
    law = condition(g.marginal(tuple(dict.fromkeys((target,) + observed))), observed)
    return law.var(target)


def _logdet2(m: np.ndarray, what: str) -> float:
    _check_nonsingular(m, what)
    sign, ld = np.linalg.slogdet(m)
    if sign <= 0:
        raise SingularObservation(f"{what} is not positive definite")
    return ld / np.log(2.0)


def mutual_information(g: JointGaussian, a: Iterable[str], b: Iterable[str],
                       given: Iterable[str] = ()) -> float:
    """I(A; B | given) in bits."""
    a, b, given = tuple(a), tuple(b), tuple(given)
    if not a or not b:
        raise InvalidParams("mutual information needs nonempty label sets")
    if set(a) & set(b) or (set(a) | set(b)) & set(given):
        raise InvalidParams("label sets must be disjoint")
    g.index(a + b + given)
    if given:
        g = condition(g.marginal(a + b + given), given).as_joint()
    ca = g.block(a, a)
    cb = g.block(b, b)
    cab = g.block(a + b, a + b)
    val = 0.5 * (_logdet2(ca, "Cov(A)") + _logdet2(cb, "Cov(B)") - _logdet2(cab, "Cov(A,B)"))
    return max(val, 0.0)
