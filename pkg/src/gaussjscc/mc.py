"""Monte Carlo simulation of the uncoded (AF) pipelines.

Samples are drawn in fixed-size blocks, each with its own generator spawned
from ``SeedSequence(seed)``, so a run is reproducible bit for bit and the
blocks could be computed in any order. The decoder is the exact linear MMSE
estimator taken from :func:`gaussjscc.gauss.condition`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .af import AfParams
from .errors import InvalidParams
from .gauss import JointGaussian, condition
from .orthogonal import OrthParams
from .side_info import LinearCombo, SideInfoSpec, _check, _exact_joint, _setup

RNG_NAME = "PCG64/SeedSequence"
BLOCK = 1 << 17
MIN_N = 1000


@dataclass(frozen=True)
class SimResult:
    D1_hat: float
    D2_hat: float
    stderr1: float
    stderr2: float
    n: int
    seed: int
    rng: str = RNG_NAME

    @property
    def D_sum(self) -> float:
        return self.D1_hat + self.D2_hat


def _check_n(n, seed):
    if int(n) != n or n < MIN_N:
        raise InvalidParams(f"n must be an integer >= {MIN_N}, got {n}")
    if int(seed) != seed or seed < 0:
        raise InvalidParams(f"seed must be a nonnegative integer, got {seed}")
    return int(n), int(seed)


def _run(block_fn, n, seed) -> SimResult:
    """Accumulate squared-error moments over independently seeded blocks.

    ``block_fn(rng, m)`` returns the two error vectors for ``m`` samples.
    """
    n, seed = _check_n(n, seed)
    sizes = [BLOCK] * (n // BLOCK) + ([n % BLOCK] if n % BLOCK else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    s1 = np.empty((len(sizes), 2))
    s2 = np.empty((len(sizes), 2))
    for k, (m, ss) in enumerate(zip(sizes, children)):
        e1, e2 = block_fn(np.random.Generator(np.random.PCG64(ss)), m)
        q1, q2 = e1 * e1, e2 * e2
        s1[k] = q1.sum(), (q1 * q1).sum()
        s2[k] = q2.sum(), (q2 * q2).sum()

    def stats(s):
        tot, tot2 = np.sum(s, axis=0)
        mean = tot / n
        var = max((tot2 - n * mean * mean) / (n - 1), 0.0)
        return float(mean), float(math.sqrt(var / n))

    d1, se1 = stats(s1)
    d2, se2 = stats(s2)
    return SimResult(d1, d2, se1, se2, n, seed)


def _sources(rng, m, var1, var2, rho):
    c = rho * math.sqrt(var1 * var2)
    src = JointGaussian(("U1", "U2"), [[var1, c], [c, var2]])
    u = src.sample(m, rng)
    return u[:, 0], u[:, 1]


def _gmac_joint(p: AfParams) -> JointGaussian:
    g1, g2 = math.sqrt(p.P1 / p.var1), math.sqrt(p.P2 / p.var2)
    c = p.rho * math.sqrt(p.var1 * p.var2)
    cu = np.array([[p.var1, c], [c, p.var2]])
    h = np.array([g1, g2])
    cov = np.zeros((3, 3))
    cov[:2, :2] = cu
    cov[:2, 2] = cov[2, :2] = cu @ h
    cov[2, 2] = h @ cu @ h + p.noise_var
    return JointGaussian(("U1", "U2", "Y"), cov)


def simulate_af_gmac(p: AfParams, n: int = 1_000_000, seed: int = 0) -> SimResult:
    """Empirical MSE of uncoded transmission over the Gaussian MAC."""
    gain = condition(_gmac_joint(p), ["Y"]).gain
    g1, g2 = math.sqrt(p.P1 / p.var1), math.sqrt(p.P2 / p.var2)
    sn = math.sqrt(p.noise_var)

    def block(rng, m):
        u1, u2 = _sources(rng, m, p.var1, p.var2, p.rho)
        y = g1 * u1 + g2 * u2 + sn * rng.standard_normal(m)
        return u1 - gain[0, 0] * y, u2 - gain[1, 0] * y

    return _run(block, n, seed)


def _orth_joint(p: OrthParams) -> JointGaussian:
    g = np.diag([math.sqrt(p.P1 / p.var1), math.sqrt(p.P2 / p.var2)])
    c = p.rho * math.sqrt(p.var1 * p.var2)
    cu = np.array([[p.var1, c], [c, p.var2]])
    cov = np.block([[cu, cu @ g], [g @ cu, g @ cu @ g + np.diag([p.noise_var1, p.noise_var2])]])
    return JointGaussian(("U1", "U2", "Y1", "Y2"), cov)


def simulate_af_orthogonal(p: OrthParams, n: int = 1_000_000, seed: int = 0) -> SimResult:
    """Empirical MSE of uncoded transmission over two orthogonal channels."""
    gain = condition(_orth_joint(p), ["Y1", "Y2"]).gain
    g1, g2 = math.sqrt(p.P1 / p.var1), math.sqrt(p.P2 / p.var2)
    n1, n2 = math.sqrt(p.noise_var1), math.sqrt(p.noise_var2)

    def block(rng, m):
        u1, u2 = _sources(rng, m, p.var1, p.var2, p.rho)
        y = np.stack([g1 * u1 + n1 * rng.standard_normal(m),
                      g2 * u2 + n2 * rng.standard_normal(m)])
        est = gain @ y
        return u1 - est[0], u2 - est[1]

    return _run(block, n, seed)


def _si_block(spec: SideInfoSpec, combo: LinearCombo, rho: float, rng, m):
    """Draw (U1, U2, Z1, Z2, L1, L2) from the side-information model."""
    u1, u2 = _sources(rng, m, 1.0, 1.0, rho)
    z1 = spec.s1 * u2 + rng.standard_normal(m)
    z2 = spec.s2 * u1 + rng.standard_normal(m)
    c = combo.normalized(spec, rho)
    return u1, u2, z1, z2, c.a1 * u1 + c.b1 * z1, c.a2 * u2 + c.b2 * z2


def simulate_af_si(spec: SideInfoSpec, combo: LinearCombo, P1, P2, noise_var=1.0, rho=0.0,
                   n: int = 1_000_000, seed: int = 0, channel="gmac", noise_var2=None) -> SimResult:
    """Empirical MSE of AF sending L_i, decoding with or without Z."""
    rho = _check(spec, combo, rho)
    st = _setup("AF", spec, P1, P2, noise_var, rho, channel, noise_var2)
    obs = list(st.y_labels) + (["Z1", "Z2"] if spec.decoder else [])
    law = condition(_exact_joint(st, combo), obs)
    gain = law.gain
    i1, i2 = law.unobserved.index("U1"), law.unobserved.index("U2")
    sp1, sp2 = math.sqrt(st.P1), math.sqrt(st.P2)

    def block(rng, m):
        u1, u2, z1, z2, l1, l2 = _si_block(spec, combo, rho, rng, m)
        if channel == "gmac":
            ys = [sp1 * l1 + sp2 * l2 + math.sqrt(st.noise_var) * rng.standard_normal(m)]
        else:
            ys = [sp1 * l1 + math.sqrt(st.noise_var) * rng.standard_normal(m),
                  sp2 * l2 + math.sqrt(st.noise_var2) * rng.standard_normal(m)]
        o = np.stack(ys + ([z1, z2] if spec.decoder else []))
        est = gain @ o
        return u1 - est[i1], u2 - est[i2]

    return _run(block, n, seed)


def sample_si_covariance(spec: SideInfoSpec, combo: LinearCombo, rho: float,
                         n: int = 1_000_000, seed: int = 0):
    """Sample covariance of (U1, U2, Z1, Z2, L1, L2) and its standard errors."""
    rho = _check(spec, combo, rho)
    n, seed = _check_n(n, seed)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    x = np.stack(_si_block(spec, combo, rho, rng, n))
    prods = x[:, None, :] * x[None, :, :]
    cov = prods.mean(axis=2)
    se = prods.std(axis=2, ddof=1) / math.sqrt(n)
    return cov, se
