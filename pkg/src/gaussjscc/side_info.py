"""Side information at the encoders and/or the decoder.

Model: unit-variance sources with correlation rho, cross observations
Z1 = s1 U2 + V1 and Z2 = s2 U1 + V2, decoder side information Z = (Z1, Z2).
Encoder i transmits a function of L_i = a_i U_i + b_i Z_i, normalized to
unit variance.

Everything is a linear map of independent standard normals, so each
quantity is an exact Gaussian computation. SB and LT quantize L_i with a
Gaussian test channel W_i = c_i L_i + d_i Q_i, c_i^2 + d_i^2 = 1, where
r_i = I(L_i; W_i) = -log2(d_i) is the quantizer rate.

The optimizers use a batched numpy path; reported numbers are recomputed
through :mod:`gaussjscc.gauss` so they rest on the checked algebra.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _validate as v
from ._ratesolve import solve_two_rates
from .errors import InvalidParams, UnsupportedScheme
from .gauss import JointGaussian, conditional_variance, mutual_information
from .results import SchemeResult
from .sb import channel_capacities

AVAILABILITY = ("none", "encoders_only", "decoder_only", "both")
_ALIASES = {"enc": "encoders_only", "dec": "decoder_only", "encoder": "encoders_only",
            "decoder": "decoder_only"}

# basis of independent N(0, 1) variables
_E1, _E2, _V1, _V2, _Q1, _Q2, _G1, _G2, _N1, _N2 = range(10)
_NB = 10
_VMIN = 1e-8


@dataclass(frozen=True)
class SideInfoSpec:
    s1: float = 0.0
    s2: float = 0.0
    availability: str = "none"

    def __post_init__(self):
        v.nonneg("s1", self.s1)
        v.nonneg("s2", self.s2)
        a = _ALIASES.get(self.availability, self.availability)
        if a not in AVAILABILITY:
            raise InvalidParams(f"availability must be one of {AVAILABILITY}, got {self.availability!r}")
        object.__setattr__(self, "availability", a)

    @property
    def encoders(self) -> bool:
        return self.availability in ("encoders_only", "both")

    @property
    def decoder(self) -> bool:
        return self.availability in ("decoder_only", "both")

    def with_availability(self, availability: str) -> "SideInfoSpec":
        return SideInfoSpec(self.s1, self.s2, availability)


@dataclass(frozen=True)
class LinearCombo:
    a1: float = 1.0
    b1: float = 0.0
    a2: float = 1.0
    b2: float = 0.0

    def __post_init__(self):
        for k in ("a1", "b1", "a2", "b2"):
            object.__setattr__(self, k, v.finite(k, getattr(self, k)))
        if self.a1 == 0 and self.b1 == 0 or self.a2 == 0 and self.b2 == 0:
            raise InvalidParams("each (a_i, b_i) must be nonzero")

    @classmethod
    def from_angles(cls, theta1: float, theta2: float) -> "LinearCombo":
        return cls(math.cos(theta1), math.sin(theta1), math.cos(theta2), math.sin(theta2))

    def normalized(self, spec: SideInfoSpec, rho: float) -> "LinearCombo":
        """Rescale so that var(L1) = var(L2) = 1."""
        n1, n2 = _l_norms(spec.s1, spec.s2, rho, self.a1, self.b1, self.a2, self.b2)
        return LinearCombo(self.a1 / n1, self.b1 / n1, self.a2 / n2, self.b2 / n2)


NO_COMBO = LinearCombo()


def _l_norms(s1, s2, rho, a1, b1, a2, b2):
    n1 = np.sqrt(a1 ** 2 + 2 * a1 * b1 * s1 * rho + b1 ** 2 * (s1 ** 2 + 1))
    n2 = np.sqrt(a2 ** 2 + 2 * a2 * b2 * s2 * rho + b2 ** 2 * (s2 ** 2 + 1))
    return n1, n2


def _check(spec, combo, rho):
    rho = v.rho(rho)
    if not spec.encoders and (combo.b1 != 0 or combo.b2 != 0):
        raise InvalidParams("b_i must be 0 when the encoders have no side information")
    return rho


@dataclass(frozen=True)
class _Setup:
    scheme: str
    spec: SideInfoSpec
    rho: float
    P1: float
    P2: float
    noise_var: float
    channel: str
    noise_var2: float

    @property
    def y_labels(self):
        return ("Y1",) if self.channel == "gmac" else ("Y1", "Y2")


def _setup(scheme, spec, P1, P2, noise_var, rho, channel, noise_var2):
    scheme = scheme.upper()
    if scheme not in ("AF", "SB", "LT"):
        raise UnsupportedScheme(f"unknown scheme {scheme!r}")
    if channel not in ("gmac", "orthogonal"):
        raise InvalidParams(f"unknown channel {channel!r}")
    if scheme == "LT" and channel == "orthogonal":
        raise UnsupportedScheme("LT is defined for the multiple-access channel only")
    n = v.positive("noise_var", noise_var)
    n2 = n if noise_var2 is None else v.positive("noise_var2", noise_var2)
    return _Setup(scheme, spec, v.rho(rho), v.nonneg("P1", P1), v.nonneg("P2", P2), n, channel, n2)


def _rows(st: _Setup, a1, b1, a2, b2, r1=0.0, r2=0.0):
    """Coefficient rows over the basis, batched over the leading axis."""
    a1, b1, a2, b2, r1, r2 = np.broadcast_arrays(*(np.atleast_1d(np.asarray(x, float))
                                                   for x in (a1, b1, a2, b2, r1, r2)))
    m = a1.shape[0]
    rho, s1, s2 = st.rho, st.spec.s1, st.spec.s2

    def unit(k):
        e = np.zeros((m, _NB))
        e[:, k] = 1.0
        return e

    u1 = unit(_E1)
    u2 = rho * unit(_E1) + math.sqrt(1.0 - rho ** 2) * unit(_E2)
    z1 = s1 * u2 + unit(_V1)
    z2 = s2 * u1 + unit(_V2)
    n1, n2 = _l_norms(s1, s2, rho, a1, b1, a2, b2)
    l1 = ((a1 / n1)[:, None] * u1 + (b1 / n1)[:, None] * z1)
    l2 = ((a2 / n2)[:, None] * u2 + (b2 / n2)[:, None] * z2)
    rows = {"U1": u1, "U2": u2, "Z1": z1, "Z2": z2, "L1": l1, "L2": l2}
    if st.scheme != "AF":
        d1, d2 = 2.0 ** -r1, 2.0 ** -r2
        c1, c2 = np.sqrt(-np.expm1(-2 * r1 * math.log(2))), np.sqrt(-np.expm1(-2 * r2 * math.log(2)))
        rows["W1"] = c1[:, None] * l1 + d1[:, None] * unit(_Q1)
        rows["W2"] = c2[:, None] * l2 + d2[:, None] * unit(_Q2)
    src = {"AF": ("L1", "L2"), "LT": ("W1", "W2")}.get(st.scheme)
    if src is None:
        x1, x2 = unit(_G1), unit(_G2)
    else:
        x1, x2 = rows[src[0]], rows[src[1]]
    x1, x2 = math.sqrt(st.P1) * x1, math.sqrt(st.P2) * x2
    if st.channel == "gmac":
        rows["Y1"] = x1 + x2 + math.sqrt(st.noise_var) * unit(_N1)
    else:
        rows["Y1"] = x1 + math.sqrt(st.noise_var) * unit(_N1)
        rows["Y2"] = x2 + math.sqrt(st.noise_var2) * unit(_N2)
    rows["X1"], rows["X2"] = x1, x2
    return rows


def _bcov(rows, labels):
    a = np.stack([rows[k] for k in labels], axis=1)
    return a @ np.swapaxes(a, 1, 2)


def _bcond(cov, t, o):
    """Batched conditional covariance of coordinates ``t`` given ``o``."""
    stt = cov[:, t][:, :, t]
    if not o:
        return stt
    soo = cov[:, o][:, :, o]
    sto = cov[:, t][:, :, o]
    x = np.linalg.solve(soo, np.swapaxes(sto, 1, 2))
    return stt - sto @ x


def _log2pos(x):
    return np.log2(np.maximum(x, 1e-300))


# ---------------------------------------------------------------- AF


def _af_batch(st: _Setup, a1, b1, a2, b2):
    rows = _rows(st, a1, b1, a2, b2)
    labels = ["U1", "U2", *st.y_labels] + (["Z1", "Z2"] if st.spec.decoder else [])
    cov = _bcov(rows, labels)
    c = _bcond(cov, [0, 1], list(range(2, len(labels))))
    return c[:, 0, 0], c[:, 1, 1]


def build_si_joint(spec: SideInfoSpec, combo: LinearCombo, rho: float) -> JointGaussian:
    """Joint law of (U1, U2, Z1, Z2, L1, L2) with unit-variance L_i."""
    rho = _check(spec, combo, rho)
    st = _Setup("AF", spec, rho, 0.0, 0.0, 1.0, "gmac", 1.0)
    rows = _rows(st, combo.a1, combo.b1, combo.a2, combo.b2)
    labels = ("U1", "U2", "Z1", "Z2", "L1", "L2")
    return JointGaussian.from_linear(labels, np.stack([rows[k][0] for k in labels]))


def _exact_joint(st: _Setup, combo: LinearCombo, r=(0.0, 0.0)) -> JointGaussian:
    rows = _rows(st, combo.a1, combo.b1, combo.a2, combo.b2, r[0], r[1])
    labels = [k for k in ("U1", "U2", "Z1", "Z2", "W1", "W2", "X1", "X2", *st.y_labels) if k in rows]
    return JointGaussian.from_linear(labels, np.stack([rows[k][0] for k in labels]))


def af_si_distortion(spec: SideInfoSpec, combo: LinearCombo, P1, P2, noise_var=1.0, rho=0.0,
                     channel="gmac", noise_var2=None) -> tuple[float, float]:
    """MMSE distortions of AF sending the (normalized) combinations L_i."""
    rho = _check(spec, combo, rho)
    st = _setup("AF", spec, P1, P2, noise_var, rho, channel, noise_var2)
    g = _exact_joint(st, combo)
    obs = st.y_labels + (("Z1", "Z2") if spec.decoder else ())
    return conditional_variance(g, "U1", obs), conditional_variance(g, "U2", obs)


@dataclass(frozen=True)
class AfSiSolution:
    combo: LinearCombo
    D_sum: float
    D1: float
    D2: float
    grid_best: float

    def __iter__(self):
        return iter((self.combo, self.D_sum))


def optimize_af_si(spec: SideInfoSpec, P1, P2, noise_var=1.0, rho=0.0, channel="gmac",
                   noise_var2=None, grid: int = 360) -> AfSiSolution:
    """Minimize D1 + D2 over encoder combinations.

    Only directions matter, and flipping both signs changes nothing, so the
    search runs over theta1 in [0, pi), theta2 in [0, 2 pi): a dense grid,
    then a local polish of the best grid point.
    """
    st = _setup("AF", spec, P1, P2, noise_var, rho, channel, noise_var2)
    if not spec.encoders:
        d1, d2 = af_si_distortion(spec, NO_COMBO, P1, P2, noise_var, rho, channel, noise_var2)
        return AfSiSolution(NO_COMBO, d1 + d2, d1, d2, d1 + d2)

    t1 = np.arange(grid) * (math.pi / grid)
    t2 = np.arange(grid) * (2 * math.pi / grid)
    best, arg = math.inf, (0.0, 0.0)
    for i in range(0, grid, 40):
        th1, th2 = np.meshgrid(t1[i:i + 40], t2, indexing="ij")
        th1, th2 = th1.ravel(), th2.ravel()
        d1, d2 = _af_batch(st, np.cos(th1), np.sin(th1), np.cos(th2), np.sin(th2))
        f = d1 + d2
        k = int(np.argmin(f))
        if f[k] < best:
            best, arg = float(f[k]), (float(th1[k]), float(th2[k]))

    def obj(th):
        d1, d2 = _af_batch(st, math.cos(th[0]), math.sin(th[0]), math.cos(th[1]), math.sin(th[1]))
        return float(d1[0] + d2[0])

    res = minimize(obj, np.array(arg), method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-16, "maxiter": 2000,
                            "initial_simplex": np.array(arg) + np.array([[0, 0], [1e-2, 0], [0, 1e-2]])})
    th = arg
    # keep the grid point unless the polish is a real improvement
    if res.fun < best - 1e-13 * abs(best):
        th = tuple(float(x) for x in res.x)
    combo = LinearCombo.from_angles(*th).normalized(spec, st.rho)
    combo = _snap(combo)
    d1, d2 = af_si_distortion(spec, combo, P1, P2, noise_var, rho, channel, noise_var2)
    return AfSiSolution(combo, d1 + d2, d1, d2, best)


def _snap(c: LinearCombo) -> LinearCombo:
    # exact zeros read better than 1e-17 from cos/sin round-off
    f = lambda x: 0.0 if abs(x) < 1e-14 else x  # noqa: E731
    return LinearCombo(f(c.a1), f(c.b1), f(c.a2), f(c.b2))


# ---------------------------------------------------------------- SB / LT


def _quant_batch(st: _Setup, combo: LinearCombo, r, z_in_rates: bool, beta=(1.0, 1.0)):
    """Objective and constraint slacks for rate pairs ``r`` of shape (K, 2)."""
    r = np.atleast_2d(np.asarray(r, float))
    r1, r2 = r[:, 0], r[:, 1]
    rows = _rows(st, combo.a1, combo.b1, combo.a2, combo.b2, r1, r2)
    zl = ["Z1", "Z2"] if st.spec.decoder else []
    labels = ["U1", "U2", "W1", "W2", *st.y_labels] + zl
    ix = {k: i for i, k in enumerate(labels)}
    cov = _bcov(rows, labels)
    zd = [ix[k] for k in zl]
    zr = zd if z_in_rates else []
    dd = _bcond(cov, [0, 1], [2, 3] + zd)
    obj = beta[0] * dd[:, 0, 0] + beta[1] * dd[:, 1, 1]

    cw = _bcond(cov, [2, 3], zr)
    det = cw[:, 0, 0] * cw[:, 1, 1] - cw[:, 0, 1] ** 2
    lhs1 = r1 + 0.5 * _log2pos(det / cw[:, 1, 1])
    lhs2 = r2 + 0.5 * _log2pos(det / cw[:, 0, 0])
    lhs12 = r1 + r2 + 0.5 * _log2pos(det)
    if st.scheme == "SB":
        caps = channel_capacities(st.P1, st.P2, st.noise_var, st.channel, st.noise_var2)
        rhs = np.broadcast_to(np.array(caps), (r.shape[0], 3))
    else:
        y = ix["Y1"]
        n = st.noise_var
        rhs1 = 0.5 * _log2pos(_bcond(cov, [y], [3] + zr)[:, 0, 0] / n)
        rhs2 = 0.5 * _log2pos(_bcond(cov, [y], [2] + zr)[:, 0, 0] / n)
        rhs12 = 0.5 * _log2pos(_bcond(cov, [y], zr)[:, 0, 0] / n)
        rhs = np.stack([rhs1, rhs2, rhs12], axis=1)
    lhs = np.stack([lhs1, lhs2, lhs12], axis=1)
    return obj, rhs - lhs, lhs, rhs


def _rate_caps(st: _Setup, combo: LinearCombo):
    """Upper bounds on feasible quantizer rates.

    LHS_i >= r_i + log2(var(L_i | U_j, Z)) / 2 and LHS_i <= C_i.
    """
    rows = _rows(st, combo.a1, combo.b1, combo.a2, combo.b2)
    labels = ["L1", "L2", "U1", "U2", "Z1", "Z2"]
    cov = _bcov(rows, labels)
    v1 = _bcond(cov, [0], [3, 4, 5])[0, 0, 0]
    v2 = _bcond(cov, [1], [2, 4, 5])[0, 0, 0]
    c1 = 0.5 * math.log2(1.0 + st.P1 / st.noise_var)
    c2 = 0.5 * math.log2(1.0 + st.P2 / (st.noise_var if st.channel == "gmac" else st.noise_var2))
    return [c1 - 0.5 * math.log2(min(max(v1, _VMIN), 1.0)) + 0.1,
            c2 - 0.5 * math.log2(min(max(v2, _VMIN), 1.0)) + 0.1]


@dataclass
class _Inner:
    r: np.ndarray
    f: float
    z_in_rates: bool
    starts: list = field(default_factory=list)


def _solve_inner(st: _Setup, combo: LinearCombo, beta=(1.0, 1.0), starts=(), modes=None,
                 grid: int = 25, n_starts: int = 2) -> _Inner:
    """Best quantizer rates for a fixed combination.

    With decoder side information the decoder may decode the quantizer
    indices either using Z or ignoring it (it still estimates with Z); both
    rules are achievable, so the better one is kept.
    """
    if modes is None:
        modes = (True, False) if st.spec.decoder else (False,)
    rmax = _rate_caps(st, combo)
    best = None
    for mode in modes:
        def batch(pts, mode=mode):
            o, s, _, _ = _quant_batch(st, combo, pts, mode, beta)
            return o, s

        def obj(r, mode=mode):
            return float(batch([r])[0][0])

        def cons(r, mode=mode):
            return batch([r])[1][0]

        ok = [np.clip(np.asarray(s, float), 0.0, rmax) for s in starts]
        r, f = solve_two_rates(obj, cons, rmax, grid=grid, n_starts=n_starts,
                               extra_starts=ok, batch=batch)
        if best is None or f < best.f:
            best = _Inner(r, f, mode)
    return best


def _exact_report(st: _Setup, combo: LinearCombo, r, z_in_rates: bool) -> SchemeResult:
    """Distortions and rate slacks through the checked Gaussian algebra."""
    g = _exact_joint(st, combo, r)
    zd = ("Z1", "Z2") if st.spec.decoder else ()
    zr = zd if z_in_rates else ()
    obs = ("W1", "W2") + zd
    d1 = conditional_variance(g, "U1", obs)
    d2 = conditional_variance(g, "U2", obs)

    def src(i):
        own = (f"U{i}",) + ((f"Z{i}",) if st.spec.encoders and f"Z{i}" not in zr else ())
        return own

    j = {1: 2, 2: 1}
    lhs = [mutual_information(g, src(i), (f"W{i}",), (f"W{j[i]}",) + zr) for i in (1, 2)]
    both = tuple(dict.fromkeys(src(1) + src(2)))
    lhs.append(mutual_information(g, both, ("W1", "W2"), zr))
    if st.scheme == "SB":
        rhs = list(channel_capacities(st.P1, st.P2, st.noise_var, st.channel, st.noise_var2))
    else:
        # X_i = sqrt(P_i) W_i, so conditioning on X_j is conditioning on W_j
        p = {1: st.P1, 2: st.P2}
        rhs = [mutual_information(g, (f"W{i}",), ("Y1",), (f"W{j[i]}",) + zr) if p[i] > 0 else 0.0
               for i in (1, 2)]
        ws = tuple(f"W{i}" for i in (1, 2) if p[i] > 0)
        rhs.append(mutual_information(g, ws, ("Y1",), zr) if ws else 0.0)
    slack = {"R1": rhs[0] - lhs[0], "R2": rhs[1] - lhs[1], "sum": rhs[2] - lhs[2]}
    excess = max(lhs[2] - lhs[0] - lhs[1], 0.0)
    t = min(excess, max(rhs[0] - lhs[0], 0.0))
    rates = (float(lhs[0] + t), float(lhs[1] + excess - t))
    return SchemeResult(
        st.scheme, float(d1), float(d2), (st.P1, st.P2), rates,
        {k: float(x) for k, x in slack.items()},
        {"quantizer_rates": (float(r[0]), float(r[1])), "combo": combo,
         "availability": st.spec.availability, "z_in_rates": z_in_rates, "channel": st.channel},
    )


def si_solve(scheme: str, spec: SideInfoSpec, combo: LinearCombo, P1, P2, noise_var=1.0, rho=0.0,
             channel="gmac", noise_var2=None, beta=(1.0, 1.0), starts=()) -> SchemeResult:
    """SB or LT with side information at a fixed combination."""
    rho = _check(spec, combo, rho)
    st = _setup(scheme, spec, P1, P2, noise_var, rho, channel, noise_var2)
    if st.scheme == "AF":
        raise UnsupportedScheme("use af_si_distortion for AF")
    combo = combo.normalized(spec, rho)
    inner = _solve_inner(st, combo, beta, starts)
    return _exact_report(st, combo, inner.r, inner.z_in_rates)


def sb_si_distortion(spec, combo, P1, P2, noise_var=1.0, rho=0.0, channel="gmac",
                     noise_var2=None) -> tuple[float, float]:
    res = si_solve("SB", spec, combo, P1, P2, noise_var, rho, channel, noise_var2)
    return res.D1, res.D2


def lt_si_distortion(spec, combo, P1, P2, noise_var=1.0, rho=0.0) -> tuple[float, float]:
    res = si_solve("LT", spec, combo, P1, P2, noise_var, rho)
    return res.D1, res.D2


def _outer(st: _Setup, base: _Inner, beta, max_evals: int):
    """Local search over encoder angles starting from b1 = b2 = 0."""
    warm = [base.r]

    def f(th):
        combo = LinearCombo.from_angles(*th).normalized(st.spec, st.rho)
        inner = _solve_inner(st, combo, beta, starts=warm, modes=(base.z_in_rates,), n_starts=1)
        return inner.f

    res = minimize(f, np.zeros(2), method="Nelder-Mead",
                   options={"xatol": 1e-4, "fatol": 1e-10, "maxfev": max_evals,
                            "initial_simplex": np.array([[0.0, 0.0], [0.3, 0.0], [0.0, 0.3]])})
    return tuple(float(x) for x in res.x), float(res.fun)


def optimize_si(scheme: str, spec: SideInfoSpec, P1, P2, noise_var=1.0, rho=0.0, channel="gmac",
                noise_var2=None, beta=(1.0, 1.0), max_evals: int = 60) -> SchemeResult:
    """Minimize the weighted distortion of one scheme over combinations and rates.

    Richer availability patterns are warm-started at the optimum of the
    poorer one (none -> decoder_only -> both, none -> encoders_only), so
    adding side information never reports a larger distortion.
    """
    st = _setup(scheme, spec, P1, P2, noise_var, rho, channel, noise_var2)
    if st.scheme == "AF":
        sol = optimize_af_si(spec, P1, P2, noise_var, rho, channel, noise_var2)
        d1, d2 = sol.D1, sol.D2
        return SchemeResult("AF", d1, d2, (st.P1, st.P2), extra={
            "combo": sol.combo, "availability": spec.availability, "channel": channel})

    chain = {"none": [], "decoder_only": ["none"], "encoders_only": ["none"],
             "both": ["none", "decoder_only"]}[spec.availability]
    starts = []
    for prev in chain:
        pst = _setup(scheme, spec.with_availability(prev), P1, P2, noise_var, rho, channel, noise_var2)
        starts = [_solve_inner(pst, NO_COMBO, beta, starts).r]
    base = _solve_inner(st, NO_COMBO, beta, starts)
    combo, chosen = NO_COMBO, base
    if spec.encoders and (spec.s1 > 0 or spec.s2 > 0):
        th, f = _outer(st, base, beta, max_evals)
        if f < base.f - 1e-12:
            combo = LinearCombo.from_angles(*th).normalized(spec, st.rho)
            chosen = _solve_inner(st, combo, beta, starts=[base.r])
            if chosen.f >= base.f:
                combo, chosen = NO_COMBO, base
    return _exact_report(st, combo, chosen.r, chosen.z_in_rates)


@dataclass(frozen=True)
class SiRow:
    scheme: str
    availability: str
    D1: float
    D2: float

    @property
    def D_sum(self) -> float:
        return self.D1 + self.D2

    @property
    def D_avg(self) -> float:
        return 0.5 * (self.D1 + self.D2)


def orth_si_compare(spec: SideInfoSpec, S: float, rho: float,
                    availabilities=AVAILABILITY) -> list[SiRow]:
    """AF and SB on symmetric orthogonal channels for each availability.

    Uses the gains of ``spec``; its own availability field is ignored.
    """
    S = v.nonneg("S", S)
    out = []
    for scheme in ("AF", "SB"):
        for a in availabilities:
            r = optimize_si(scheme, spec.with_availability(a), S, S, 1.0, rho, channel="orthogonal")
            out.append(SiRow(scheme, a, r.D1, r.D2))
    return out
