"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (shown with ``-s`` and in the terminal
summary) and asserts the same condition.
"""
import math
import time

import numpy as np
import pytest
from scipy.optimize import golden

from gaussjscc.af import AfParams, MultiUserParams, af_distortions, af_multiuser, af_symmetric
from gaussjscc.bounds import nc_distortion, nc_high_branch, nc_low_branch, nc_threshold
from gaussjscc.cli import cmd_table1
from gaussjscc.gauss import JointGaussian, condition, conditional_variance, mutual_information
from gaussjscc.lt import lt_covariance, lt_distortions, lt_optimize_symmetric, lt_slack
from gaussjscc.mc import simulate_af_gmac, simulate_af_orthogonal
from gaussjscc.orthogonal import (OrthParams, orth_af_distortions, orth_af_symmetric, orth_gap_bounds,
                                  orth_sb_distortion)
from gaussjscc.power import af_critical_power, af_weighted_objective
from gaussjscc.sb import sb_gmac_distortion
from gaussjscc.side_info import (NO_COMBO, SideInfoSpec, af_si_distortion, optimize_af_si, optimize_si)


def db(x):
    return 10.0 ** (x / 10.0)


# 1 -------------------------------------------------------------------------

TABLE1 = [(10, 1, 10, 1, 0.6760), (10, 5, 10, 5, 0.5743), (10, 20, 10, 17.01, 0.5422),
          (10, 50, 10, 17.01, 0.5422)]


def test_criterion_1_table(report):
    t0 = time.perf_counter()
    _, rows = cmd_table1(0.5)
    elapsed = time.perf_counter() - t0
    errs = []
    for got, want in zip(rows, TABLE1):
        errs.append(max(abs(got[2] - want[2]), abs(got[3] - want[3])) <= 0.01
                    and abs(got[4] - want[4]) <= 5e-4 and got[:2] == list(want[:2]))
    ok = len(rows) == 4 and all(errs) and elapsed < 5.0
    detail = "; ".join(f"({r[2]:.4g},{r[3]:.4g},{r[4]:.5f})" for r in rows)
    report(1, ok, f"power table rows {detail}, {elapsed:.2f} s")
    assert ok


# 2 -------------------------------------------------------------------------

def test_criterion_2_critical_power(report):
    c = af_critical_power(10, 0.5)
    worst = 0.0
    for a in np.logspace(-1, 3, 10):
        for rho in np.arange(1, 10) / 10:
            ref = af_critical_power(a, rho)
            t = golden(lambda t: af_weighted_objective(a, t * t, rho),
                       brack=(0.0, math.sqrt(ref), 3 * math.sqrt(ref)), tol=1e-12)
            worst = max(worst, abs(t * t - ref) / ref)
    ok = abs(c - 17.01) <= 0.01 and worst <= 1e-6
    report(2, ok, f"c(10, 0.5) = {c:.4f}, max rel. gap to golden section {worst:.1e}")
    assert ok


# 3 -------------------------------------------------------------------------

def test_criterion_3_monte_carlo(report):
    t0 = time.perf_counter()
    worst, n_bad = 0.0, 0
    for rho in (0.0, 0.5, 0.9):
        for snr in (-10, 0, 10, 30):
            S = db(snr)
            for exact, sim in (
                (af_distortions(AfParams(S, 2 * S, 1.0, 1.5, rho)),
                 simulate_af_gmac(AfParams(S, 2 * S, 1.0, 1.5, rho), 1_000_000, seed=2024)),
                (orth_af_distortions(OrthParams(S, 2 * S, 1.0, 1.5, rho)),
                 simulate_af_orthogonal(OrthParams(S, 2 * S, 1.0, 1.5, rho), 1_000_000, seed=2024)),
            ):
                z = (abs(sim.D1_hat - exact[0]) / sim.stderr1, abs(sim.D2_hat - exact[1]) / sim.stderr2)
                worst = max(worst, *z)
                n_bad += sum(x > 3 for x in z)
    elapsed = time.perf_counter() - t0
    ok = n_bad == 0 and elapsed < 60
    report(3, ok, f"24 AF runs at n=1e6, max |z| = {worst:.2f}, {elapsed:.1f} s")
    assert ok


# 4 -------------------------------------------------------------------------

def test_criterion_4_asymptotics(report):
    checks = []
    for rho in (0.1, 0.5, 0.9):
        for var in (1.0, 2.5):
            checks.append(abs(af_symmetric(1e-6, rho, var) - var) <= 1e-5)
            checks.append(abs(af_symmetric(1e6, rho, var) - var * (1 - rho) / 2) <= 1e-5)
            h = 1e-7
            slope = (var - af_symmetric(h, rho, var)) / h
            checks.append(abs(slope / (var * (1 + rho) ** 2) - 1) <= 1e-3)
    for rho in (0.3, 0.8):
        for N in (2, 5):
            checks.append(abs(af_multiuser(MultiUserParams(10 ** 6, 1.0, rho)) - (1 - rho)) <= 1e-4)
            checks.append(abs(af_multiuser(MultiUserParams(N, 1e6, rho)) - (N - 1) / N * (1 - rho)) <= 1e-4)
    ok = all(checks)
    report(4, ok, f"{sum(checks)}/{len(checks)} limit and slope checks")
    assert ok


# 5 -------------------------------------------------------------------------

def test_criterion_5_ordering(report):
    checks = []
    for rho in (0.1, 0.75):
        for snr in range(-20, 41, 5):
            S = db(snr)
            af, sb, lt, nc = (af_symmetric(S, rho), sb_gmac_distortion(S, rho),
                              lt_optimize_symmetric(S, rho).D, nc_distortion(S, rho))
            checks.append(nc <= min(af, sb, lt) + 1e-9)
            checks.append(lt <= sb + 1e-9)
            if snr == -20:
                checks.append(af < sb and af < lt)
            if snr == 30:
                checks.append(lt < af and sb < af)
        checks.append(lt_optimize_symmetric(1e5, rho).D / nc_distortion(1e5, rho) <= 1.02)
    ok = all(checks)
    report(5, ok, f"{sum(checks)}/{len(checks)} ordering checks over -20..40 dB")
    assert ok


# 6 -------------------------------------------------------------------------

def test_criterion_6_nc_continuity(report):
    worst = 0.0
    for rho in np.arange(1, 10) / 10:
        t = nc_threshold(rho)
        lo, hi = nc_low_branch(t, rho), nc_high_branch(t, rho)
        worst = max(worst, abs(lo - hi), abs(lo - (1 - rho)))
    ok = worst < 1e-12
    report(6, ok, f"max branch mismatch at threshold {worst:.1e}")
    assert ok


# 7 -------------------------------------------------------------------------

def test_criterion_7_orthogonal_chain(report):
    bad = 0
    count = 0
    for S in 10.0 ** np.arange(-3, 4.01, 0.5):
        for rho in np.arange(1, 10) / 10:
            b = orth_gap_bounds(S, rho)
            sb, af = orth_sb_distortion(S, rho), orth_af_symmetric(S, rho)
            gap = af - sb
            tol = 1e-12
            ok_pt = (b.D_LB <= sb + tol and sb <= af + tol and af <= b.D_UB + tol
                     and gap <= b.rho + tol and gap <= b.hi_snr + tol and gap <= b.lo_snr + tol)
            bad += not ok_pt
            count += 1
    eq = 0.0
    for S in 10.0 ** np.arange(-3, 4.01, 0.5):
        eq = max(eq, abs(orth_af_symmetric(S, 0.0) - 1 / (1 + S)), abs(orth_sb_distortion(S, 0.0) - 1 / (1 + S)))
    ok = bad == 0 and eq <= 1e-12
    report(7, ok, f"{count - bad}/{count} grid points satisfy the chain, rho=0 mismatch {eq:.1e}")
    assert ok


# 8 -------------------------------------------------------------------------

def test_criterion_8_multiuser(report):
    low = [af_multiuser(MultiUserParams(N, db(-10), 0.8)) for N in range(2, 11)]
    high = [af_multiuser(MultiUserParams(N, db(10), 0.8)) for N in range(2, 11)]
    down = all(b <= a for a, b in zip(low, low[1:]))
    up = all(b >= a for a, b in zip(high, high[1:]))
    worst = max(abs(af_multiuser(MultiUserParams(2, P, rho)) - af_symmetric(P, rho))
                for rho in np.linspace(0, 0.95, 8) for P in np.logspace(-3, 4, 15))
    ok = down and up and worst <= 1e-12
    report(8, ok, f"nonincreasing at -10 dB: {down}, nondecreasing at +10 dB: {up}, "
                  f"N=2 mismatch {worst:.1e}")
    assert ok


# 9 -------------------------------------------------------------------------

def test_criterion_9_lt_consistency(report):
    worst = 0.0
    for R1 in np.linspace(0.1, 3.0, 5):
        for R2 in np.linspace(0.1, 3.0, 5):
            for rho in (0.1, 0.5, 0.9):
                g = lt_covariance(R1, R2, rho)
                d = lt_distortions(R1, R2, rho)
                worst = max(worst, abs(d[0] - conditional_variance(g, "U1", ["W1", "W2"])),
                            abs(d[1] - conditional_variance(g, "U2", ["W1", "W2"])))
    resid, slack = 0.0, math.inf
    for S in np.logspace(-3, 5, 17):
        for rho in (0.1, 0.5, 0.9):
            sol = lt_optimize_symmetric(S, rho)
            resid = max(resid, sol.residual)
            slack = min(slack, *lt_slack(sol.R, sol.R, S, S, rho))
    ok = worst <= 1e-10 and resid <= 1e-10 and slack >= -1e-9
    report(9, ok, f"max |D - Var| {worst:.1e}, max residual {resid:.1e}, min slack {slack:.1e}")
    assert ok


# 10 ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def si_checks():
    out = {}
    # availability ordering on the symmetric grid s1 = s2 = 1, rho = 0.1
    order = []
    for scheme in ("AF", "SB", "LT"):
        for snr in (-10, 0, 10):
            S = db(snr)
            d = {a: optimize_si(scheme, SideInfoSpec(1.0, 1.0, a), S, S, 1.0, 0.1).D_sum
                 for a in ("none", "decoder_only", "both")}
            order.append(d["decoder_only"] <= d["none"] + 1e-9 and d["both"] <= d["decoder_only"] + 1e-9)
    out["ordering"] = (all(order), f"{sum(order)}/{len(order)} availability orderings")

    # decoder-only SB vs LT over the side gain at rho = 0.5, 0 dB
    gains = (0.0, 0.5, 1.0, 2.0, 4.0)
    sb = [optimize_si("SB", SideInfoSpec(s, s, "dec"), 1.0, 1.0, 1.0, 0.5).D_sum for s in gains]
    lt = [optimize_si("LT", SideInfoSpec(s, s, "dec"), 1.0, 1.0, 1.0, 0.5).D_sum for s in gains]
    cross = sb[0] > lt[0] and any(a <= b for a, b in zip(sb, lt))
    first = next((s for s, a, b in zip(gains, sb, lt) if a <= b), None)
    out["crossover"] = (cross, f"SB <= LT from s = {first}")

    # zero gains reduce to plain AF
    worst = 0.0
    for avail in ("none", "decoder_only", "both", "encoders_only"):
        for P1, P2, rho in ((1.0, 1.0, 0.5), (10.0, 2.0, 0.9), (0.1, 3.0, 0.0)):
            got = af_si_distortion(SideInfoSpec(0, 0, avail), NO_COMBO, P1, P2, 1.0, rho)
            ref = af_distortions(AfParams(P1, P2, rho=rho))
            worst = max(worst, abs(got[0] - ref[0]), abs(got[1] - ref[1]))
    out["reduction"] = (worst <= 1e-12, f"zero-gain mismatch {worst:.1e}")

    # orthogonal AF with encoder-only side information: is b1 = b2 = 0 optimal?
    bmax = 0.0
    for rho in (0.4, 0.8):
        for s in (0.5, 1.0):
            sol = optimize_af_si(SideInfoSpec(s, s, "enc"), 1.0, 1.0, 1.0, rho, channel="orthogonal")
            bmax = max(bmax, abs(sol.combo.b1), abs(sol.combo.b2))
    out["b_zero"] = (bmax <= 1e-6, f"max |b_i| = {bmax:.1e}")
    return out


def test_criterion_10_attainable_parts(si_checks):
    for key in ("ordering", "crossover", "reduction"):
        assert si_checks[key][0], si_checks[key][1]


@pytest.mark.xfail(strict=True, reason="under the stated side-channel model a small nonzero b_i "
                                       "beats b_i = 0 for orthogonal AF with encoder side information")
def test_criterion_10(report, si_checks):
    ok = all(v[0] for v in si_checks.values())
    parts = ", ".join(f"{k} {'ok' if v[0] else 'FAILED'} ({v[1]})" for k, v in si_checks.items())
    report(10, ok, parts)
    assert ok


# 11 ------------------------------------------------------------------------

def test_criterion_11_gauss_oracle(report):
    n = 1_000_000
    worst = 0.0
    for k in range(3):
        rng = np.random.default_rng(100 + k)
        a = rng.normal(size=(4, 6))
        g = JointGaussian(("t1", "t2", "o1", "o2"), a @ a.T)
        law = condition(g, ["o1", "o2"])
        x = g.sample(n, np.random.default_rng(200 + k))
        obs = x[:, 2:]
        gram_inv = np.linalg.inv(obs.T @ obs)
        for i, t in enumerate(("t1", "t2")):
            beta = gram_inv @ obs.T @ x[:, i]
            res = x[:, i] - obs @ beta
            se = np.sqrt(np.diag(gram_inv) * (res @ res) / (n - 2))
            z = np.abs(beta - law.gain[i]) / se
            worst = max(worst, float(z.max()))
    S, noise = 7.3, 0.6
    g = JointGaussian(("X", "Y"), [[S, S], [S, S + noise]])
    mi_err = abs(mutual_information(g, ["X"], ["Y"]) - 0.5 * math.log2(1 + S / noise))
    ok = worst <= 3 and mi_err <= 1e-12
    report(11, ok, f"max regression |z| = {worst:.2f}, scalar AWGN MI error {mi_err:.1e}")
    assert ok
