import math

import numpy as np
import pytest

from gaussjscc.af import AfParams, af_distortions
from gaussjscc.errors import InvalidParams, UnsupportedScheme
from gaussjscc.lt import lt_optimize
from gaussjscc.mc import sample_si_covariance
from gaussjscc.sb import sb_optimize
from gaussjscc.side_info import (LinearCombo, SideInfoSpec, af_si_distortion, build_si_joint,
                                 lt_si_distortion, optimize_af_si, optimize_si, orth_si_compare,
                                 sb_si_distortion, si_solve)


def direct_af_si(s1, s2, a1, b1, a2, b2, P1, P2, rho, decoder):
    """Covariance of (U1, U2, [Z1, Z2], Y) written out by hand."""
    # basis: E1, E2 (sources), V1, V2 (side noise), N
    u1 = np.array([1.0, 0, 0, 0, 0])
    u2 = np.array([rho, math.sqrt(1 - rho ** 2), 0, 0, 0])
    z1 = s1 * u2 + np.array([0, 0, 1.0, 0, 0])
    z2 = s2 * u1 + np.array([0, 0, 0, 1.0, 0])
    l1 = a1 * u1 + b1 * z1
    l2 = a2 * u2 + b2 * z2
    l1, l2 = l1 / np.linalg.norm(l1), l2 / np.linalg.norm(l2)
    y = math.sqrt(P1) * l1 + math.sqrt(P2) * l2 + np.array([0, 0, 0, 0, 1.0])
    obs = np.stack([y, z1, z2] if decoder else [y])
    so = obs @ obs.T
    out = []
    for u in (u1, u2):
        c = obs @ u
        out.append(u @ u - c @ np.linalg.solve(so, c))
    return tuple(out)


def test_spec_validation():
    assert SideInfoSpec(1, 1, "dec").availability == "decoder_only"
    with pytest.raises(InvalidParams):
        SideInfoSpec(1, 1, "sometimes")
    with pytest.raises(InvalidParams):
        SideInfoSpec(-1, 1)
    with pytest.raises(InvalidParams):
        LinearCombo(0.0, 0.0, 1.0, 0.0)
    # combinations with b != 0 need side information at the encoders
    with pytest.raises(InvalidParams):
        af_si_distortion(SideInfoSpec(1, 1, "decoder_only"), LinearCombo(1, 1, 1, 0), 1, 1)


def test_joint_structure():
    g = build_si_joint(SideInfoSpec(0.7, 1.3), LinearCombo(), 0.4)
    assert g.block(["Z1"], ["U1"])[0, 0] == pytest.approx(0.7 * 0.4, abs=1e-15)
    assert g.var("L1") == pytest.approx(1.0, abs=1e-12)
    g0 = build_si_joint(SideInfoSpec(0, 0), LinearCombo(), 0.4)
    assert np.allclose(g0.block(["Z1", "Z2"], ["U1", "U2"]), 0)
    assert np.allclose(g0.block(["L1", "L2"], ["U1", "U2"]), g0.block(["U1", "U2"], ["U1", "U2"]))


def test_joint_matches_samples():
    spec = SideInfoSpec(0.8, 1.5, "both")
    combo = LinearCombo(1.0, 0.5, -0.3, 1.0)
    g = build_si_joint(spec, combo, 0.6)
    cov, se = sample_si_covariance(spec, combo, 0.6, 400_000, seed=5)
    assert np.all(np.abs(cov - g.cov) <= 4 * se + 1e-12)


def test_normalization():
    spec = SideInfoSpec(0.8, 1.5)
    c = LinearCombo(2.0, -1.0, 0.3, 0.7).normalized(spec, 0.5)
    g = build_si_joint(SideInfoSpec(0.8, 1.5, "both"), c, 0.5)
    assert g.var("L1") == pytest.approx(1.0, abs=1e-12)
    assert g.var("L2") == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("avail,combo", [
    ("decoder_only", LinearCombo()),
    ("both", LinearCombo()),
    ("both", LinearCombo(0.6, 0.8, 1.0, -0.2)),
    ("encoders_only", LinearCombo(0.6, 0.8, 1.0, -0.2)),
])
def test_af_matches_direct_computation(avail, combo):
    spec = SideInfoSpec(1.2, 0.4, avail)
    got = af_si_distortion(spec, combo, 2.0, 0.5, rho=0.35)
    ref = direct_af_si(1.2, 0.4, combo.a1, combo.b1, combo.a2, combo.b2, 2.0, 0.5, 0.35, spec.decoder)
    assert got == pytest.approx(ref, abs=1e-12)


def test_af_scale_invariance():
    spec = SideInfoSpec(1.0, 1.0, "both")
    a = af_si_distortion(spec, LinearCombo(1.0, 0.3, 0.5, 0.2), 1.0, 1.0, rho=0.5)
    b = af_si_distortion(spec, LinearCombo(4.0, 1.2, 0.05, 0.02), 1.0, 1.0, rho=0.5)
    assert a == pytest.approx(b, abs=1e-13)


def test_af_none_reduces_to_plain():
    d = af_si_distortion(SideInfoSpec(3.0, 2.0), LinearCombo(), 4.0, 1.0, 1.0, 0.7)
    assert d == pytest.approx(af_distortions(AfParams(4.0, 1.0, rho=0.7)), abs=1e-12)


def test_decoder_side_info_helps():
    S = 1.0
    none = sum(af_si_distortion(SideInfoSpec(1, 1), LinearCombo(), S, S, rho=0.1))
    dec = sum(af_si_distortion(SideInfoSpec(1, 1, "dec"), LinearCombo(), S, S, rho=0.1))
    assert dec < none


def test_af_optimizer_beats_grid():
    spec = SideInfoSpec(1.0, 1.0, "both")
    sol = optimize_af_si(spec, 1.0, 1.0, 1.0, 0.3, grid=120)
    assert sol.D_sum <= sol.grid_best + 1e-12
    assert sol.D_sum == pytest.approx(sol.grid_best, abs=1e-3)
    none = optimize_af_si(SideInfoSpec(1.0, 1.0), 1.0, 1.0, 1.0, 0.3)
    assert none.combo == LinearCombo()


@pytest.mark.parametrize("scheme,ref", [("SB", sb_optimize), ("LT", lt_optimize)])
def test_no_side_info_reduces(scheme, ref):
    spec = SideInfoSpec(2.0, 2.0)
    r = si_solve(scheme, spec, LinearCombo(), 1.5, 0.7, rho=0.6)
    base = ref(1.5, 0.7, 0.6)
    assert r.D_sum == pytest.approx(base.D_sum, abs=1e-9)
    assert r.feasible


def test_sb_lt_wrappers():
    spec = SideInfoSpec(1.0, 1.0, "dec")
    d_sb = sb_si_distortion(spec, LinearCombo(), 1.0, 1.0, rho=0.5)
    d_lt = lt_si_distortion(spec, LinearCombo(), 1.0, 1.0, rho=0.5)
    assert all(0 < d < 1 for d in d_sb + d_lt)
    with pytest.raises(UnsupportedScheme):
        si_solve("AF", spec, LinearCombo(), 1.0, 1.0)


def test_decoder_monotone_in_gain():
    for scheme in ("SB", "LT"):
        vals = [optimize_si(scheme, SideInfoSpec(s, s, "dec"), 1.0, 1.0, rho=0.5).D_sum
                for s in (0.0, 0.5, 1.0, 2.0)]
        assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))


def test_report_is_feasible():
    r = optimize_si("SB", SideInfoSpec(1.0, 1.0, "dec"), 2.0, 2.0, rho=0.5)
    assert r.feasible
    assert r.extra["availability"] == "decoder_only"


def test_orthogonal_compare():
    rows = orth_si_compare(SideInfoSpec(1.0, 1.0), 1.0, 0.5, ("none", "decoder_only"))
    d = {(r.scheme, r.availability): r.D_sum for r in rows}
    assert d["SB", "none"] <= d["AF", "none"] + 1e-9
    assert d["SB", "decoder_only"] <= d["SB", "none"] + 1e-9
    assert d["AF", "decoder_only"] <= d["AF", "none"] + 1e-9


def test_lt_needs_gmac():
    with pytest.raises(UnsupportedScheme):
        optimize_si("LT", SideInfoSpec(1, 1), 1.0, 1.0, channel="orthogonal")
