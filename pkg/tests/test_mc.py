import numpy as np
import pytest

from gaussjscc.af import AfParams, af_distortions
from gaussjscc.errors import InvalidParams
from gaussjscc.mc import BLOCK, RNG_NAME, simulate_af_gmac, simulate_af_orthogonal, simulate_af_si
from gaussjscc.orthogonal import OrthParams, orth_af_distortions
from gaussjscc.side_info import LinearCombo, SideInfoSpec, af_si_distortion


def test_reproducible():
    p = AfParams(2.0, 3.0, rho=0.4)
    a = simulate_af_gmac(p, 50_000, seed=7)
    b = simulate_af_gmac(p, 50_000, seed=7)
    assert a == b
    assert a.rng == RNG_NAME
    assert simulate_af_gmac(p, 50_000, seed=8).D1_hat != a.D1_hat


def test_partial_last_block():
    p = AfParams(1.0, 1.0, rho=0.5)
    r = simulate_af_gmac(p, BLOCK + 5000, seed=1)
    assert r.n == BLOCK + 5000
    assert abs(r.D1_hat - af_distortions(p)[0]) <= 4 * r.stderr1


def test_stderr_scales():
    p = AfParams(1.0, 4.0, rho=0.3)
    a = simulate_af_gmac(p, 20_000, seed=3)
    b = simulate_af_gmac(p, 80_000, seed=3)
    assert b.stderr1 / a.stderr1 == pytest.approx(0.5, rel=0.1)


def test_coverage_over_seeds():
    p = AfParams(3.0, 1.0, 1.0, 2.0, 0.6, 0.5)
    d1, _ = af_distortions(p)
    inside = 0
    for seed in range(20):
        r = simulate_af_gmac(p, 20_000, seed)
        inside += abs(r.D1_hat - d1) <= 2 * r.stderr1
    assert inside >= 15


def test_orthogonal_agrees():
    p = OrthParams(1.0, 5.0, 1.0, 1.5, 0.7, 1.0, 2.0)
    r = simulate_af_orthogonal(p, 200_000, seed=2)
    d1, d2 = orth_af_distortions(p)
    assert abs(r.D1_hat - d1) <= 4 * r.stderr1
    assert abs(r.D2_hat - d2) <= 4 * r.stderr2


@pytest.mark.parametrize("avail,combo", [("decoder_only", LinearCombo()),
                                         ("both", LinearCombo(1.0, 0.4, 0.8, -0.3))])
def test_side_info_pipeline(avail, combo):
    spec = SideInfoSpec(1.0, 0.5, avail)
    r = simulate_af_si(spec, combo, 1.0, 2.0, rho=0.3, n=200_000, seed=4)
    d1, d2 = af_si_distortion(spec, combo, 1.0, 2.0, rho=0.3)
    assert abs(r.D1_hat - d1) <= 4 * r.stderr1
    assert abs(r.D2_hat - d2) <= 4 * r.stderr2


def test_bad_arguments():
    p = AfParams(1.0, 1.0)
    with pytest.raises(InvalidParams):
        simulate_af_gmac(p, 10)
    with pytest.raises(InvalidParams):
        simulate_af_gmac(p, 5000, seed=-1)
