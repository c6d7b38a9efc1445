import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isac_rdb.channels import SystemConfig
from isac_rdb.nakagami import (
    BcrbInapplicable,
    NakagamiParams,
    bcrb_from_cov,
    bcrb_per_x,
    c_m,
    fisher_info,
    inverse_rd_nakagami,
    mmse_lower_bound_from_cov,
    mmse_lower_bound_global,
    mmse_lower_bound_per_x,
    prior_risk_slb,
)
from isac_rdb.verify import table1_config

EULER = 0.577215664901532860606512090082

# mpmath at 30 digits from (m - 1)(1 - psi(m)) + lnGamma(m) - ln m
C_M = {
    0.5: -0.216242889526066343231542369365,
    1.0: 0.0,
    2.0: EULER - math.log(2.0),
    3.7: -0.331575049260871580,
}


@pytest.mark.parametrize("m", sorted(C_M))
def test_c_m_reference(m):
    assert c_m(m) == pytest.approx(C_M[m], abs=1e-14)
    assert c_m(NakagamiParams(m, 3.0)) == c_m(m)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 200.0))
def test_c_m_nonpositive(m):
    # e^{c_m} <= 1: the Nakagami entropy never exceeds the Gaussian one at equal power
    assert c_m(m) <= 1e-13


def test_fisher_info():
    assert fisher_info(NakagamiParams(1.0, 1.0)) == 1.0
    assert fisher_info(NakagamiParams(2.0, 1.0)) == 2.0
    assert fisher_info(NakagamiParams(0.5, 1.0)) == math.inf
    assert not NakagamiParams(0.5, 1.0).bcrb_eligible
    with pytest.raises(ValueError):
        NakagamiParams(0.0, 1.0)


def test_inverse_rd_nakagami():
    p = NakagamiParams(1.0, 1.0)
    assert inverse_rd_nakagami(1, p, 0.0) == 1.0
    assert inverse_rd_nakagami(8, p, 0.0) == 8.0
    for s in (0.1, 1.0, 9.0, 1e3):
        assert inverse_rd_nakagami(1, p, math.log1p(s)) == pytest.approx(1 / (1 + s), rel=1e-14)
    with pytest.raises(ValueError):
        inverse_rd_nakagami(1, p, -0.1)


def test_scalar_integrands():
    cfg = SystemConfig(M=1, N_s=1, T=1, m_s=2.0, omega_s=0.7, sigma2_s=0.3)
    pw = 2.2
    x = np.array([[math.sqrt(pw)]])
    expected = 0.7 * math.exp(c_m(2.0)) / (1 + 0.7 * pw / 0.3)
    assert mmse_lower_bound_per_x(x, cfg) == pytest.approx(expected, rel=1e-14)
    assert bcrb_per_x(x, cfg) == pytest.approx(1 / (pw / 0.3 + 2.0 / 0.7), rel=1e-14)


def test_zero_block_gives_prior_values():
    cfg = SystemConfig(M=3, N_s=2, T=4, m_s=2.0, omega_s=1.5)
    x = np.zeros((3, 4))
    assert mmse_lower_bound_per_x(x, cfg) == pytest.approx(prior_risk_slb(cfg), rel=1e-15)
    assert prior_risk_slb(cfg) == pytest.approx(6 * 1.5 * math.exp(c_m(2.0)))
    assert bcrb_per_x(x, cfg) == pytest.approx(6 * 1.5 / 2.0, rel=1e-14)


def test_per_x_matches_cov_form():
    cfg = SystemConfig(M=3, N_s=2, T=5, m_s=1.5, omega_s=0.8, sigma2_s=0.4)
    rng = np.random.default_rng(2)
    x = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    Q = x @ x.conj().T
    assert mmse_lower_bound_per_x(x, cfg) == pytest.approx(mmse_lower_bound_from_cov(Q, cfg), rel=1e-12)
    assert bcrb_per_x(x, cfg) == pytest.approx(bcrb_from_cov(Q, cfg), rel=1e-12)


def test_bcrb_inapplicable_below_one():
    cfg = SystemConfig(m_s=0.5)
    with pytest.raises(BcrbInapplicable):
        bcrb_from_cov(np.eye(4), cfg)
    # still a ValueError for callers that do not care about the distinction
    with pytest.raises(ValueError):
        bcrb_per_x(np.ones((4, 16)), cfg)


# mpmath at 30 digits, Table-1 parameters
GLOBAL = {
    1.0: 0.00398008139369608690,
    2.0: 0.00354440659583404332,
    0.5: 0.00320611325732065143,
}


@pytest.mark.parametrize("m", sorted(GLOBAL))
def test_global_bound_table1(m):
    assert mmse_lower_bound_global(table1_config(m)) == pytest.approx(GLOBAL[m], rel=1e-12)


def test_global_bound_m1_arithmetic():
    assert mmse_lower_bound_global(table1_config(1.0)) == pytest.approx(16 / (16 * 10 ** 2.4 + 1), rel=1e-12)


def test_global_bound_low_power_limit():
    cfg = table1_config(2.0).replace(P0=1e-14)
    assert mmse_lower_bound_global(cfg) == pytest.approx(prior_risk_slb(cfg), rel=1e-9)


def test_global_bound_is_isotropic_integrand():
    cfg = table1_config(2.0)
    Q = cfg.P0 * cfg.T * np.eye(cfg.M)
    assert mmse_lower_bound_from_cov(Q, cfg) == pytest.approx(mmse_lower_bound_global(cfg), rel=1e-12)
