import json
import math

import numpy as np
import pytest

from isac_rdb.nakagami import c_m
from isac_rdb.occupancy import OccupancyConfig
from isac_rdb.verify import (
    SUITE,
    CheckReport,
    check_bcrb_vs_rdb_ordering,
    check_conditional_stam_scalar,
    check_detector_vs_bound,
    check_high_noise_tightness,
    check_rdb_gaussian_equality,
    conditional_entropy_power_and_fisher,
    run_suite,
    table2_occupancy,
)


def test_report_serializes_infinities():
    r = CheckReport("x", True, math.inf, 1.0, 0.0, "")
    d = json.loads(json.dumps(r.to_dict()))
    assert d["measured"] == "inf" and d["passed"] is True


def test_gaussian_equality_check():
    r = check_rdb_gaussian_equality()
    assert r.passed and r.measured <= 1e-12
    # p = 0 and omega p / sigma2 = 9 land on 1 and 0.1 exactly
    assert check_rdb_gaussian_equality([0.0, 9.0]).passed


def test_high_noise_bernoulli():
    r = check_high_noise_tightness("bernoulli")
    assert r.passed and r.reference == 0.5
    assert r.measured == pytest.approx(0.5, abs=1e-5)


@pytest.mark.parametrize("m", [1.0, 2.0])
def test_high_noise_nakagami(m):
    r = check_high_noise_tightness("nakagami", m=m)
    assert r.passed
    assert r.reference == pytest.approx(16 * math.exp(c_m(m)))


def test_high_noise_m2_gap_reported():
    r = check_high_noise_tightness("nakagami", m=2.0)
    assert "10.95%" in r.detail


def test_high_noise_rejects_bad_input():
    with pytest.raises(ValueError):
        check_high_noise_tightness("poisson")
    with pytest.raises(ValueError):
        check_high_noise_tightness("bernoulli", noise_grid=[10.0, 1.0])


def test_stam_gaussian_unit_noise():
    N, J = conditional_entropy_power_and_fisher("gaussian", 1.0)
    assert N == pytest.approx(0.5, rel=1e-8)
    assert 1 / J == pytest.approx(0.5, rel=1e-8)


def test_stam_check_short_grid():
    r = check_conditional_stam_scalar("both", sigma_grid=[0.3, 1.0, 5.0])
    assert r.passed
    g = check_conditional_stam_scalar("gaussian", sigma_grid=[1.0])
    assert g.passed and g.measured <= 1e-6
    with pytest.raises(ValueError):
        conditional_entropy_power_and_fisher("laplace", 1.0)


def test_detector_check_extremes():
    cfg = table2_occupancy()
    quiet = OccupancyConfig(cfg.system, 0.5, 0.0, cfg.v, cfg.u, cfg.H0)
    r = check_detector_vs_bound(quiet, n=4000, seed=1)
    assert r.passed and r.reference == pytest.approx(0.5, abs=1e-8)
    loud = OccupancyConfig(cfg.system, 0.5, 5.0, cfg.v, cfg.u, cfg.H0)
    r = check_detector_vs_bound(loud, n=2000, seed=1)
    assert r.passed and r.measured == 0.0 and r.reference < 1e-12


def test_detector_check_default():
    assert check_detector_vs_bound(n=5000).passed


def test_bcrb_ordering_small():
    r = check_bcrb_vs_rdb_ordering(n_draws=400, seed=1)
    assert r.passed
    assert r.measured > r.reference


def test_run_suite_selection():
    (r,) = run_suite(only="gaussian")
    assert r.name == "gaussian-equality"
    names = [r.name for r in run_suite(only="high-noise-nakagami")]
    assert names == ["high-noise-nakagami-m1", "high-noise-nakagami-m2"]
    with pytest.raises(ValueError):
        run_suite(only="nope")
    assert len(SUITE) == 7 and len(set(SUITE)) == 7
