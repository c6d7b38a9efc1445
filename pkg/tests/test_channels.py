import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isac_rdb.channels import (
    GaussianLaw,
    SystemConfig,
    d_avg_occupancy,
    ergodic_rate_csir,
    gaussian_mi_sensing,
    is_hermitian,
    is_psd,
    kl_gaussian,
    logdet_hpd,
    occupancy_gaussians,
    sample_nakagami_matrix,
    wjs_from_d_avg,
    wjs_mi_upper_bound,
)
from isac_rdb.mathfn import LN2
from isac_rdb.occupancy import steering_vector


def crandn(rng, *shape):
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / math.sqrt(2)


def test_config_validation():
    cfg = SystemConfig()
    assert cfg.budget == 4 * 1.0 * 16
    assert cfg.replace(P0=2.0).budget == 128
    with pytest.raises(ValueError):
        SystemConfig(M=0)
    with pytest.raises(ValueError):
        SystemConfig(sigma2_s=0.0)
    with pytest.raises(ValueError):
        SystemConfig(m_s=math.nan)


def test_hermitian_psd_predicates():
    rng = np.random.default_rng(1)
    A = crandn(rng, 4, 4)
    assert not is_hermitian(A)
    G = A @ A.conj().T
    assert is_hermitian(G) and is_psd(G)
    assert not is_psd(-G)
    assert not is_hermitian(np.ones((2, 3)))
    assert logdet_hpd(G) == pytest.approx(np.linalg.slogdet(G)[1], abs=1e-12)
    with pytest.raises(ValueError):
        logdet_hpd(-G)


def test_gaussian_law_validation():
    with pytest.raises(ValueError):
        GaussianLaw(np.zeros(2), np.eye(3))
    with pytest.raises(ValueError):
        GaussianLaw(np.zeros(2), np.diag([1.0, -1.0]))


@pytest.mark.parametrize("m", [1.0, 2.0, 0.5])
def test_nakagami_moments(m):
    rng = np.random.default_rng(7)
    h = sample_nakagami_matrix(400, 250, m, 1.0, rng).ravel()
    p = np.abs(h) ** 2
    n = p.size
    assert abs(p.mean() - 1.0) <= 3 * p.std() / math.sqrt(n)
    p2 = p ** 2
    assert abs(p2.mean() - (1 + 1 / m)) <= 3 * p2.std() / math.sqrt(n)
    assert abs(h.mean()) <= 3 * math.sqrt(2.0 / n)


def test_nakagami_rejects_bad_params():
    with pytest.raises(ValueError):
        sample_nakagami_matrix(2, 2, 0.0, 1.0, np.random.default_rng(0))


def test_gaussian_mi_sensing_forms_agree():
    cfg = SystemConfig(M=3, N_s=2, T=5, omega_s=0.7, sigma2_s=0.2)
    x = crandn(np.random.default_rng(3), 3, 5)
    a = gaussian_mi_sensing(x, cfg, "M")
    assert a == pytest.approx(gaussian_mi_sensing(x, cfg, "T"), rel=1e-12)
    assert gaussian_mi_sensing(np.zeros((3, 5)), cfg) == 0.0
    with pytest.raises(ValueError):
        gaussian_mi_sensing(x, cfg, "X")
    with pytest.raises(ValueError):
        gaussian_mi_sensing(np.full((3, 5), np.nan), cfg)


def test_ergodic_rate_csir():
    cfg = SystemConfig(M=1, N_c=1, T=4, P0=2.5, sigma2_c=0.5)
    assert ergodic_rate_csir(np.ones((1, 1)), np.eye(1) * cfg.P0 * cfg.T, cfg) == pytest.approx(math.log(1 + 5.0))
    cfg = SystemConfig(M=3, N_c=2, T=4, P0=2.0)
    H = crandn(np.random.default_rng(5), 2, 3)
    assert ergodic_rate_csir(H, np.zeros((3, 3)), cfg) == 0.0
    iso = ergodic_rate_csir(H, cfg.P0 * cfg.T * np.eye(3), cfg)
    ref = np.linalg.slogdet(np.eye(2) + cfg.P0 / cfg.sigma2_c * H @ H.conj().T)[1]
    assert iso == pytest.approx(ref, rel=1e-12)
    with pytest.raises(ValueError):
        ergodic_rate_csir(H, 2 * cfg.budget * np.eye(3) / 3, cfg)
    with pytest.raises(ValueError):
        ergodic_rate_csir(H, -np.eye(3), cfg)


def test_kl_gaussian_scalar_cases():
    q = GaussianLaw(np.zeros(1), np.eye(1))
    assert kl_gaussian(q, q) == 0.0
    mu = 0.8 + 0.3j
    q1 = GaussianLaw(np.array([mu]), np.eye(1))
    assert kl_gaussian(q, q1) == pytest.approx(abs(mu) ** 2 / 2, abs=1e-15)
    assert kl_gaussian(q, q1, paper_convention=False) == pytest.approx(abs(mu) ** 2, abs=1e-15)
    q2 = GaussianLaw(np.zeros(1), 2 * np.eye(1))
    assert kl_gaussian(q, q2) == pytest.approx(0.5 * (0.5 - 1 + LN2), abs=1e-15)


def test_wjs_values():
    assert wjs_mi_upper_bound(0.5, 0.0, 0.0) == 0.0
    assert wjs_from_d_avg(0.5, 2.0) == pytest.approx(0.566219169516972813, abs=1e-15)
    assert wjs_from_d_avg(0.5, 800.0) == pytest.approx(LN2, abs=1e-15)
    assert wjs_from_d_avg(0.2, 1.0) == pytest.approx(0.351871366510172369, abs=1e-15)
    assert wjs_mi_upper_bound(0.0, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        wjs_mi_upper_bound(0.5, -1.0, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.0, 50.0), st.floats(0.0, 50.0))
def test_wjs_bounded_by_prior_entropy(p1, a, b):
    from isac_rdb.mathfn import binary_entropy

    assert 0.0 <= wjs_mi_upper_bound(p1, a, b) <= binary_entropy(p1) + 1e-15


@pytest.mark.parametrize("sigma2_W", [0.0, 0.3])
@pytest.mark.parametrize("convention", [True, False])
def test_d_avg_closed_form_matches_gaussian_kls(sigma2_W, convention):
    rng = np.random.default_rng(11)
    M, N_s, T, p1 = 3, 2, 4, 0.35
    x = crandn(rng, M, T)
    v = steering_vector(M, math.radians(-37.0))
    u = crandn(rng, N_s)
    u /= np.linalg.norm(u)
    H0 = crandn(rng, N_s, M)
    alpha, sigma2_s = 0.6 * np.exp(0.4j), 0.8
    q0, q1 = occupancy_gaussians(x, H0, u, v, alpha, sigma2_s, sigma2_W)
    ref = (1 - p1) * kl_gaussian(q0, q1, convention) + p1 * kl_gaussian(q1, q0, convention)
    got = d_avg_occupancy(x, v, abs(alpha), sigma2_s, sigma2_W, N_s, p1, paper_convention=convention)
    assert got == pytest.approx(ref, rel=1e-10)


def test_d_avg_zero_block():
    v = steering_vector(4, 0.3)
    assert d_avg_occupancy(np.zeros((4, 6)), v, 0.2, 0.1, 0.0, 4, 0.5) == 0.0
