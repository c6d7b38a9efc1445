"""Closed-form bounds for Nakagami-faded target response estimation."""

import math
from dataclasses import dataclass

import numpy as np

from .channels import SystemConfig, gaussian_mi_sensing, logdet_hpd
from .mathfn import digamma, log_gamma


class BcrbInapplicable(ValueError):
    """The Bayesian CRB does not exist: the prior Fisher information is infinite (m < 1)."""


@dataclass(frozen=True)
class NakagamiParams:
    m: float
    omega: float

    def __post_init__(self):
        if not (self.m > 0 and self.omega > 0):
            raise ValueError("Nakagami parameters must be positive")

    @property
    def bcrb_eligible(self) -> bool:
        return self.m >= 1.0


def fisher_info(params: NakagamiParams) -> float:
    """Fisher information of a complex Nakagami entry; ``math.inf`` for m < 1."""
    if params.m < 1.0:
        return math.inf
    return params.m / params.omega


def c_m(params_or_m) -> float:
    """c_m = (m - 1)(1 - psi(m)) + ln(Gamma(m) / m)."""
    m = params_or_m.m if isinstance(params_or_m, NakagamiParams) else float(params_or_m)
    return (m - 1.0) * (1.0 - digamma(m)) + log_gamma(m) - math.log(m)


def inverse_rd_nakagami(n: int, params: NakagamiParams, t: float) -> float:
    """n omega exp(c_m - t / n): Shannon-lower-bound inverse RD of n iid entries."""
    if t < 0:
        raise ValueError(f"rate must be nonnegative, got {t!r}")
    return n * params.omega * math.exp(c_m(params) - t / n)


def _sensing_params(cfg):
    return NakagamiParams(cfg.m_s, cfg.omega_s)


def prior_risk_slb(cfg: SystemConfig) -> float:
    """Zero-rate value M N_s omega_s e^{c_m} of the sensing bound."""
    return cfg.M * cfg.N_s * cfg.omega_s * math.exp(c_m(cfg.m_s))


def mmse_lower_bound_per_x(x, cfg: SystemConfig) -> float:
    """RDB integrand M N_s omega_s e^{c_m} det(I + beta x x^H)^{-1/M} for one transmit block."""
    mi = gaussian_mi_sensing(x, cfg)
    return inverse_rd_nakagami(cfg.M * cfg.N_s, _sensing_params(cfg), mi)


def mmse_lower_bound_from_cov(Q, cfg: SystemConfig) -> float:
    """Same integrand with x x^H replaced by a covariance Q."""
    Q = np.asarray(Q, dtype=complex)
    mi = cfg.N_s * logdet_hpd(np.eye(Q.shape[0]) + cfg.beta_s * Q)
    return inverse_rd_nakagami(cfg.M * cfg.N_s, _sensing_params(cfg), mi)


def mmse_lower_bound_global(cfg: SystemConfig) -> float:
    """Power-budget bound M N_s omega_s e^{c_m} / (1 + beta_s T P0)."""
    return prior_risk_slb(cfg) / (cfg.beta_s * cfg.T * cfg.P0 + 1.0)


def bcrb_from_cov(Q, cfg: SystemConfig) -> float:
    """N_s tr((Q / sigma2_s + (m_s / omega_s) I_M)^{-1}).

    The Fisher matrix is I_{N_s} kron Q / sigma2_s + (m_s / omega_s) I, so
    its inverse trace is N_s copies of one M x M inverse trace.
    """
    if cfg.m_s < 1.0:
        raise BcrbInapplicable(
            f"m_s = {cfg.m_s} < 1: the prior Fisher information is infinite"
        )
    Q = np.asarray(Q, dtype=complex)
    J = Q / cfg.sigma2_s + (cfg.m_s / cfg.omega_s) * np.eye(Q.shape[0])
    w = np.linalg.eigvalsh(0.5 * (J + J.conj().T))
    return float(cfg.N_s * np.sum(1.0 / w))


def bcrb_per_x(x, cfg: SystemConfig) -> float:
    """Per-block BCRB integrand for transmit block ``x``."""
    x = np.asarray(x, dtype=complex)
    return bcrb_from_cov(x @ x.conj().T, cfg)
