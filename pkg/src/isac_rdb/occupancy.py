"""Occupancy detection: low-rank sensing model and detection-error converse."""

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    SystemConfig,
    d_avg_occupancy,
    ergodic_rate_csir,
    is_psd,
    occupancy_gaussians,
    wjs_from_d_avg,
)
from .mathfn import LN2, binary_entropy, binary_entropy_inverse, kl_flip


def steering_vector(M: int, phi: float) -> np.ndarray:
    """Half-wavelength ULA response exp(j pi k sin(phi)) / sqrt(M), k = 0..M-1."""
    if M < 1:
        raise ValueError("M must be >= 1")
    k = np.arange(M)
    return np.exp(1j * np.pi * k * math.sin(phi)) / math.sqrt(M)


@dataclass(frozen=True)
class OccupancyConfig:
    """Low-rank occupancy model H_s = H0 + 1{A=1} (alpha u v^H + W)."""

    system: SystemConfig
    p1: float
    alpha_mag: float
    v: np.ndarray
    u: np.ndarray
    H0: np.ndarray
    sigma2_W: float = 0.0
    paper_kl_convention: bool = True

    def __post_init__(self):
        if not 0.0 < self.p1 < 1.0:
            raise ValueError("p1 must lie in (0, 1)")
        if self.sigma2_W < 0 or self.alpha_mag < 0:
            raise ValueError("sigma2_W and alpha_mag must be nonnegative")
        v = np.asarray(self.v, dtype=complex).reshape(-1)
        u = np.asarray(self.u, dtype=complex).reshape(-1)
        if v.size != self.system.M or u.size != self.system.N_s:
            raise ValueError("steering vector sizes must match M and N_s")
        for name, vec in (("v", v), ("u", u)):
            if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
                raise ValueError(f"{name} must have unit norm")
        H0 = np.asarray(self.H0, dtype=complex)
        if H0.shape != (self.system.N_s, self.system.M):
            raise ValueError("H0 must be N_s x M")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "H0", H0)

    @classmethod
    def build(cls, system, p1, alpha_mag, phi_deg, sigma2_W=0.0, seed=0, paper_kl_convention=True):
        """Steering vector from the azimuth; u and H0 from a fixed seeded draw.

        u and H0 do not enter the bound when sigma2_W = 0; they only affect
        the detector simulation.
        """
        rng = np.random.default_rng([seed, 0x0CC])
        u = rng.normal(size=system.N_s) + 1j * rng.normal(size=system.N_s)
        u /= np.linalg.norm(u)
        H0 = (rng.normal(size=(system.N_s, system.M)) + 1j * rng.normal(size=(system.N_s, system.M))) / math.sqrt(2)
        v = steering_vector(system.M, math.radians(phi_deg))
        return cls(system, p1, alpha_mag, v, u, H0, sigma2_W, paper_kl_convention)

    @property
    def kl_scale(self) -> float:
        return 0.5 if self.paper_kl_convention else 1.0

    def d_avg(self, x) -> float:
        s = self.system
        return d_avg_occupancy(x, self.v, self.alpha_mag, s.sigma2_s, self.sigma2_W, s.N_s, self.p1,
                               paper_convention=self.paper_kl_convention)

    def d_avg_low_multipath(self, gamma: float) -> float:
        """D_avg in the sigma2_W -> 0 limit as a function of gamma = v^H Q v."""
        return self.kl_scale * self.alpha_mag ** 2 / self.system.sigma2_s * gamma

    @property
    def gamma_max(self) -> float:
        return self.system.budget


def detection_error_lower_bound(p1: float, mi: float) -> float:
    """P[A_hat != A] >= H_2^{-1}(H_2(p1) - I), zero once I reaches H_2(p1)."""
    if mi < 0:
        raise ValueError("mutual information must be nonnegative")
    h = binary_entropy(p1)
    return binary_entropy_inverse(max(0.0, h - mi))


def relaxed_detection_bound(p1: float, d_avg: float) -> float:
    """Single-formula bound H_2^{-1}(ln(1 + exp(-D(A||1-A) - D_avg)))."""
    e = -kl_flip(p1) - d_avg
    val = e + math.log1p(math.exp(-e)) if e > 0 else math.log1p(math.exp(e))
    return binary_entropy_inverse(min(max(val, 0.0), LN2))


def detection_bound_from_gamma(gamma: float, cfg: OccupancyConfig, relaxed: bool = False) -> float:
    """Detection-error lower bound at sensing gain gamma = v^H Q v (sigma2_W -> 0)."""
    d_avg = cfg.d_avg_low_multipath(gamma)
    if relaxed:
        return relaxed_detection_bound(cfg.p1, d_avg)
    return detection_error_lower_bound(cfg.p1, wjs_from_d_avg(cfg.p1, d_avg))


def occupancy_region_integrands(Q, cfg: OccupancyConfig, H_c=None, relaxed: bool = False):
    """(D_bound, rate_integrand) for covariance Q in the low-multipath regime.

    The rate integrand is ``None`` when no channel draw ``H_c`` is given.
    """
    Q = np.asarray(Q, dtype=complex)
    s = cfg.system
    if not is_psd(Q):
        raise ValueError("Q must be Hermitian PSD")
    tr = np.trace(Q).real
    if abs(tr - s.budget) > 1e-6 * s.budget:
        raise ValueError(f"trace(Q) = {tr} must equal the budget {s.budget}")
    gamma = float(np.vdot(cfg.v, Q @ cfg.v).real)
    D = detection_bound_from_gamma(gamma, cfg, relaxed=relaxed)
    rate = None if H_c is None else ergodic_rate_csir(H_c, Q, s)
    return D, rate


def block_from_cov(Q, T: int) -> np.ndarray:
    """A transmit block x (M x T) with x x^H = Q."""
    Q = np.asarray(Q, dtype=complex)
    M = Q.shape[0]
    if T < M:
        raise ValueError("need T >= M to realize an arbitrary covariance")
    w, U = np.linalg.eigh(0.5 * (Q + Q.conj().T))
    root = U @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ U.conj().T
    return np.hstack([root, np.zeros((M, T - M), dtype=complex)])


@dataclass(frozen=True)
class DetectorResult:
    error_rate: float
    stderr: float
    n: int
    bound: float


def simulate_map_detector(cfg: OccupancyConfig, x, n: int, seed: int) -> DetectorResult:
    """Monte Carlo error of the exact MAP detector on the occupancy model.

    Draws A, the diffuse multipath W and the sensing noise, forms Y_s, and
    decides with the exact Gaussian log-likelihoods of both hypotheses. The
    returned ``bound`` is the detection-error converse at this x.
    """
    s = cfg.system
    x = np.asarray(x, dtype=complex)
    rng = np.random.default_rng([seed, 0xDE7])
    alpha = cfg.alpha_mag
    q0, q1 = occupancy_gaussians(x, cfg.H0, cfg.u, cfg.v, alpha, s.sigma2_s, cfg.sigma2_W)
    N_s, T = s.N_s, x.shape[1]

    a = rng.random(n) < cfg.p1
    Z = np.sqrt(s.sigma2_s / 2) * (rng.normal(size=(n, N_s, T)) + 1j * rng.normal(size=(n, N_s, T)))
    H = np.broadcast_to(cfg.H0, (n, N_s, s.M)).copy()
    H[a] += alpha * np.outer(cfg.u, cfg.v.conj())
    if cfg.sigma2_W > 0:
        k = int(a.sum())
        W = np.sqrt(cfg.sigma2_W / 2) * (rng.normal(size=(k, N_s, s.M)) + 1j * rng.normal(size=(k, N_s, s.M)))
        H[a] += W
    Y = H @ x + Z
    y = Y.transpose(0, 2, 1).reshape(n, -1)  # column-stacked vec

    def loglik(law):
        L = np.linalg.cholesky(law.cov)
        r = np.linalg.solve(L, (y - law.mean).T)
        return -np.sum(np.abs(r) ** 2, axis=0) - 2.0 * np.sum(np.log(np.diag(L).real))

    score = (math.log(cfg.p1) + loglik(q1)) - (math.log(1.0 - cfg.p1) + loglik(q0))
    a_hat = score > 0
    err = float(np.mean(a_hat != a))
    stderr = math.sqrt(max(err * (1 - err), 1.0 / n) / n)

    wjs = wjs_from_d_avg(cfg.p1, cfg.d_avg(x))
    bound = detection_error_lower_bound(cfg.p1, wjs)
    return DetectorResult(err, stderr, n, bound)
