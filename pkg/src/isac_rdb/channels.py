"""System configuration, fading draws and Gaussian information measures."""

import math
from dataclasses import dataclass

import numpy as np

from .mathfn import binary_entropy, kl_flip


@dataclass(frozen=True)
class SystemConfig:
    """Scalar parameters of one ISAC scenario.

    Powers and noise variances are linear. The total transmit energy budget
    per coherence block is ``M * P0 * T``.
    """

    M: int = 4
    N_s: int = 4
    N_c: int = 4
    T: int = 16
    P0: float = 1.0
    sigma2_s: float = 1.0
    sigma2_c: float = 1.0
    m_s: float = 1.0
    omega_s: float = 1.0
    m_c: float = 1.0
    omega_c: float = 1.0

    def __post_init__(self):
        for name in ("M", "N_s", "N_c", "T"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("P0", "sigma2_s", "sigma2_c", "m_s", "omega_s", "m_c", "omega_c"):
            val = getattr(self, name)
            if not (val > 0) or not math.isfinite(val):
                raise ValueError(f"{name} must be positive and finite, got {val!r}")

    @property
    def budget(self) -> float:
        return self.M * self.P0 * self.T

    @property
    def beta_s(self) -> float:
        return self.omega_s / self.sigma2_s

    def replace(self, **changes) -> "SystemConfig":
        from dataclasses import replace

        return replace(self, **changes)


def hermitian_part(A):
    return 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))


def is_hermitian(A, rtol=1e-10) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    scale = np.linalg.norm(A)
    return bool(np.linalg.norm(A - A.conj().T) <= rtol * max(scale, 1e-300))


def is_psd(A, rtol=1e-10) -> bool:
    A = np.asarray(A)
    if not is_hermitian(A):
        return False
    w = np.linalg.eigvalsh(hermitian_part(A))
    return bool(w.min() >= -rtol * max(abs(w.max()), 1e-300))


def logdet_hpd(A) -> float:
    """ln det of a Hermitian positive-definite matrix via Cholesky.

    One retry with a jitter of ``1e-12 * trace / n`` is attempted before the
    matrix is declared singular.
    """
    A = hermitian_part(np.asarray(A, dtype=complex))
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        n = A.shape[0]
        jitter = 1e-12 * max(np.trace(A).real / n, 1e-300)
        try:
            L = np.linalg.cholesky(A + jitter * np.eye(n))
        except np.linalg.LinAlgError as exc:
            raise ValueError("matrix is not positive definite") from exc
    return float(2.0 * np.sum(np.log(np.diag(L).real)))


@dataclass(frozen=True)
class GaussianLaw:
    """Circularly-symmetric complex Gaussian CN(mean, cov)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=complex).reshape(-1)
        cov = np.asarray(self.cov, dtype=complex)
        if cov.shape != (mean.size, mean.size):
            raise ValueError("mean and cov dimensions disagree")
        if not is_psd(cov):
            raise ValueError("cov must be Hermitian PSD")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def sample_nakagami_matrix(rows, cols, m, omega, rng):
    """iid complex Nakagami(m, omega) entries N exp(j theta).

    N^2 ~ Gamma(shape=m, scale=omega/m) so that E|h|^2 = omega; the phase is
    uniform on [0, 2 pi) and independent of the amplitude.
    """
    if not (m > 0 and omega > 0):
        raise ValueError("m and omega must be positive")
    power = rng.gamma(m, omega / m, size=(rows, cols))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(rows, cols))
    return np.sqrt(power) * np.exp(1j * phase)


def _check_finite(x, name="x"):
    x = np.asarray(x, dtype=complex)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite entries")
    return x


def gaussian_mi_sensing(x, cfg: SystemConfig, form: str = "M") -> float:
    """Gaussian upper bound on I(H_s; Y_s | X = x) for Nakagami sensing.

    ``N_s ln det(I_M + (omega_s / sigma2_s) x x^H)``. With ``form="T"`` the
    equivalent T x T determinant ``det(I_T + beta x^H x)`` is used instead.
    """
    x = _check_finite(x)
    beta = cfg.beta_s
    if form == "M":
        G = np.eye(x.shape[0]) + beta * (x @ x.conj().T)
    elif form == "T":
        G = np.eye(x.shape[1]) + beta * (x.conj().T @ x)
    else:
        raise ValueError("form must be 'M' or 'T'")
    return cfg.N_s * logdet_hpd(G)


def ergodic_rate_csir(H_c, Q, cfg: SystemConfig) -> float:
    """Per-realization rate ln det(I + H_c Q H_c^H / (T sigma2_c)) in nats per channel use."""
    H_c = _check_finite(H_c, "H_c")
    Q = np.asarray(Q, dtype=complex)
    if not is_psd(Q):
        raise ValueError("Q must be Hermitian PSD")
    tr = np.trace(Q).real
    if tr > cfg.budget * (1.0 + 1e-9):
        raise ValueError(f"trace(Q) = {tr} exceeds the budget {cfg.budget}")
    G = np.eye(H_c.shape[0]) + (H_c @ Q @ H_c.conj().T) / (cfg.T * cfg.sigma2_c)
    return logdet_hpd(G)


def kl_gaussian(q0: GaussianLaw, q1: GaussianLaw, paper_convention: bool = True) -> float:
    """D(q0 || q1) between complex Gaussians.

    With ``paper_convention`` the bracket
    ``tr(S1^-1 S0) + dmu^H S1^-1 dmu - n + ln(det S1 / det S0)`` is halved,
    as in the occupancy-detection derivation. Without it the bracket is
    returned unscaled, which is the usual circular complex Gaussian KL.
    """
    S0, S1 = q0.cov, q1.cov
    n = q0.dim
    if q1.dim != n:
        raise ValueError("dimension mismatch")
    w1 = np.linalg.eigvalsh(hermitian_part(S1))
    if w1.min() <= 1e-12 * w1.max():
        raise ValueError("cov of q1 is singular")
    dmu = q1.mean - q0.mean
    L1 = np.linalg.cholesky(hermitian_part(S1))
    trace_term = np.trace(np.linalg.solve(S1, S0)).real
    z = np.linalg.solve(L1, dmu)
    quad = float(np.vdot(z, z).real)
    bracket = trace_term + quad - n + logdet_hpd(S1) - logdet_hpd(S0)
    kl = 0.5 * bracket if paper_convention else bracket
    return max(float(kl), 0.0)


def wjs_mi_upper_bound(p1: float, kl01: float, kl10: float) -> float:
    """Upper bound on I(A; Y) for binary A from the two conditional KLs.

    ``H_2(p1) - ln(1 + exp(-D(A||1-A) - D_avg))`` with
    ``D_avg = p0 KL(q0||q1) + p1 KL(q1||q0)``.
    """
    if kl01 < 0 or kl10 < 0:
        raise ValueError("KL divergences must be nonnegative")
    if p1 <= 0.0 or p1 >= 1.0:
        return 0.0
    p0 = 1.0 - p1
    d_avg = p0 * kl01 + p1 * kl10
    return wjs_from_d_avg(p1, d_avg)


def wjs_from_d_avg(p1: float, d_avg: float) -> float:
    if p1 <= 0.0 or p1 >= 1.0:
        return 0.0
    h = binary_entropy(p1)
    exponent = -kl_flip(p1) - d_avg
    # log1p(exp(e)) evaluated stably for large |e|
    softplus = exponent + math.log1p(math.exp(-exponent)) if exponent > 0 else math.log1p(math.exp(exponent))
    return min(max(h - softplus, 0.0), h)


def d_avg_occupancy(x, v, alpha_mag, sigma2_s, sigma2_W, N_s, p1, paper_convention=True) -> float:
    """Closed-form average KL ``p0 KL(q0||q1) + p1 KL(q1||q0)`` of the occupancy model.

    ``x`` is the M x T transmit block and ``v`` the unit-norm transmit
    steering vector of the scatterer.
    """
    x = _check_finite(x)
    v = np.asarray(v, dtype=complex).reshape(-1)
    M = x.shape[0]
    p0 = 1.0 - p1
    bw = sigma2_W / sigma2_s
    xx = x @ x.conj().T
    G = np.eye(M) + bw * xx
    Ginv = np.linalg.inv(G)
    xxv = xx @ v
    quad = float(np.vdot(v, xxv).real)
    corr = float(np.vdot(xxv, Ginv @ xxv).real)
    bracket = (
        p0 * N_s * np.trace(Ginv).real
        + p1 * N_s * bw * np.trace(xx).real
        + alpha_mag ** 2 / sigma2_s * (quad - p0 * bw * corr)
        - p0 * N_s * M
        + (p0 - p1) * N_s * logdet_hpd(G)
    )
    val = 0.5 * bracket if paper_convention else bracket
    return max(float(val), 0.0)


def occupancy_gaussians(x, H0, u, v, alpha, sigma2_s, sigma2_W):
    """The two conditional laws of vec(Y_s) given X = x under A = 0 and A = 1.

    vec stacks columns, so the covariance under A = 1 is
    ``(sigma2_W x^H x + sigma2_s I_T)^T kron I_{N_s}``.
    """
    x = np.asarray(x, dtype=complex)
    u = np.asarray(u, dtype=complex).reshape(-1, 1)
    v = np.asarray(v, dtype=complex).reshape(-1, 1)
    N_s = H0.shape[0]
    T = x.shape[1]
    mu0 = (H0 @ x).reshape(-1, order="F")
    mu1 = ((H0 + alpha * u @ v.conj().T) @ x).reshape(-1, order="F")
    S0 = sigma2_s * np.eye(N_s * T)
    C = sigma2_W * (x.conj().T @ x) + sigma2_s * np.eye(T)
    S1 = np.kron(C.T, np.eye(N_s))
    return GaussianLaw(mu0, S0), GaussianLaw(mu1, S1)
