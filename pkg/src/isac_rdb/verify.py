"""Independent property checks for the closed forms in this package.

Each check returns a :class:`CheckReport`. :func:`run_suite` runs the
default set in a fixed order and is what ``isac-rdb verify`` reports.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

from .channels import SystemConfig, d_avg_occupancy, wjs_from_d_avg
from .nakagami import (
    BcrbInapplicable,
    NakagamiParams,
    bcrb_from_cov,
    c_m,
    inverse_rd_nakagami,
    mmse_lower_bound_from_cov,
    mmse_lower_bound_global,
    mmse_lower_bound_per_x,
)
from .occupancy import OccupancyConfig, block_from_cov, detection_error_lower_bound, simulate_map_detector


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    measured: float
    reference: float
    tolerance: float
    detail: str = ""

    def to_dict(self):
        d = asdict(self)
        for k in ("measured", "reference", "tolerance"):
            v = d[k]
            d[k] = v if v is None or math.isfinite(v) else repr(v)
        return d


SNR_DB_24 = 10 ** 2.4


def table1_config(m: float = 1.0) -> SystemConfig:
    """M = N_s = N_c = 4, T = 16, P0 = 1, both SNRs 24 dB, omega_s = 1, omega_c = 1/M."""
    s2 = 1.0 / SNR_DB_24
    return SystemConfig(M=4, N_s=4, N_c=4, T=16, P0=1.0, sigma2_s=s2, sigma2_c=s2,
                        m_s=m, omega_s=1.0, m_c=m, omega_c=0.25)


def table2_occupancy(seed: int = 0) -> OccupancyConfig:
    """Sensing SNR 10 dB, communication SNR 24 dB, p1 = 1/2, |alpha| = 0.2, phi = -37 deg."""
    s2c = 1.0 / SNR_DB_24
    system = SystemConfig(M=4, N_s=4, N_c=4, T=16, P0=1.0, sigma2_s=0.1, sigma2_c=s2c,
                          m_s=1.0, omega_s=1.0, m_c=1.0, omega_c=s2c)
    return OccupancyConfig.build(system, p1=0.5, alpha_mag=0.2, phi_deg=-37.0, sigma2_W=0.0, seed=seed)


# ---------------------------------------------------------------------------

def check_rdb_gaussian_equality(snr_grid=None, omega: float = 1.0, sigma2: float = 1.0) -> CheckReport:
    """Scalar Rayleigh sensing: the RDB integrand equals the Gaussian MMSE.

    ``snr_grid`` holds omega p / sigma2 values; the default is 0 plus 49
    log-spaced points from -30 dB to 50 dB.
    """
    if snr_grid is None:
        snr_grid = np.concatenate([[0.0], np.logspace(-3, 5, 49)])
    cfg = SystemConfig(M=1, N_s=1, N_c=1, T=1, P0=1.0, sigma2_s=sigma2, sigma2_c=1.0,
                       m_s=1.0, omega_s=omega, m_c=1.0, omega_c=1.0)
    worst = 0.0
    for snr in snr_grid:
        p = snr * sigma2 / omega
        exact = omega * sigma2 / (sigma2 + omega * p)
        via_rate = inverse_rd_nakagami(1, NakagamiParams(1.0, omega), math.log1p(omega * p / sigma2))
        via_block = mmse_lower_bound_per_x(np.array([[math.sqrt(p)]]), cfg)
        worst = max(worst, abs(via_rate - exact) / exact, abs(via_block - exact) / exact)
    tol = 1e-12
    return CheckReport("gaussian-equality", bool(worst <= tol), float(worst), 0.0, tol,
                       f"max relative error over {len(snr_grid)} SNR points")


def _monotone(values, tol):
    return all(b >= a - tol * max(abs(a), 1.0) for a, b in zip(values, values[1:]))


def check_high_noise_tightness(case: str = "bernoulli", noise_grid=None, m: float = 1.0) -> CheckReport:
    """Zero-rate limit of the bound as the sensing noise standard deviation grows.

    ``noise_grid`` lists sigma_s values (default 1 to 1e6, 25 points).
    Bernoulli: occupancy detection bound at an isotropic block must rise to
    min(p0, p1). Nakagami: the power-budget bound must rise to the zero-rate
    value M N_s omega e^{c_m}; its gap to the prior risk M N_s omega is
    reported and is zero only at m = 1.
    """
    if noise_grid is None:
        noise_grid = np.logspace(0, 6, 25)
    noise_grid = np.asarray(noise_grid, dtype=float)
    if np.any(np.diff(noise_grid) <= 0):
        raise ValueError("noise grid must be increasing")
    if case == "bernoulli":
        occ = table2_occupancy()
        s = occ.system
        x = block_from_cov(np.eye(s.M) * s.P0 * s.T, s.T)
        vals = []
        for sd in noise_grid:
            d = d_avg_occupancy(x, occ.v, occ.alpha_mag, sd ** 2, occ.sigma2_W, s.N_s, occ.p1)
            vals.append(detection_error_lower_bound(occ.p1, wjs_from_d_avg(occ.p1, d)))
        ref = min(occ.p1, 1.0 - occ.p1)
        tol = 1e-5
        err = abs(vals[-1] - ref)
        mono = _monotone(vals, 1e-12)
        return CheckReport("high-noise-bernoulli", bool(mono and err <= tol), float(vals[-1]), ref, tol,
                           f"monotone={mono}; bound at sigma_s={noise_grid[0]:g} is {vals[0]:.6g}")
    if case == "nakagami":
        base = table1_config(m)
        vals = [mmse_lower_bound_global(base.replace(sigma2_s=sd ** 2)) for sd in noise_grid]
        zero_rate = base.M * base.N_s * base.omega_s * math.exp(c_m(m))
        prior = base.M * base.N_s * base.omega_s
        tol = 1e-5
        err = abs(vals[-1] - zero_rate) / zero_rate
        mono = _monotone(vals, 1e-12)
        gap = 1.0 - zero_rate / prior
        return CheckReport(f"high-noise-nakagami-m{m:g}", bool(mono and err <= tol), float(vals[-1]), zero_rate, tol,
                           f"monotone={mono}; relative error {err:.3g}; "
                           f"zero-rate slack versus prior risk {prior:g} is {100 * gap:.2f}%")
    raise ValueError("case must be 'bernoulli' or 'nakagami'")


# ---------------------------------------------------------------------------
# conditional Stam inequality by direct quadrature

def _mixture(prior):
    if prior == "gaussian":
        return np.array([1.0]), np.array([0.0]), np.array([1.0])
    if prior == "gaussian-mixture":
        return np.array([0.5, 0.5]), np.array([-2.0, 2.0]), np.array([1.0, 1.0])
    raise ValueError("prior must be 'gaussian' or 'gaussian-mixture'")


def conditional_entropy_power_and_fisher(prior: str, sigma: float, epsabs: float = 1e-9):
    """N(V|W) and J(V|W) for W = V + sigma Z by two-stage quadrature (outer w, inner v)."""
    wts, mus, sds = _mixture(prior)
    comps = [(math.log(w) - math.log(sd * math.sqrt(2 * math.pi)), mu, sd) for w, mu, sd in zip(wts, mus, sds)]

    def logprior_and_score(v):
        logs = [c - 0.5 * ((v - mu) / sd) ** 2 for c, mu, sd in comps]
        top = max(logs)
        ws = [math.exp(lg - top) for lg in logs]
        tot = sum(ws)
        sc = sum(w * -(v - mu) / sd ** 2 for w, (_, mu, sd) in zip(ws, comps)) / tot
        return top + math.log(tot), sc

    lnorm = math.log(sigma * math.sqrt(2 * math.pi))
    lo_v = float(np.min(mus - 12 * sds))
    hi_v = float(np.max(mus + 12 * sds))

    def inner(w):
        def f(v):
            lp, sc = logprior_and_score(v)
            lj = lp - 0.5 * ((w - v) / sigma) ** 2 - lnorm
            pj = math.exp(lj)
            sc += (w - v) / sigma ** 2
            return np.array([pj, pj * lj, pj * sc * sc])

        a = min(lo_v, w - 12 * sigma)
        b = max(hi_v, w + 12 * sigma)
        pts = sorted({float(m) for m in mus} | {float(w)})
        pts = [p for p in pts if a < p < b]
        val, _ = integrate.quad_vec(f, a, b, epsabs=epsabs * 1e-2, epsrel=1e-12, points=pts)
        return val

    spread = math.sqrt(float(np.max(sds)) ** 2 + sigma ** 2)
    lo_w = float(np.min(mus)) - 12 * spread
    hi_w = float(np.max(mus)) + 12 * spread

    def outer(w):
        pw, plj, fish = inner(w)
        hterm = plj - (pw * math.log(pw) if pw > 0 else 0.0)
        return np.array([hterm, fish])

    val, _ = integrate.quad_vec(outer, lo_w, hi_w, epsabs=epsabs, epsrel=1e-12,
                                points=[float(m) for m in mus])
    h_cond = -val[0]
    J = val[1]
    N = math.exp(2 * h_cond) / (2 * math.pi * math.e)
    return N, J


def check_conditional_stam_scalar(prior: str = "both", sigma_grid=None) -> CheckReport:
    """N(V|W) >= 1 / J(V|W) on a sigma grid; equality for a Gaussian prior.

    ``prior`` is ``"gaussian"``, ``"gaussian-mixture"`` or ``"both"`` (one
    combined report). The mixture is 0.5 N(-2, 1) + 0.5 N(2, 1).
    """
    if sigma_grid is None:
        sigma_grid = np.logspace(-1, 1, 10)
    priors = ["gaussian", "gaussian-mixture"] if prior == "both" else [prior]
    eq_err = 0.0
    min_slack = math.inf
    ok = True
    for pr in priors:
        for sg in sigma_grid:
            N, J = conditional_entropy_power_and_fisher(pr, float(sg))
            inv_j = 1.0 / J
            if pr == "gaussian":
                post = sg * sg / (1.0 + sg * sg)
                e = max(abs(N - inv_j), abs(N - post), abs(inv_j - post)) / post
                eq_err = max(eq_err, e)
                ok &= e <= 1e-6
            else:
                slack = (N - inv_j) / inv_j
                min_slack = min(min_slack, slack)
                ok &= slack >= -1e-9
    detail = []
    if "gaussian" in priors:
        detail.append(f"gaussian relative equality error {eq_err:.3g} (tol 1e-6)")
    if "gaussian-mixture" in priors:
        detail.append(f"mixture minimum relative slack {min_slack:.4g}")
    measured = eq_err if prior == "gaussian" else min_slack
    return CheckReport("stam", bool(ok), float(measured), 0.0, 1e-6, "; ".join(detail))


# ---------------------------------------------------------------------------

def check_detector_vs_bound(cfg: OccupancyConfig = None, x=None, n: int = 20000, seed: int = 0) -> CheckReport:
    """Empirical MAP detector error must not fall below the converse by more than 3 stderr."""
    cfg = cfg or table2_occupancy(seed)
    s = cfg.system
    if x is None:
        x = block_from_cov(np.eye(s.M) * s.P0 * s.T, s.T)
    res = simulate_map_detector(cfg, x, n, seed)
    tol = 3 * res.stderr
    return CheckReport("detector", bool(res.error_rate >= res.bound - tol), res.error_rate, res.bound, tol,
                       f"n={n}; stderr={res.stderr:.3g}")


def check_bcrb_vs_rdb_ordering(n_draws: int = 2000, seed: int = 0, workers: int = 1, m_values=(0.5, 1.0, 2.0)):
    """Fading-severity ordering of the two converses at the unconstrained-rate endpoint.

    m = 0.5: the BCRB does not exist while the RDB is finite. m = 1: both are
    finite, and in the scalar case they coincide. m = 2: the Monte Carlo BCRB
    lies above the RDB with disjoint 3-sigma intervals.
    """
    from .optimizer import pareto_sweep_nakagami

    notes = []
    ok = True
    measured = reference = math.nan
    for m in m_values:
        cfg = table1_config(m)
        pt = pareto_sweep_nakagami(cfg, n_draws, 2, seed, workers=workers)[0]
        rdb_ok = math.isfinite(pt.D) and pt.D > 0
        if m < 1:
            try:
                bcrb_from_cov(np.eye(cfg.M), cfg)
                inapplicable = False
            except BcrbInapplicable:
                inapplicable = True
            ok &= rdb_ok and inapplicable and pt.D_bcrb is None
            notes.append(f"m={m:g}: RDB {pt.D:.4g}, BCRB inapplicable={inapplicable}")
        elif m == 1:
            both = rdb_ok and pt.D_bcrb is not None and math.isfinite(pt.D_bcrb)
            scalar = SystemConfig(M=1, N_s=1, N_c=1, T=1, P0=1.0, sigma2_s=0.3, sigma2_c=1.0,
                                  m_s=1.0, omega_s=2.0, m_c=1.0, omega_c=1.0)
            q = np.array([[1.7]])
            coincide = abs(bcrb_from_cov(q, scalar) - mmse_lower_bound_from_cov(q, scalar)) <= 1e-12
            ok &= both and coincide
            notes.append(f"m=1: RDB {pt.D:.4g}, BCRB {pt.D_bcrb:.4g}, scalar coincidence={coincide}")
        else:
            sep = (pt.D_bcrb - 3 * pt.D_bcrb_stderr) - (pt.D + 3 * pt.D_stderr)
            ok &= rdb_ok and sep > 0
            measured, reference = pt.D_bcrb, pt.D
            notes.append(f"m={m:g}: BCRB {pt.D_bcrb:.4g}+-{pt.D_bcrb_stderr:.2g} vs RDB {pt.D:.4g}+-{pt.D_stderr:.2g}")
    return CheckReport("bcrb-ordering", bool(ok), float(measured), float(reference), 0.0, "; ".join(notes))


SUITE = (
    "gaussian-equality",
    "high-noise-bernoulli",
    "high-noise-nakagami-m1",
    "high-noise-nakagami-m2",
    "stam",
    "detector",
    "bcrb-ordering",
)


def run_suite(seed: int = 0, only: str = None, workers: int = 1, n_draws: int = 2000):
    """Run the default checks in fixed order; ``only`` keeps names starting with it."""
    names = [n for n in SUITE if only is None or n == only or n.startswith(only)]
    if not names:
        raise ValueError(f"no check named {only!r}; choose from {', '.join(SUITE)}")
    out = []
    for name in names:
        if name == "gaussian-equality":
            out.append(check_rdb_gaussian_equality())
        elif name == "high-noise-bernoulli":
            out.append(check_high_noise_tightness("bernoulli"))
        elif name.startswith("high-noise-nakagami-m"):
            out.append(check_high_noise_tightness("nakagami", m=float(name.rsplit("m", 1)[1])))
        elif name == "stam":
            out.append(check_conditional_stam_scalar())
        elif name == "detector":
            out.append(check_detector_vs_bound(seed=seed))
        elif name == "bcrb-ordering":
            out.append(check_bcrb_vs_rdb_ordering(n_draws=n_draws, seed=seed, workers=workers))
    return out
