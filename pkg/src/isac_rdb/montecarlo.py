"""Seeded Monte Carlo expectations with per-trial counter-based RNG streams.

Trial ``i`` of a run with master seed ``s`` always draws from a Philox
generator keyed by ``s`` whose counter starts at ``i << 192``. Values are
reduced in trial-index order, so results do not depend on how many workers
evaluated them.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import SystemConfig, logdet_hpd, sample_nakagami_matrix

CHUNK = 256
_MASK64 = (1 << 64) - 1


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for trial ``index`` under master ``seed``."""
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    key = [seed & _MASK64, (seed >> 64) & _MASK64]
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, index]))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int
    excluded: int = 0
    flagged: bool = False

    def ci(self, k=3.0):
        return self.mean - k * self.stderr, self.mean + k * self.stderr


class Welford:
    """Streaming mean and variance."""

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def push(self, x):
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    @property
    def variance(self):
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0

    @property
    def stderr(self):
        return math.sqrt(self.variance / self.n) if self.n > 1 else 0.0


def map_trials(fn, n: int, seed: int, workers: int = 1) -> list:
    """``[fn(trial_rng(seed, i)) for i in range(n)]``, evaluated in fixed chunks."""
    chunks = [range(i, min(i + CHUNK, n)) for i in range(0, n, CHUNK)]

    def run(idx):
        return [fn(trial_rng(seed, i)) for i in idx]

    if workers <= 1 or len(chunks) <= 1:
        parts = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    return [v for part in parts for v in part]


def summarize(values, seed: int = 0, n_total: int = None) -> McEstimate:
    """Welford reduction of ``values`` in order, excluding non-finite entries."""
    acc = Welford()
    excluded = 0
    for v in values:
        v = float(v)
        if not math.isfinite(v):
            excluded += 1
            continue
        acc.push(v)
    n_total = len(values) if n_total is None else n_total
    flagged = excluded > 0.01 * max(n_total, 1)
    return McEstimate(acc.mean, acc.stderr, acc.n, seed, excluded, flagged)


def expect(fn, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Monte Carlo estimate of E[fn(rng)] over ``n`` independent trials."""
    if n < 2:
        raise ValueError("need at least 2 trials")
    return summarize(map_trials(fn, n, seed, workers), seed)


def capacity_integrand(H_c, cfg: SystemConfig, form: str = "N") -> float:
    """ln det(I + (P0 / sigma2_c) H H^H), in the N_c x N_c or M x M form."""
    snr = cfg.P0 / cfg.sigma2_c
    if form == "N":
        G = np.eye(H_c.shape[0]) + snr * (H_c @ H_c.conj().T)
    elif form == "M":
        G = np.eye(H_c.shape[1]) + snr * (H_c.conj().T @ H_c)
    else:
        raise ValueError("form must be 'N' or 'M'")
    return logdet_hpd(G)


def ergodic_capacity_mc(cfg: SystemConfig, n: int, seed: int, workers: int = 1, form: str = "N") -> McEstimate:
    """CSIR ergodic capacity with isotropic input, E[ln det(I + (P0/sigma2_c) H_c H_c^H)]."""

    def draw(rng):
        H = sample_nakagami_matrix(cfg.N_c, cfg.M, cfg.m_c, cfg.omega_c, rng)
        return capacity_integrand(H, cfg, form)

    return expect(draw, n, seed, workers)
