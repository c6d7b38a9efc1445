"""Rate-distortion functions, their inverses and lower bounds.

Includes the closed-form Bernoulli/Hamming curve, continuous and discrete
Shannon lower bounds, the second-order (dual) relaxation of the inverse
rate-distortion function, and a Blahut-Arimoto solver used as an oracle.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .mathfn import binary_entropy, binary_entropy_inverse


class StructureError(ValueError):
    """Raised when a distortion matrix lacks the structure a bound requires."""


@dataclass(frozen=True)
class BernoulliSource:
    p1: float

    def __post_init__(self):
        if not 0.0 <= self.p1 <= 1.0:
            raise ValueError(f"p1 must lie in [0, 1], got {self.p1!r}")

    @property
    def entropy(self) -> float:
        return binary_entropy(self.p1)

    @property
    def zero_rate_distortion(self) -> float:
        return min(self.p1, 1.0 - self.p1)

    def as_discrete(self) -> "DiscreteSource":
        return DiscreteSource.hamming([1.0 - self.p1, self.p1])


@dataclass(frozen=True)
class DiscreteSource:
    """A finite source law ``pmf`` with distortion matrix ``distortion[i, j]``."""

    pmf: np.ndarray
    distortion: np.ndarray

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        dist = np.asarray(self.distortion, dtype=float)
        if pmf.ndim != 1 or dist.ndim != 2 or dist.shape[0] != pmf.size:
            raise ValueError("distortion must be n x m for a pmf of length n")
        if np.any(pmf < 0) or abs(pmf.sum() - 1.0) > 1e-12:
            raise ValueError("pmf must be nonnegative and sum to 1")
        if np.any(dist < 0):
            raise ValueError("distortion entries must be nonnegative")
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "distortion", dist)

    @classmethod
    def hamming(cls, pmf):
        pmf = np.asarray(pmf, dtype=float)
        n = pmf.size
        return cls(pmf, 1.0 - np.eye(n))

    @property
    def entropy(self) -> float:
        p = self.pmf[self.pmf > 0]
        return float(-np.sum(p * np.log(p)))

    @property
    def zero_rate_distortion(self) -> float:
        """min over reproductions c of E[d(X, c)]."""
        return float(np.min(self.pmf @ self.distortion))


@dataclass
class RdCurve:
    """Sampled rate-distortion curve R(D), non-increasing in D."""

    points: list
    d_min: float = field(default=None)
    d_max: float = field(default=None)

    def __post_init__(self):
        pts = sorted((float(d), float(r)) for d, r in self.points)
        self.points = pts
        if self.d_min is None:
            self.d_min = pts[0][0]
        if self.d_max is None:
            self.d_max = pts[-1][0]

    @property
    def distortions(self):
        return np.array([p[0] for p in self.points])

    @property
    def rates(self):
        return np.array([p[1] for p in self.points])

    def rate(self, D):
        if D >= self.d_max:
            return 0.0
        return float(np.interp(D, self.distortions, self.rates))

    def inverse(self, r):
        """Smallest sampled-curve distortion with rate at most ``r``."""
        if r < 0:
            raise ValueError("rate must be nonnegative")
        d, R = self.distortions, self.rates
        if r >= R[0]:
            return float(d[0])
        # R is non-increasing: interpolate on the reversed arrays
        return float(np.interp(r, R[::-1], d[::-1]))

    def is_monotone(self, tol=1e-9):
        return bool(np.all(np.diff(self.rates) <= tol))

    def is_convex(self, tol=1e-9):
        d, R = self.distortions, self.rates
        for i in range(1, len(d) - 1):
            w = (d[i] - d[i - 1]) / (d[i + 1] - d[i - 1])
            chord = (1 - w) * R[i - 1] + w * R[i + 1]
            if R[i] > chord + tol:
                return False
        return True


def bernoulli_rd(src: BernoulliSource, D: float) -> float:
    """R(D) = H_2(p1) - H_2(D) for Hamming distortion, zero beyond min(p1, 1-p1)."""
    if D < 0:
        raise ValueError(f"distortion must be nonnegative, got {D!r}")
    if D >= src.zero_rate_distortion:
        return 0.0
    return max(src.entropy - binary_entropy(D), 0.0)


def bernoulli_rd_inverse(src: BernoulliSource, r: float) -> float:
    """Inverse of :func:`bernoulli_rd`; returns 0 once ``r`` reaches H_2(p1)."""
    if r < 0:
        raise ValueError(f"rate must be nonnegative, got {r!r}")
    h = src.entropy
    if r >= h:
        return 0.0
    return binary_entropy_inverse(h - r)


def slb_continuous_inverse(n: int, h: float, r: float, field: str = "complex") -> float:
    """Shannon lower bound on R^{-1}(r) for squared-error distortion.

    Real sources: ``n/(2 pi e) exp(2 (h - r) / n)``.
    Complex sources: ``n/(pi e) exp((h - r) / n)``.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if field == "real":
        return n / (2.0 * math.pi * math.e) * math.exp(2.0 * (h - r) / n)
    if field == "complex":
        return n / (math.pi * math.e) * math.exp((h - r) / n)
    raise ValueError(f"field must be 'real' or 'complex', got {field!r}")


def _column_multiset(distortion):
    cols = np.sort(distortion, axis=0)
    ref = cols[:, 0]
    if not np.allclose(cols, ref[:, None], rtol=0, atol=1e-12):
        raise StructureError("columns of the distortion matrix are not permutations of one multiset")
    return ref


def _tilted(d, lam):
    logits = -lam * (d - d.min())
    q = np.exp(logits - logsumexp(logits))
    return q


def _entropy(q):
    q = q[q > 0]
    return float(-np.sum(q * np.log(q)))


def max_entropy_under_distortion(d, D):
    """phi(D) = max H(q) subject to sum_i q_i d_i <= D.

    The maximizer lies in the tilted family q_i ~ exp(-lam d_i); ``lam`` is
    found by bisection on the (decreasing) mean distortion.
    """
    d = np.asarray(d, dtype=float)
    m = d.size
    dmin = d.min()
    if D < dmin - 1e-15:
        return -math.inf
    if D >= d.mean():
        return math.log(m)
    n_min = int(np.sum(np.isclose(d, dmin, rtol=0, atol=1e-15)))
    if D <= dmin or n_min == m:
        return math.log(n_min)
    lo, hi = 0.0, 1.0
    while _tilted(d, hi) @ d > D:
        hi *= 2.0
        if hi > 1e300:
            return math.log(n_min)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _tilted(d, mid) @ d > D:
            lo = mid
        else:
            hi = mid
    return _entropy(_tilted(d, 0.5 * (lo + hi)))


def slb_discrete(src: DiscreteSource, D: float) -> float:
    """Discrete Shannon lower bound H(X) - phi(D), clamped at 0."""
    d = _column_multiset(src.distortion)
    phi = max_entropy_under_distortion(d, D)
    if phi == -math.inf:
        return math.inf
    return max(src.entropy - phi, 0.0)


def second_order_bound(mean_d: float, mean_d2: float, mi: float) -> float:
    """Lower bound ``E[d] - sqrt(2 I E[d^2])`` on the inverse RD function, clamped at 0.

    ``mean_d`` and ``mean_d2`` are the first two moments of d(A, c) at the
    best constant reproduction c.
    """
    if mean_d < 0 or mi < 0:
        raise ValueError("mean_d and mi must be nonnegative")
    if mean_d2 < mean_d * mean_d * (1.0 - 1e-12):
        raise ValueError("moment inconsistency: E[d^2] < E[d]^2")
    return max(0.0, mean_d - math.sqrt(2.0 * mi * mean_d2))


@dataclass(frozen=True)
class BlahutArimotoResult:
    distortion: float
    rate: float
    converged: bool
    iterations: int
    lagrange: float
    marginal: np.ndarray = None


def blahut_arimoto(src: DiscreteSource, lagrange: float, iters: int = 10000, tol: float = 1e-10,
                   init_marginal=None):
    """One point of the RD curve at Lagrange slope ``lagrange``.

    Alternates the optimal test channel W(j|i) ~ q(j) exp(-lagrange d(i, j))
    with the induced reproduction marginal q = p W. Stops when Blahut's
    upper and lower bounds on the rate differ by less than ``tol``.
    ``init_marginal`` warm-starts q.
    """
    if lagrange <= 0:
        raise ValueError("lagrange must be positive")
    p = src.pmf
    d = src.distortion
    support = p > 0
    p, d = p[support], d[support]
    m = d.shape[1]
    if init_marginal is None:
        log_q = np.full(m, -math.log(m))
    else:
        with np.errstate(divide="ignore"):
            log_q = np.log(np.asarray(init_marginal, dtype=float))
    converged = False
    it = 0
    for it in range(1, iters + 1):
        log_w = log_q[None, :] - lagrange * d
        top = log_w.max(axis=1, keepdims=True)
        log_w -= top + np.log(np.exp(log_w - top).sum(axis=1, keepdims=True))
        w = np.exp(log_w)
        q = p @ w
        with np.errstate(divide="ignore"):
            log_q_new = np.log(q)
        # Blahut's bracket: the rate at this slope is known to within
        # max_j ln c_j - sum_j q'_j ln c_j, with c_j = q'_j / q_j
        with np.errstate(invalid="ignore"):
            log_c = np.where(q > 0, log_q_new - log_q, -np.inf)
            gap = float(np.max(log_c) - np.sum(np.where(q > 0, q * log_c, 0.0)))
        log_q = log_q_new
        if gap < tol:
            converged = True
            break
    with np.errstate(invalid="ignore"):
        terms = np.where(w > 0, w * (log_w - log_q[None, :]), 0.0)
    rate = float(p @ terms.sum(axis=1))
    distortion = float(p @ (w * d).sum(axis=1))
    return BlahutArimotoResult(distortion, max(rate, 0.0), converged, it, lagrange, np.exp(log_q))


def blahut_arimoto_at_distortion(src: DiscreteSource, target: float, dtol: float = 1e-8, **kwargs):
    """Find the Lagrange slope at which E[d] lands within ``dtol`` of ``target``.

    Distortion decreases monotonically in the slope, so a bracket on the log
    slope is refined with Brent's method. Successive solves are warm-started
    from the previous reproduction marginal.
    """
    d0 = src.zero_rate_distortion
    if target >= d0:
        return BlahutArimotoResult(d0, 0.0, True, 0, 0.0)
    state = {"marginal": None, "best": None}

    def solve(log_lam):
        res = blahut_arimoto(src, math.exp(log_lam), init_marginal=state["marginal"], **kwargs)
        state["marginal"] = res.marginal
        best = state["best"]
        if best is None or abs(res.distortion - target) < abs(best.distortion - target):
            state["best"] = res
        return res.distortion - target

    class _Hit(Exception):
        pass

    def excess(log_lam):
        err = solve(log_lam)
        if abs(err) <= dtol:
            raise _Hit
        return err

    try:
        # bracket the slope by stepping outward from lambda = 1, then refine with Brent
        lo = hi = 0.0
        if excess(0.0) > 0:
            while True:
                lo, hi = hi, hi + 2.0
                if excess(hi) < 0 or hi > 60:
                    break
        else:
            while True:
                lo, hi = lo - 2.0, lo
                if excess(lo) > 0 or lo < -40:
                    break
        if lo > -40 and hi <= 60:
            brentq(excess, lo, hi, xtol=1e-14, maxiter=200)
    except _Hit:
        pass
    return state["best"]


def rd_curve_blahut_arimoto(src: DiscreteSource, lagranges, **kwargs) -> RdCurve:
    pts = []
    for lam in lagranges:
        res = blahut_arimoto(src, lam, **kwargs)
        pts.append((res.distortion, res.rate))
    pts.append((src.zero_rate_distortion, 0.0))
    return RdCurve(pts, d_max=src.zero_rate_distortion)


def rd_curve_bernoulli(src: BernoulliSource, n: int = 101) -> RdCurve:
    d_max = src.zero_rate_distortion
    grid = np.linspace(0.0, d_max, n)
    return RdCurve([(D, bernoulli_rd(src, D)) for D in grid], d_min=0.0, d_max=d_max)
