"""Covariance shaping on the PSD cone.

Maximizes the per-realization rate ``ln det(I + H_c Q H_c^H / (T sigma2_c))``
over Hermitian PSD ``Q`` with ``tr Q = budget``, optionally subject to a
sensing floor: either ``ln det(I + beta Q) >= tau`` (Nakagami case) or
``v^H Q v >= gamma`` (occupancy case).

The solver is projected gradient ascent with Barzilai-Borwein steps and
Armijo backtracking. The projection onto {Hermitian, PSD, fixed trace} is an
eigendecomposition followed by a Euclidean simplex projection of the
eigenvalues. An active floor is met with equality and solved exactly by a
one-dimensional search on its multiplier: weighted water-filling for the
quadratic floor, per-mode power allocation for the log-det floor. A
logarithmic barrier whose weight is driven to zero over warm-started stages
is kept as a fallback and selectable with ``floor_method="barrier"``.
Problems are solved
in batches; every problem carries its own step size and stopping state, so a
result never depends on which other problems shared its batch.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .channels import SystemConfig, sample_nakagami_matrix
from .montecarlo import CHUNK, summarize, trial_rng
from .nakagami import BcrbInapplicable, bcrb_from_cov, mmse_lower_bound_from_cov, prior_risk_slb
from .occupancy import OccupancyConfig, detection_bound_from_gamma


class Infeasible(ValueError):
    """The constraint set is empty."""


@dataclass(frozen=True)
class LogdetFloor:
    beta: float
    tau: float


@dataclass(frozen=True)
class QuadformFloor:
    v: np.ndarray
    gamma: float


@dataclass(frozen=True)
class PsdConstraintSet:
    trace_budget: float
    floor: object = None

    def __post_init__(self):
        if not self.trace_budget > 0:
            raise ValueError("trace_budget must be positive")

    def max_floor(self, M: int) -> float:
        """Largest attainable floor value (isotropic Q for logdet, rank one along v for quadform)."""
        f = self.floor
        if isinstance(f, LogdetFloor):
            return M * math.log1p(f.beta * self.trace_budget / M)
        if isinstance(f, QuadformFloor):
            return self.trace_budget
        return math.inf

    def check_feasible(self, M: int):
        f = self.floor
        if f is None:
            return
        level = f.tau if isinstance(f, LogdetFloor) else f.gamma
        top = self.max_floor(M)
        if level > top * (1.0 + 1e-12) + 1e-15:
            raise Infeasible(f"floor {level} exceeds its maximum attainable value {top}")


@dataclass
class SolverOptions:
    ftol: float = 1e-12
    max_iter: int = 10000
    penalties: tuple = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)
    armijo: float = 1e-4
    memory: int = 10
    # "dual": exact multiplier search for an active floor; "barrier": the generic interior-penalty path
    floor_method: str = "dual"


@dataclass
class ParetoPoint:
    sweep_param: float
    Q: np.ndarray
    objective: float
    floor_value: float
    converged: bool
    iterations: int
    kkt_residual: float = float("nan")

    def feasibility_residual(self, budget: float) -> float:
        """Largest relative violation of trace, PSD and floor constraints (0 when feasible)."""
        Q = self.Q
        tr = abs(np.trace(Q).real - budget) / budget
        herm = np.linalg.norm(Q - Q.conj().T) / budget
        psd = max(0.0, -np.linalg.eigvalsh(_herm(Q)).min()) / budget
        fl = 0.0
        if math.isfinite(self.sweep_param):
            fl = max(0.0, self.sweep_param - self.floor_value) / max(1.0, abs(self.sweep_param))
        return float(max(tr, herm, psd, fl))


@dataclass(frozen=True)
class RegionPoint:
    """One (distortion, rate) pair of a converse-region sweep."""

    sweep_param: float
    D: float
    D_stderr: float
    R_mean: float
    R_stderr: float
    D_bcrb: float = None
    D_bcrb_stderr: float = None
    n_used: int = 0
    n_failed: int = 0
    n_unconverged: int = 0
    max_residual: float = 0.0


# ---------------------------------------------------------------------------
# batched linear algebra helpers

def _herm(A):
    return 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))


def _inner(A, B):
    """Real Frobenius inner product per batch element."""
    return np.einsum("kij,kij->k", A.conj(), B).real


def project_simplex(w, total=1.0):
    """Euclidean projection of ``w`` (or each row of a 2-D ``w``) onto {x >= 0, sum x = total}."""
    w = np.asarray(w, dtype=float)
    single = w.ndim == 1
    w = np.atleast_2d(w)
    u = -np.sort(-w, axis=1)
    css = np.cumsum(u, axis=1) - total
    ind = np.arange(1, w.shape[1] + 1)
    cond = u - css / ind > 0
    rho = w.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(w.shape[0]), rho] / (rho + 1)
    x = np.maximum(w - theta[:, None], 0.0)
    return x[0] if single else x


def project_trace_psd(Y, total=1.0):
    """Projection of a Hermitian matrix (or a stack of them) onto {PSD, trace = total}."""
    Y = np.asarray(Y)
    single = Y.ndim == 2
    w, U = np.linalg.eigh(_herm(Y if not single else Y[None]))
    w = project_simplex(w, total)
    X = _herm((U * w[:, None, :]) @ np.conj(np.swapaxes(U, -1, -2)))
    return X[0] if single else X


def _logdet_batch(A):
    sign, ld = np.linalg.slogdet(A)
    return np.where(sign.real > 0, ld, -np.inf)


# ---------------------------------------------------------------------------
# objective pieces in the normalized variable X = Q / budget (tr X = 1)

class _Problem:
    def __init__(self, Hn, budget, floor, M):
        # Hn = H_c / sqrt(T sigma2_c), stacked (K, N_c, M)
        self.Hn = Hn
        self.HnH = np.conj(np.swapaxes(Hn, -1, -2))
        self.P = budget
        self.floor = floor
        self.M = M
        self.I_N = np.eye(Hn.shape[1])
        self.I_M = np.eye(M)
        if isinstance(floor, QuadformFloor):
            v = np.asarray(floor.v, dtype=complex).reshape(-1)
            self.vv = np.outer(v, v.conj())
            self.v = v

    def rate(self, X, idx):
        G = self.I_N + self.P * (self.Hn[idx] @ X @ self.HnH[idx])
        return _logdet_batch(G)

    def rate_grad(self, X, idx):
        G = self.I_N + self.P * (self.Hn[idx] @ X @ self.HnH[idx])
        return _herm(self.P * (self.HnH[idx] @ np.linalg.solve(G, self.Hn[idx])))

    def floor_slack(self, X):
        f = self.floor
        if isinstance(f, LogdetFloor):
            return _logdet_batch(self.I_M + f.beta * self.P * X) - f.tau
        if isinstance(f, QuadformFloor):
            return self.P * np.einsum("i,kij,j->k", self.v.conj(), X, self.v).real - f.gamma
        return np.full(X.shape[0], np.inf)

    def floor_value(self, X):
        f = self.floor
        if isinstance(f, LogdetFloor):
            return _logdet_batch(self.I_M + f.beta * self.P * X)
        if isinstance(f, QuadformFloor):
            return self.P * np.einsum("i,kij,j->k", self.v.conj(), X, self.v).real
        return np.full(X.shape[0], np.nan)

    def floor_grad(self, X):
        f = self.floor
        if isinstance(f, LogdetFloor):
            B = self.I_M + f.beta * self.P * X
            return _herm(f.beta * self.P * np.linalg.inv(B))
        return np.broadcast_to(self.P * self.vv, X.shape)

    def value(self, X, idx, mu):
        val = self.rate(X, idx)
        if mu > 0:
            s = self.floor_slack(X)
            with np.errstate(divide="ignore", invalid="ignore"):
                val = np.where(s > 0, val + mu * np.log(np.where(s > 0, s, 1.0)), -np.inf)
        return val

    def grad(self, X, idx, mu):
        g = self.rate_grad(X, idx)
        if mu > 0:
            s = self.floor_slack(X)
            g = g + (mu / s)[:, None, None] * self.floor_grad(X)
        return g


def _pga(prob, X, mu, opts, active):
    """Projected gradient ascent on prob.value(., mu) for the problems in ``active``.

    Returns the updated X, per-problem iteration counts and convergence flags.
    """
    K = X.shape[0]
    iters = np.zeros(K, dtype=int)
    done = ~active.copy()
    converged = np.zeros(K, dtype=bool)
    converged[done] = True
    all_idx = np.arange(K)

    f = np.full(K, -np.inf)
    G = np.zeros_like(X)
    if active.any():
        f[active] = prob.value(X[active], all_idx[active], mu)
        G[active] = prob.grad(X[active], all_idx[active], mu)
    step = np.ones(K) / np.maximum(np.linalg.norm(G, axis=(1, 2)), 1e-300)
    calm = np.zeros(K, dtype=int)
    # nonmonotone reference: best of the last ``memory`` objective values
    hist = np.repeat(f[:, None], max(opts.memory, 1), axis=1)

    for it in range(opts.max_iter):
        idx = all_idx[~done]
        if idx.size == 0:
            break
        iters[idx] += 1
        Xi, Gi, fi = X[idx], G[idx], f[idx]
        fref = hist[idx].min(axis=1)
        t = step[idx].copy()
        Xn = project_trace_psd(Xi + t[:, None, None] * Gi)
        fn = prob.value(Xn, idx, mu)
        need = ~(fn >= fref + opts.armijo * _inner(Gi, Xn - Xi))
        tries = 0
        while need.any() and tries < 60:
            t[need] *= 0.5
            sub = np.flatnonzero(need)
            Xn[sub] = project_trace_psd(Xi[sub] + t[sub, None, None] * Gi[sub])
            fn[sub] = prob.value(Xn[sub], idx[sub], mu)
            need[sub] = ~(fn[sub] >= fref[sub] + opts.armijo * _inner(Gi[sub], Xn[sub] - Xi[sub]))
            tries += 1
        # stalled problems keep their iterate
        stalled = need
        Xn[stalled] = Xi[stalled]
        fn[stalled] = fi[stalled]
        Gn = prob.grad(Xn, idx, mu)

        s = Xn - Xi
        y = Gn - Gi
        sy = -_inner(s, y)
        ss = _inner(s, s)
        bb = np.where(sy > 0, ss / np.where(sy > 0, sy, 1.0), t * 2.0)
        step[idx] = np.clip(bb, 1e-12 * t + 1e-300, 1e12 * np.maximum(t, 1e-300))

        rel = np.abs(fn - fi) / np.maximum(np.abs(fn), 1.0)
        calm[idx] = np.where(rel < opts.ftol, calm[idx] + 1, 0)
        X[idx], G[idx], f[idx] = Xn, Gn, fn
        hist[idx, it % hist.shape[1]] = fn
        finished = (calm[idx] >= 3) | stalled
        converged[idx[finished]] = True
        done[idx[finished]] = True
    return X, iters, converged


def kkt_residual(prob, X, lam=None):
    """||P(X + grad L) - X||_F relative to the rate gradient norm at I/M.

    ``grad L`` is the rate gradient plus ``lam`` times the floor gradient,
    with ``lam`` the floor multiplier reported by the solver (zero when the
    floor is slack). A zero residual certifies global optimality.
    """
    idx = np.arange(X.shape[0])
    G = prob.rate_grad(X, idx)
    if prob.floor is not None and lam is not None:
        G = G + np.asarray(lam)[:, None, None] * np.array(prob.floor_grad(X))
    r = np.linalg.norm(project_trace_psd(X + G) - X, axis=(1, 2))
    X0 = np.broadcast_to(np.eye(prob.M) / prob.M, X.shape).copy()
    ref = np.linalg.norm(prob.rate_grad(X0, idx), axis=(1, 2))
    return r / np.maximum(ref, 1e-300)


def _feasible_start(prob, X_from, anchor):
    """A point on the segment X_from -> anchor with strictly positive floor slack."""
    K = X_from.shape[0]
    lo = np.zeros(K)
    hi = np.ones(K)
    s_anchor = prob.floor_slack(anchor)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        Xm = (1 - mid)[:, None, None] * X_from + mid[:, None, None] * anchor
        ok = prob.floor_slack(Xm) > 0.5 * mid * s_anchor
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    t = hi
    return (1 - t)[:, None, None] * X_from + t[:, None, None] * anchor


def _weighted_water_level(inv_gain, weight, P):
    """Per row, the level w with sum_i weight_i (w - inv_gain_i)^+ = P."""
    order = np.argsort(inv_gain, axis=1)
    g = np.take_along_axis(inv_gain, order, axis=1)
    c = np.take_along_axis(weight, order, axis=1)
    cw = np.cumsum(c, axis=1)
    cg = np.cumsum(np.where(np.isfinite(g), c * g, 0.0), axis=1)
    level = (P + cg) / cw
    # the active set is the largest prefix whose level clears its own threshold
    ok = level > g
    k = g.shape[1] - 1 - np.argmax(ok[:, ::-1], axis=1)
    return level[np.arange(g.shape[0]), k]


def _quadform_cov(A, vv, P, y):
    """Maximizer of ln det(I + A Q) - nu tr((I - kappa v v^H) Q) with tr Q = P.

    In the metric B = I - kappa v v^H the problem is plain water-filling:
    with B^{-1/2} A B^{-1/2} = U diag(a) U^H and W = B^{-1/2} U,
    Q = W diag((w - 1/a)^+) W^H where the level w meets the trace budget.
    ``y = -ln(1 - kappa)`` keeps kappa near 1 representable.
    """
    M = A.shape[-1]
    s = np.expm1(0.5 * y)
    Bih = np.eye(M) + s[:, None, None] * vv
    a, U = np.linalg.eigh(_herm(Bih @ A @ Bih))
    W = Bih @ U
    c = np.sum(np.abs(W) ** 2, axis=1)
    with np.errstate(divide="ignore"):
        inv = np.where(a > 0, 1.0 / np.where(a > 0, a, 1.0), np.inf)
    w = _weighted_water_level(inv, c, P)
    p = np.maximum(w[:, None] - inv, 0.0)
    return _herm((W * p[:, None, :]) @ np.conj(np.swapaxes(W, -1, -2))), w


def _solve_quadform_dual(prob, gamma, iters=200):
    """Exact optimum of the quadratic-floor problem for a batch where the floor binds.

    Bisects kappa = lambda / nu on a logarithmic scale of 1 - kappa so that
    v^H Q v = gamma. Any such point satisfies the KKT conditions of the
    convex problem and is therefore optimal. The returned iterate sits on
    the feasible side of the bracket.
    """
    A = _herm(prob.HnH @ prob.Hn)
    K = A.shape[0]
    P = prob.P
    lo = np.zeros(K)  # y = -ln(1 - kappa); y = 0 is the floor-free solution
    hi = np.full(K, 30.0)
    Q_hi, w_hi = _quadform_cov(A, prob.vv, P, hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        Q, w = _quadform_cov(A, prob.vv, P, mid)
        ok = np.einsum("i,kij,j->k", prob.v.conj(), Q, prob.v).real >= gamma
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
        Q_hi = np.where(ok[:, None, None], Q, Q_hi)
        w_hi = np.where(ok, w, w_hi)
        if np.all(hi - lo <= 1e-15 * np.maximum(hi, 1.0)):
            break
    # multiplier of the floor: lambda = kappa * nu with nu = 1 / w
    lam = -np.expm1(-hi) / w_hi
    return Q_hi / P, lam


def _logdet_alloc(a, beta, lam, nu):
    """Per-mode powers solving a/(1+a p) + lam beta/(1+beta p) = nu, clipped at zero."""
    lam = lam[:, None]
    nu = nu[:, None]
    c0 = nu - a - lam * beta
    qa = nu * a * beta
    b = nu * (a + beta) - a * beta * (1.0 + lam)
    disc = np.sqrt(np.maximum(b * b - 4.0 * qa * c0, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        # stable positive root of qa p^2 + b p + c0 = 0 for c0 < 0
        root = np.where(b >= 0, -2.0 * c0 / (b + disc), (disc - b) / (2.0 * qa))
        flat = lam / nu - 1.0 / beta  # a = 0: only the floor term acts
    p = np.where(a > 0, root, flat)
    return np.where(c0 < 0, np.maximum(p, 0.0), 0.0)


def _solve_logdet_dual(prob, tau, iters=64):
    """Exact optimum of the log-det-floor problem for a batch where the floor binds.

    Both objectives depend on Q only through its eigenvalues once Q shares
    the eigenbasis of H^H H, and the rate is maximal in that alignment, so
    the problem is a per-mode power allocation. The floor multiplier lambda
    is bisected on a log scale; for each lambda the trace multiplier nu is
    bisected so that the powers meet the budget.
    """
    A = _herm(prob.HnH @ prob.Hn)
    a, U = np.linalg.eigh(A)
    a = np.clip(a, 0.0, None)
    K = a.shape[0]
    P = prob.P
    beta = prob.floor.beta

    def powers(lam):
        amax = a.max(axis=1)
        lo = np.log(amax / (1.0 + amax * P) + lam * beta / (1.0 + beta * P))
        hi = np.log(amax + lam * beta)
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            over = _logdet_alloc(a, beta, lam, np.exp(mid)).sum(axis=1) > P
            lo = np.where(over, mid, lo)
            hi = np.where(over, hi, mid)
        p = _logdet_alloc(a, beta, lam, np.exp(hi))
        return p * (P / p.sum(axis=1))[:, None]

    lo = np.full(K, math.log(1e-12))
    hi = np.full(K, math.log(1e12))
    p_hi = powers(np.exp(hi))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        p = powers(np.exp(mid))
        ok = np.sum(np.log1p(beta * p), axis=1) >= tau
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
        p_hi = np.where(ok[:, None], p, p_hi)
    X = _herm((U * (p_hi / P)[:, None, :]) @ np.conj(np.swapaxes(U, -1, -2)))
    feasible = np.sum(np.log1p(beta * p_hi), axis=1) >= tau * (1.0 - 1e-13)
    return X, np.exp(hi), feasible


def solve_batch(H_stack, cfg: SystemConfig, cset: PsdConstraintSet, opts: SolverOptions = None,
                X_unconstrained=None):
    """Solve the floor-constrained rate maximization for each channel in ``H_stack``.

    Returns ``(points, X_unconstrained)``; the second value can be passed back
    in for other floor levels on the same channels.
    """
    opts = opts or SolverOptions()
    H_stack = np.asarray(H_stack, dtype=complex)
    if H_stack.ndim == 2:
        H_stack = H_stack[None]
    K, _, M = H_stack.shape
    cset.check_feasible(M)
    Hn = H_stack / math.sqrt(cfg.T * cfg.sigma2_c)
    P = cset.trace_budget
    prob = _Problem(Hn, P, cset.floor, M)
    floor = cset.floor
    level = None if floor is None else (floor.tau if isinstance(floor, LogdetFloor) else floor.gamma)

    iters = np.zeros(K, dtype=int)
    conv = np.ones(K, dtype=bool)
    lam = np.zeros(K)
    pinned_mask = np.zeros(K, dtype=bool)

    # the floor at its maximum pins Q to a single matrix
    if floor is not None and level >= cset.max_floor(M) * (1.0 - 1e-12):
        if isinstance(floor, LogdetFloor):
            pinned = np.eye(M, dtype=complex) / M
        else:
            pinned = prob.vv.astype(complex)
        X = np.broadcast_to(pinned, (K, M, M)).copy()
        pinned_mask[:] = True
    else:
        if X_unconstrained is None:
            X0 = np.broadcast_to(np.eye(M, dtype=complex) / M, (K, M, M)).copy()
            X_unconstrained, it0, c0 = _pga(prob, X0, 0.0, opts, np.ones(K, dtype=bool))
            iters += it0
            conv &= c0
        X = X_unconstrained.copy()
        if floor is not None:
            active = ~(prob.floor_slack(X) >= 0)
            if active.any() and opts.floor_method == "dual":
                sub = prob_subset(prob, active)
                if isinstance(floor, QuadformFloor):
                    X[active], lam[active] = _solve_quadform_dual(sub, floor.gamma)
                    active[:] = False
                else:
                    X[active], lam[active], ok = _solve_logdet_dual(sub, floor.tau)
                    # an exhausted multiplier bracket leaves those problems to the barrier path
                    active[np.flatnonzero(active)[ok]] = False
            if active.any():
                anchor = (np.eye(M) / M) if isinstance(floor, LogdetFloor) else prob.vv
                anchor = np.broadcast_to(anchor.astype(complex), (int(active.sum()), M, M)).copy()
                X[active] = _feasible_start(prob_subset(prob, active), X[active], anchor)
                for mu in opts.penalties:
                    X, it, c = _pga(prob, X, mu, opts, active)
                    iters += it
                    conv &= c
                # barrier multiplier estimate mu / slack
                lam[active] = opts.penalties[-1] / prob.floor_slack(X)[active]

    obj = prob.rate(X, np.arange(K))
    fval = prob.floor_value(X)
    # a pinned feasible set is a single point, optimal by definition
    kkt = np.where(pinned_mask, 0.0, kkt_residual(prob, X, lam))
    Qs = X * P
    param = math.nan if level is None else level
    pts = [ParetoPoint(param, Qs[k], float(obj[k]), float(fval[k]), bool(conv[k]), int(iters[k]), float(kkt[k]))
           for k in range(K)]
    return pts, X_unconstrained


def prob_subset(prob, mask):
    sub = _Problem(prob.Hn[mask], prob.P, prob.floor, prob.M)
    return sub


def maximize_rate_with_floor(H_c, cfg: SystemConfig, cset: PsdConstraintSet, opts: SolverOptions = None):
    """Single-channel version of :func:`solve_batch`."""
    pts, _ = solve_batch(np.asarray(H_c)[None], cfg, cset, opts)
    return pts[0]


def water_filling(H_c, cfg: SystemConfig, budget: float = None):
    """Closed-form floor-free optimum: (Q, rate).

    Eigen-decomposes H_c^H H_c / (T sigma2_c) and fills power over the
    eigenmodes with a common water level.
    """
    budget = cfg.budget if budget is None else budget
    H = np.asarray(H_c, dtype=complex)
    A = H.conj().T @ H / (cfg.T * cfg.sigma2_c)
    lam, U = np.linalg.eigh(_herm(A))
    lam = np.clip(lam, 0.0, None)
    order = np.argsort(lam)[::-1]
    lam, U = lam[order], U[:, order]
    p = np.zeros_like(lam)
    for k in range(lam.size, 0, -1):
        g = lam[:k]
        if g[-1] <= 0:
            continue
        level = (budget + np.sum(1.0 / g)) / k
        if level - 1.0 / g[-1] >= 0:
            p[:k] = level - 1.0 / g
            break
    Q = (U * p) @ U.conj().T
    rate = float(np.sum(np.log1p(lam * p)))
    return Q, rate


# ---------------------------------------------------------------------------
# Pareto sweeps

def _draw_channels(cfg: SystemConfig, n: int, seed: int):
    return np.stack([
        sample_nakagami_matrix(cfg.N_c, cfg.M, cfg.m_c, cfg.omega_c, trial_rng(seed, k)) for k in range(n)
    ])


def _run_chunks(fn, n, workers):
    chunks = [np.arange(i, min(i + CHUNK, n)) for i in range(0, n, CHUNK)]
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def tau_max(cfg: SystemConfig) -> float:
    return cfg.M * math.log1p(cfg.beta_s * cfg.P0 * cfg.T)


def pareto_sweep_nakagami(cfg: SystemConfig, n_channel_draws: int, n_sweep: int, seed: int,
                             workers: int = 1, with_bcrb: bool = True, opts: SolverOptions = None):
    """Converse-region sweep over the log-det sensing floor tau in [0, tau_max].

    For every floor level and channel draw the rate-maximizing covariance is
    found; the RDB integrand and (for m_s >= 1) the BCRB integrand are then
    evaluated at that covariance and averaged over draws.
    """
    if n_sweep < 1:
        raise ValueError("n_sweep must be >= 1")
    taus = [tau_max(cfg)] if n_sweep == 1 else list(np.linspace(0.0, tau_max(cfg), n_sweep))
    H_all = _draw_channels(cfg, n_channel_draws, seed)
    bcrb_ok = with_bcrb and cfg.m_s >= 1.0

    def per_chunk(idx):
        rows = []
        X_unc = None
        for tau in taus:
            cset = PsdConstraintSet(cfg.budget, LogdetFloor(cfg.beta_s, float(tau)))
            pts, X_unc = solve_batch(H_all[idx], cfg, cset, opts, X_unconstrained=X_unc)
            rows.append([
                (p.objective, mmse_lower_bound_from_cov(p.Q, cfg),
                 bcrb_from_cov(p.Q, cfg) if bcrb_ok else math.nan, p.converged,
                 p.feasibility_residual(cfg.budget))
                for p in pts
            ])
        return rows

    parts = _run_chunks(per_chunk, n_channel_draws, workers)
    out = []
    for j, tau in enumerate(taus):
        vals = [row for part in parts for row in part[j]]
        R = summarize([v[0] for v in vals], seed)
        D = summarize([v[1] for v in vals], seed)
        nonconv = sum(1 for v in vals if not v[3])
        if bcrb_ok:
            B = summarize([v[2] for v in vals], seed)
            db, dbs = B.mean, B.stderr
        else:
            db = dbs = None
        out.append(RegionPoint(float(tau), D.mean, D.stderr, R.mean, R.stderr, db, dbs,
                               R.n, R.excluded, nonconv, max(v[4] for v in vals)))
        if nonconv:
            warnings.warn(f"tau={tau}: {nonconv} draws did not converge", RuntimeWarning)
    return out


def pareto_sweep_occupancy(occ: OccupancyConfig, n_channel_draws: int, n_sweep: int, seed: int,
                           workers: int = 1, relaxed: bool = False, opts: SolverOptions = None,
                           return_solutions: bool = False):
    """Converse-region sweep over the quadratic sensing floor gamma = v^H Q v in [0, M P0 T]."""
    cfg = occ.system
    if n_sweep < 1:
        raise ValueError("n_sweep must be >= 1")
    gammas = [cfg.budget] if n_sweep == 1 else list(np.linspace(0.0, cfg.budget, n_sweep))
    H_all = _draw_channels(cfg, n_channel_draws, seed)

    def per_chunk(idx):
        rows = []
        X_unc = None
        for g in gammas:
            cset = PsdConstraintSet(cfg.budget, QuadformFloor(occ.v, float(g)))
            pts, X_unc = solve_batch(H_all[idx], cfg, cset, opts, X_unconstrained=X_unc)
            rows.append(pts)
        return rows

    parts = _run_chunks(per_chunk, n_channel_draws, workers)
    out = []
    solutions = []
    for j, g in enumerate(gammas):
        pts = [p for part in parts for p in part[j]]
        R = summarize([p.objective for p in pts], seed)
        nonconv = sum(1 for p in pts if not p.converged)
        D = detection_bound_from_gamma(float(g), occ, relaxed=relaxed)
        resid = max(p.feasibility_residual(cfg.budget) for p in pts)
        out.append(RegionPoint(float(g), D, 0.0, R.mean, R.stderr, None, None, R.n, R.excluded, nonconv, resid))
        solutions.append(pts)
        if nonconv:
            warnings.warn(f"gamma={g}: {nonconv} draws did not converge", RuntimeWarning)
    if return_solutions:
        return out, solutions
    return out


def pareto_hull(points):
    """Upper-left boundary of the closed convex hull of {D >= D_i, R <= R_i}.

    Keeps the points that maximize R for their D on the concave majorant,
    sorted by D ascending (R then non-decreasing).
    """
    pts = sorted(points, key=lambda p: (p.D, -p.R_mean))
    # Pareto filter: as D grows R must strictly grow
    front = []
    for p in pts:
        if front and p.R_mean <= front[-1].R_mean:
            continue
        front.append(p)
    hull = []
    for p in front:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (b.D - a.D) * (p.R_mean - a.R_mean) - (b.R_mean - a.R_mean) * (p.D - a.D)
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull
