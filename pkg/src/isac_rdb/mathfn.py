"""Scalar special functions and information primitives.

Every information quantity in this package is in nats. Conversion to bits
happens only when results are formatted for output (see :func:`to_bits`).
"""

import math

import numpy as np

Nat = float

LN2 = math.log(2.0)
EULER_GAMMA = 0.57721566490153286061

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli numbers B_2k / (2k) for the digamma asymptotic series
_DIGAMMA_ASYMP = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def _check_positive(x, name):
    if not (x > 0.0) or math.isnan(x):
        raise ValueError(f"{name} requires x > 0, got {x!r}")


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0`` (Lanczos)."""
    x = float(x)
    _check_positive(x, "log_gamma")
    if math.isinf(x):
        return math.inf
    if x == 1.0 or x == 2.0:
        return 0.0
    if x < 0.5:
        return log_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    a = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        a += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(a)


def digamma(x: float) -> float:
    """Digamma function psi(x) for ``x > 0``.

    The argument is shifted to ``x >= 10`` with psi(x) = psi(x + 1) - 1/x and
    then evaluated with the asymptotic expansion.
    """
    x = float(x)
    _check_positive(x, "digamma")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for c in _DIGAMMA_ASYMP:
        series += c * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - series


def binary_entropy(p):
    """Binary entropy H_2(p) in nats, with 0 log 0 = 0. Accepts arrays."""
    arr = np.asarray(p, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError(f"binary_entropy requires p in [0, 1], got {p!r}")
    q = 1.0 - arr
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(arr > 0, arr * np.log(arr), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    if h.ndim == 0:
        return float(h)
    return h


def binary_entropy_inverse(h: float) -> float:
    """The p in [0, 1/2] with H_2(p) = h, found by bisection."""
    h = float(h)
    if not (0.0 <= h <= LN2 * (1.0 + 1e-15)):
        raise ValueError(f"binary_entropy_inverse requires h in [0, ln 2], got {h!r}")
    if h == 0.0:
        return 0.0
    if h >= LN2:
        return 0.5
    lo, hi = 0.0, 0.5
    # run to full double resolution; tiny h need relative, not absolute, accuracy
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if binary_entropy(mid) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def kl_bernoulli(p: float, q: float) -> float:
    """KL divergence D(Bern(p) || Bern(q)) in nats; ``inf`` on support mismatch."""
    p, q = float(p), float(q)
    for name, val in (("p", p), ("q", q)):
        if not 0.0 <= val <= 1.0:
            raise ValueError(f"kl_bernoulli requires {name} in [0, 1], got {val!r}")
    total = 0.0
    for a, b in ((p, q), (1.0 - p, 1.0 - q)):
        if a == 0.0:
            continue
        if b == 0.0:
            return math.inf
        total += a * math.log(a / b)
    return max(total, 0.0)


def kl_flip(p1: float) -> float:
    """D(A || 1-A) for A ~ Bern(p1): the divergence between a law and its flip."""
    return kl_bernoulli(p1, 1.0 - p1)


def to_bits(value):
    """Convert nats to bits (formatting layer only)."""
    return value / LN2
