"""Stable scalar building blocks: entropies, log-domain binomials, Gaussian expectations.

All logarithms are base 2 and all rates are in bits per channel use.  The
convention 0 * log(0) = 0 is applied uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np
from scipy.special import gammaln

LN2 = math.log(2.0)

__all__ = [
    "LogWeight",
    "QuadratureSpec",
    "QuadratureError",
    "binary_entropy",
    "log_binomial",
    "binomial_log_pmf",
    "block_entropy",
    "awgn_expectation",
    "log_sum",
]


class QuadratureError(RuntimeError):
    """Numerical integration failed to reach the requested tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual estimate {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class LogWeight:
    """Base-2 logarithm of a nonnegative quantity, with an exact-zero state.

    ``log2 = -inf`` encodes an exactly-zero weight; any finite ``log2``
    exponentiates to a strictly positive value.  NaN and +inf are rejected.
    """

    log2: float

    def __post_init__(self) -> None:
        if math.isnan(self.log2) or self.log2 == math.inf:
            raise ValueError(f"invalid log-weight {self.log2!r}")

    @classmethod
    def zero(cls) -> "LogWeight":
        return cls(-math.inf)

    @classmethod
    def of(cls, value: float) -> "LogWeight":
        """Log-weight of a plain nonnegative value."""
        if value < 0:
            raise ValueError(f"negative weight {value!r}")
        return cls(-math.inf) if value == 0 else cls(math.log2(value))

    @property
    def is_zero(self) -> bool:
        return self.log2 == -math.inf

    @property
    def value(self) -> float:
        """The represented quantity, exp2(log2); exactly 0.0 for the zero state."""
        return 0.0 if self.is_zero else 2.0 ** self.log2


@dataclass(frozen=True)
class QuadratureSpec:
    """Node count and target absolute tolerance for Gaussian expectations."""

    node_count: int = 96
    tolerance: float = 1e-10

    def __post_init__(self) -> None:
        if self.node_count < 8:
            raise ValueError("node_count must be at least 8")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


def _check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")
    return p


def binary_entropy(p: float) -> float:
    """Binary entropy H_b(p) = -p*log2(p) - (1-p)*log2(1-p) in bits."""
    p = _check_probability(p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def log_binomial(n: int, k: int) -> LogWeight:
    """log2 of the binomial coefficient C(n, k) via log-gamma."""
    if k < 0 or k > n:
        raise ValueError(f"require 0 <= k <= n, got n={n}, k={k}")
    return LogWeight(_log_binomial(n, k))


def _log_binomial(n: int, k: int) -> float:
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) / LN2


def _log_binomial_vec(n: int, k: np.ndarray) -> np.ndarray:
    return (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) / LN2


def binomial_log_pmf(n: int, j: int, p: float) -> LogWeight:
    """log2 of the Binomial(n, p) mass at j, exact-zero when the mass vanishes."""
    if j < 0 or j > n:
        raise ValueError(f"require 0 <= j <= n, got n={n}, j={j}")
    p = _check_probability(p)
    if p == 0.0:
        return LogWeight(0.0) if j == 0 else LogWeight.zero()
    if p == 1.0:
        return LogWeight(0.0) if j == n else LogWeight.zero()
    return LogWeight(_log_binomial(n, j) + j * math.log2(p) + (n - j) * math.log2(1.0 - p))


def _binomial_log_pmf_vec(n: int, p: float) -> np.ndarray:
    """log2 pmf over j = 0..n for 0 < p < 1."""
    j = np.arange(n + 1)
    return _log_binomial_vec(n, j) + j * math.log2(p) + (n - j) * math.log2(1.0 - p)


def block_entropy(n: int, p: float) -> float:
    """Entropy in bits of the per-block synchronization-event count Binomial(n, p)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p = _check_probability(p)
    if p == 0.0 or p == 1.0:
        return 0.0
    lp = _binomial_log_pmf_vec(n, p)
    # summing -pmf*log2(pmf) with fsum keeps the result exactly rounded and
    # independent of term order
    return math.fsum(np.exp2(lp) * -lp)


def log_sum(terms: Iterable[LogWeight]) -> LogWeight:
    """log2 of a sum of nonnegative quantities given by their log-weights."""
    logs = [t.log2 for t in terms if not t.is_zero]
    if not logs:
        return LogWeight.zero()
    m = max(logs)
    return LogWeight(m + math.log2(math.fsum(2.0 ** (v - m) for v in logs)))


def _softplus_log2(x: np.ndarray) -> np.ndarray:
    """log2(1 + exp(x)), overflow-safe for large positive x."""
    return np.logaddexp(0.0, x) / LN2


def _gauss_hermite(sigma: float, nodes: int) -> float:
    t, w = np.polynomial.hermite.hermgauss(nodes)
    u = 1.0 + math.sqrt(2.0) * sigma * t
    return float(np.sum(w * _softplus_log2(-2.0 * u / sigma**2)) / math.sqrt(math.pi))


def _adaptive_simpson(f, a: float, b: float, tol: float, depth: int = 48) -> float:
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)


def _simpson_step(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = left + right - whole
    if abs(err) <= 15.0 * tol or depth <= 0:
        if depth <= 0 and abs(err) > 15.0 * tol:
            raise QuadratureError("adaptive Simpson recursion exhausted", abs(err) / 15.0)
        return left + right + err / 15.0
    return _simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + _simpson_step(
        f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1
    )


@lru_cache(maxsize=512)
def awgn_expectation(sigma: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Expected log2(1 + exp(-2*y/sigma^2)) for y ~ N(1, sigma^2).

    One minus this value is the capacity of the binary-input AWGN channel with
    unit-energy antipodal signalling and noise variance sigma^2.  The result
    lies in [0, 1) and increases with sigma (it underflows to exactly 0.0 for
    very small sigma).

    Gauss-Hermite quadrature with ``spec.node_count`` nodes is used first; if
    the residual estimate against a coarser rule exceeds ``spec.tolerance``
    the integrand is re-evaluated by adaptive Simpson on [1-12s, 1+12s].
    """
    sigma = float(sigma)
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    fine = _gauss_hermite(sigma, spec.node_count)
    coarse = _gauss_hermite(sigma, max(8, (2 * spec.node_count) // 3))
    if abs(fine - coarse) <= spec.tolerance:
        return fine

    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))

    def integrand(u: float) -> float:
        z = (u - 1.0) / sigma
        return norm * math.exp(-0.5 * z * z) * float(_softplus_log2(np.array(-2.0 * u / sigma**2)))

    lo, hi = 1.0 - 12.0 * sigma, 1.0 + 12.0 * sigma
    if lo < 0.0 < hi:
        # split at the soft kink of the integrand
        return _adaptive_simpson(integrand, lo, 0.0, spec.tolerance / 2) + _adaptive_simpson(
            integrand, 0.0, hi, spec.tolerance / 2
        )
    return _adaptive_simpson(integrand, lo, hi, spec.tolerance)
