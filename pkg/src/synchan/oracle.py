"""Exact small-block enumeration oracles and Monte-Carlo cross-checks.

Everything here is ground truth for the closed forms in
:mod:`synchan.bounds`: exact output laws, entropies, and mutual information
for i.u.d. inputs over the deletion, deletion-substitution, and random
insertion channels, plus Monte-Carlo checks for the continuous-output
deletion-AWGN channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Mapping, Sequence

import mpmath
import numpy as np

from .bounds import (
    deletion_substitution_bound,
    insertion_bound_from_weight,
    random_insertion_bound,
)
from .channels import RngState
from .combinatorics import (
    RunLengthSequence,
    enumerate_deletion_patterns,
    single_insertion_log_weight_exact,
)
from .numerics import LN2, awgn_expectation, binary_entropy, block_entropy

__all__ = [
    "OracleResourceError",
    "ExactDistribution",
    "Comparison",
    "EntropyReport",
    "exact_deletion_law",
    "deletion_output_multiplicities",
    "insertion_output_multiplicities",
    "exact_deletion_substitution_entropies",
    "exact_insertion_entropies",
    "exact_insertion_conditional_law",
    "single_insertion_law",
    "bound_chain_check",
    "exact_block_entropy",
    "mc_awgn_entropy_check",
    "deletion_awgn_pattern_entropy_bound",
    "mc_deletion_awgn_pattern_entropy",
]

MAX_DELETION_LAW_N = 14
MAX_DELETION_ENTROPY_N = 12
MAX_INSERTION_N = 9
MAX_BLOCK_ENTROPY_N = 64


class OracleResourceError(RuntimeError):
    """The requested block length exceeds the oracle's enumeration budget."""


def _check_limit(n: int, limit: int, what: str) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > limit:
        raise OracleResourceError(f"{what} supports n <= {limit}, got {n}")


@dataclass(frozen=True)
class ExactDistribution:
    """A finite probability law over binary output sequences.

    ``support`` maps bit tuples to probabilities (floats, or Fractions in
    rational mode).  ``residual`` is |1 - total mass|: exactly zero in
    rational mode, float roundoff otherwise.
    """

    support: Mapping[tuple[int, ...], float | Fraction]
    exact: bool

    @property
    def residual(self):
        one = Fraction(1) if self.exact else 1.0
        return abs(one - self.mass())

    def mass(self):
        values = list(self.support.values())
        return sum(values) if self.exact else math.fsum(values)

    def entropy(self) -> float:
        """Shannon entropy in bits (computed in float even for rational laws)."""
        return math.fsum(
            -float(p) * math.log2(float(p)) for p in self.support.values() if p > 0
        )


@dataclass(frozen=True)
class Comparison:
    """One verdict of a verification chain: ``value`` vs ``reference``.

    ``relation`` is one of "le", "ge", "eq"; ``margin`` is the signed slack
    (nonnegative when the relation holds exactly) and ``holds`` applies the
    stated tolerance.
    """

    label: str
    value: float
    reference: float
    relation: str
    margin: float
    holds: bool
    tolerance: float

    @classmethod
    def make(cls, label: str, value: float, reference: float, relation: str, tolerance: float):
        if relation == "le":
            margin = reference - value
        elif relation == "ge":
            margin = value - reference
        elif relation == "eq":
            margin = -abs(value - reference)
        else:
            raise ValueError(f"unknown relation {relation!r}")
        return cls(label, value, reference, relation, margin, margin >= -tolerance, tolerance)


@dataclass(frozen=True)
class EntropyReport:
    """Exact entropies for one channel instance plus closed-form comparisons."""

    channel: str
    n: int
    output_entropy: float
    conditional_entropy: float
    mutual_information: float
    block_entropy: float
    bound_chain: tuple[Comparison, ...]
    arithmetic_mode: str

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.bound_chain)


# ---------------------------------------------------------------------------
# deletion-side enumeration
# ---------------------------------------------------------------------------

_POPCOUNT16 = None


def _popcount16() -> np.ndarray:
    global _POPCOUNT16
    if _POPCOUNT16 is None:
        a = np.arange(1 << 16, dtype=np.uint32)
        pc = np.zeros(1 << 16, dtype=np.uint8)
        while a.any():
            pc += (a & 1).astype(np.uint8)
            a >>= 1
        _POPCOUNT16 = pc
    return _POPCOUNT16


@lru_cache(maxsize=4)
def _survivor_tables(n: int):
    """Per-level mask tables for vectorized subsequence extraction."""
    masks = np.arange(1 << n, dtype=np.int64)
    pc = _popcount16()[masks]
    top = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        top[masks >= (1 << bit)] = bit
    rest = masks & ~(np.int64(1) << top)
    levels = [np.nonzero(pc == level)[0] for level in range(n + 1)]
    return levels, rest, top


def _input_survivor_codes(x: int, n: int) -> list[np.ndarray]:
    """codes[m][i] = survivor string (as little-endian int) of the i-th size-m keep set."""
    levels, rest, top = _survivor_tables(n)
    y = np.zeros(1 << n, dtype=np.int64)
    for level in range(1, n + 1):
        masks = levels[level]
        y[masks] = y[rest[masks]] | (((x >> top[masks]) & 1) << (level - 1))
    return [y[levels[m]] for m in range(n + 1)]


def _input_deletion_weights(x: int, n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per length m: (unique survivor codes, integer multiplicities) for input x."""
    per_level = _input_survivor_codes(x, n)
    return [np.unique(codes, return_counts=True) for codes in per_level]


@lru_cache(maxsize=2)
def deletion_output_multiplicities(n: int) -> tuple[np.ndarray, ...]:
    """Aggregate integer deletion multiplicities summed over all inputs.

    Entry ``m`` is an array of length 2^m whose ``y``-th element counts the
    (input, deletion-index-set) pairs producing output ``y`` of length m.
    Per-length uniformity of the i.u.d. output law is equivalent to every
    element of entry m equalling 2^(n-m) * C(n, n-m).
    """
    _check_limit(n, MAX_DELETION_LAW_N, "deletion enumeration")
    agg = [np.zeros(1 << m, dtype=np.int64) for m in range(n + 1)]
    for x in range(1 << n):
        for m, (codes, counts) in enumerate(_input_deletion_weights(x, n)):
            np.add.at(agg[m], codes, counts)
    return tuple(agg)


def _bits_le(code: int, m: int) -> tuple[int, ...]:
    return tuple((int(code) >> k) & 1 for k in range(m))


def exact_deletion_law(
    n: int, p_d: float | Fraction, include_conditionals: bool = True
) -> tuple[ExactDistribution, dict[tuple[int, ...], ExactDistribution]]:
    """Exact i.u.d. output law of the deletion channel, plus per-input conditionals.

    Passing ``p_d`` as a :class:`fractions.Fraction` switches to exact
    rational arithmetic (mass sums to exactly 1).
    """
    _check_limit(n, MAX_DELETION_LAW_N, "deletion law enumeration")
    exact = isinstance(p_d, Fraction)
    if not 0 <= p_d <= 1:
        raise ValueError(f"p_d must lie in [0, 1], got {p_d!r}")
    one = Fraction(1) if exact else 1.0
    q = one - p_d

    def length_factor(m: int):
        return p_d ** (n - m) * q**m

    marginal: dict[tuple[int, ...], float | Fraction] = {}
    conditionals: dict[tuple[int, ...], ExactDistribution] = {}
    denom = Fraction(1, 1 << n) if exact else 1.0 / (1 << n)
    for agg_m, agg in enumerate(deletion_output_multiplicities(n)):
        factor = length_factor(agg_m) * denom
        if factor == 0:
            continue
        for code in np.nonzero(agg)[0]:
            marginal[_bits_le(int(code), agg_m)] = int(agg[int(code)]) * factor
    if include_conditionals:
        for x in range(1 << n):
            support: dict[tuple[int, ...], float | Fraction] = {}
            for m, (codes, counts) in enumerate(_input_deletion_weights(x, n)):
                factor = length_factor(m)
                if factor == 0:
                    continue
                for code, count in zip(codes, counts):
                    support[_bits_le(int(code), m)] = int(count) * factor
            conditionals[_bits_le(x, n)] = ExactDistribution(support, exact)
    return ExactDistribution(marginal, exact), conditionals


def _bsc_spread(law_codes: np.ndarray, weights: np.ndarray, m: int, p_e: float) -> np.ndarray:
    """Push a weighted code set through a BSC: dense law over all 2^m outputs."""
    pc = _popcount16()
    ham = pc[np.bitwise_xor.outer(law_codes, np.arange(1 << m, dtype=np.int64))]
    flip_pow = p_e ** np.arange(m + 1) * (1.0 - p_e) ** (m - np.arange(m + 1))
    return weights @ flip_pow[ham]


def exact_deletion_substitution_entropies(n: int, p_d: float, p_e: float) -> EntropyReport:
    """Exact H(Y'), H(Y'|X), and I(X;Y') for the deletion-substitution channel."""
    _check_limit(n, MAX_DELETION_ENTROPY_N, "deletion-substitution enumeration")
    if not 0 <= p_d <= 1 or not 0 <= p_e <= 1:
        raise ValueError("probabilities must lie in [0, 1]")
    marginals = [np.zeros(1 << m) for m in range(n + 1)]
    weight = 1.0 / (1 << n)
    cond_entropy_terms = []
    for x in range(1 << n):
        h_x_terms = []
        for m, (codes, counts) in enumerate(_input_deletion_weights(x, n)):
            pdel = counts * p_d ** (n - m) * (1.0 - p_d) ** m
            if p_e == 0.0:
                law = np.zeros(1 << m)
                law[codes] = pdel
            else:
                law = _bsc_spread(codes, pdel, m, p_e)
            marginals[m] += law * weight
            positive = law[law > 0]
            h_x_terms.append(float(np.sum(positive * np.log2(positive))))
        cond_entropy_terms.append(-math.fsum(h_x_terms))
    conditional = math.fsum(cond_entropy_terms) * weight
    output = -math.fsum(
        float(np.sum(arr[arr > 0] * np.log2(arr[arr > 0]))) for arr in marginals
    )
    mutual = output - conditional
    h_t = block_entropy(n, p_d)
    bound = deletion_substitution_bound(n, p_d, p_e)
    prop_ub = n * (1.0 - p_d) - n * bound.rate
    chain = (
        Comparison.make(
            "output_entropy_identity", output, n * (1.0 - p_d) + h_t, "eq", 1e-9
        ),
        Comparison.make("conditional_entropy_bound", prop_ub, conditional, "ge", 1e-12),
        Comparison.make("capacity_chain", bound.rate, (mutual - h_t) / n, "le", 1e-12),
    )
    return EntropyReport(
        "deletion_substitution", n, output, conditional, mutual, h_t, chain, "float64"
    )


# ---------------------------------------------------------------------------
# insertion-side enumeration
# ---------------------------------------------------------------------------


def _insertion_count_law(bits: Sequence[int]) -> list[np.ndarray]:
    """Integer event counts per output: entry j is an array over all (n+j)-bit codes.

    Every (position-set, replacement-choice) event with j replacements has
    the same probability (p/4)^j (1-p)^(n-j), so integer counts determine the
    conditional law for every p at once.  Codes are big-endian (first symbol
    in the highest bit).
    """
    laws: dict[int, np.ndarray] = {0: np.ones(1, dtype=np.int64)}
    for b in bits:
        new: dict[int, np.ndarray] = {}
        for m, arr in laws.items():
            keep = new.setdefault(m + 1, np.zeros(1 << (m + 1), dtype=np.int64))
            keep.reshape(-1, 2)[:, int(b)] += arr
            repl = new.setdefault(m + 2, np.zeros(1 << (m + 2), dtype=np.int64))
            repl.reshape(-1, 4)[:, :] += arr[:, None]
        laws = new
    n = len(bits)
    return [laws[n + j] for j in range(n + 1)]


@lru_cache(maxsize=2)
def _insertion_tables(n: int) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    """(mean of sum_y c_j(x,y) log2 c_j(x,y) over x, aggregate counts per length)."""
    _check_limit(n, MAX_INSERTION_N, "insertion enumeration")
    log_weight_mean = np.zeros(n + 1)
    aggregate = [np.zeros(1 << (n + j), dtype=np.int64) for j in range(n + 1)]
    for x in range(1 << n):
        bits = _bits_le(x, n)
        for j, arr in enumerate(_insertion_count_law(bits)):
            aggregate[j] += arr
            positive = arr[arr > 1]
            if positive.size:
                log_weight_mean[j] += float(np.sum(positive * np.log2(positive)))
    log_weight_mean /= 1 << n
    return log_weight_mean, tuple(aggregate)


def insertion_output_multiplicities(n: int) -> tuple[np.ndarray, ...]:
    """Aggregate integer insertion event counts summed over all inputs.

    Entry ``j`` is an array over all (n+j)-bit outputs counting the
    (input, event) combinations with exactly j replacements.  Per-length
    uniformity of the i.u.d. output law is equivalent to every element of
    entry j equalling 2^j * C(n, j).
    """
    return _insertion_tables(n)[1]


def _insertion_alpha(n: int, p_i: float) -> np.ndarray:
    """(p/4)^j (1-p)^(n-j) for j = 0..n, with exact endpoint handling."""
    alpha = np.zeros(n + 1)
    if p_i == 0.0:
        alpha[0] = 1.0
    elif p_i == 1.0:
        alpha[n] = 0.25**n
    else:
        j = np.arange(n + 1)
        alpha = (p_i / 4.0) ** j * (1.0 - p_i) ** (n - j)
    return alpha


def exact_insertion_entropies(n: int, p_i: float) -> EntropyReport:
    """Exact H(Y), H(Y|X), and I(X;Y) for the random insertion channel."""
    if not 0 <= p_i <= 1:
        raise ValueError(f"p_i must lie in [0, 1], got {p_i!r}")
    log_weight_mean, aggregate = _insertion_tables(n)
    alpha = _insertion_alpha(n, p_i)
    conditional = (
        n * binary_entropy(p_i)
        + 2.0 * n * p_i
        - math.fsum(alpha[j] * log_weight_mean[j] for j in range(n + 1))
    )
    weight = 1.0 / (1 << n)
    output_terms = []
    for j, agg in enumerate(aggregate):
        if alpha[j] == 0.0:
            continue
        probs = agg[agg > 0] * (alpha[j] * weight)
        output_terms.append(float(np.sum(probs * np.log2(probs))))
    output = -math.fsum(output_terms)
    mutual = output - conditional
    h_t = block_entropy(n, p_i)
    chain = [
        Comparison.make("output_entropy_identity", output, n * (1.0 + p_i) + h_t, "eq", 1e-9)
    ]
    if n >= 2:
        tabulated = random_insertion_bound(n, p_i)
        exact_weight = insertion_bound_from_weight(
            n, p_i, single_insertion_log_weight_exact(n)
        )
        for tag, bound in (("", tabulated), ("_exact_weight", exact_weight)):
            prop_ub = n * (1.0 + p_i) - n * bound.rate
            chain.append(
                Comparison.make(
                    f"conditional_entropy_bound{tag}", prop_ub, conditional, "ge", 1e-12
                )
            )
            chain.append(
                Comparison.make(
                    f"capacity_chain{tag}", bound.rate, (mutual - h_t) / n, "le", 1e-12
                )
            )
    return EntropyReport(
        "random_insertion", n, output, conditional, mutual, h_t, tuple(chain), "float64"
    )


def exact_insertion_conditional_law(
    bits: Sequence[int], p_i: float
) -> dict[tuple[int, ...], float]:
    """Exact law of the insertion-channel output for one fixed input."""
    bits = tuple(int(b) for b in bits)
    n = len(bits)
    _check_limit(n, MAX_INSERTION_N, "insertion enumeration")
    alpha = _insertion_alpha(n, p_i)
    law: dict[tuple[int, ...], float] = {}
    for j, arr in enumerate(_insertion_count_law(bits)):
        if alpha[j] == 0.0:
            continue
        m = n + j
        for code in np.nonzero(arr)[0]:
            key = tuple((int(code) >> (m - 1 - i)) & 1 for i in range(m))
            law[key] = int(arr[int(code)]) * alpha[j]
    return law


def single_insertion_law(
    x: RunLengthSequence, p_i: float
) -> dict[RunLengthSequence, float]:
    """Conditional output law restricted to at most one replacement event.

    Returns the probabilities of y = x (no event) and of every length n+1
    output (one event), aggregated over coinciding outputs.  Total mass is
    (1-p)^n + n p (1-p)^(n-1); the remainder sits on multi-event outputs.
    """
    if not 0 <= p_i <= 1:
        raise ValueError(f"p_i must lie in [0, 1], got {p_i!r}")
    bits = x.bits()
    n = len(bits)
    law: dict[RunLengthSequence, float] = {}
    intact = (1.0 - p_i) ** n
    if intact > 0:
        law[x] = intact
    event = p_i * (1.0 - p_i) ** (n - 1) / 4.0
    if event > 0:
        for pos in range(n):
            for two_bits in ((0, 0), (0, 1), (1, 0), (1, 1)):
                y = bits[:pos] + two_bits + bits[pos + 1 :]
                key = RunLengthSequence.from_bits(y)
                law[key] = law.get(key, 0.0) + event
    return law


def bound_chain_check(method: str, n: int, p_d: float = 0.0, p_e: float = 0.0, p_i: float = 0.0):
    """Verify the bound chain for one channel instance by full enumeration.

    Returns the ordered :class:`Comparison` tuple from the matching exact
    entropy report: the output-entropy identity, the conditional-entropy
    upper bound(s), and the capacity chain (closed-form bound at most the
    enumerated (I - H(T))/n).
    """
    if method in ("deletion", "deletion_substitution"):
        return exact_deletion_substitution_entropies(n, p_d, p_e).bound_chain
    if method == "random_insertion":
        return exact_insertion_entropies(n, p_i).bound_chain
    raise ValueError(f"no enumeration oracle for method {method!r}")


# ---------------------------------------------------------------------------
# high-precision and Monte-Carlo checks
# ---------------------------------------------------------------------------


def exact_block_entropy(n: int, p: float) -> float:
    """Binomial block entropy summed at 220-bit precision; oracle for block_entropy."""
    _check_limit(n, MAX_BLOCK_ENTROPY_N, "high-precision block entropy")
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if p in (0.0, 1.0):
        return 0.0
    with mpmath.workprec(220):
        mp = mpmath.mpf(p)
        mq = 1 - mp
        total = mpmath.mpf(0)
        for j in range(n + 1):
            mass = comb(n, j) * mp**j * mq ** (n - j)
            total -= mass * mpmath.log(mass) / mpmath.log(2)
        return float(total)


@dataclass(frozen=True)
class McCheck:
    """A Monte-Carlo estimate against a closed form, judged in standard errors."""

    estimate: float
    closed_form: float
    std_error: float
    deviation_sigmas: float
    holds: bool


def _mixture_neg_log2_density(y: np.ndarray, sigma: float) -> np.ndarray:
    scale = math.log2(2.0 * sigma * math.sqrt(2.0 * math.pi))
    a = -((y - 1.0) ** 2) / (2.0 * sigma**2)
    b = -((y + 1.0) ** 2) / (2.0 * sigma**2)
    return scale - np.logaddexp(a, b) / LN2


def mc_awgn_entropy_check(
    sigma: float, samples: int = 10_000_000, seed: int = 0, max_sigmas: float = 4.0
) -> McCheck:
    """Monte-Carlo differential entropy of the antipodal AWGN output marginal.

    Estimates -E[log2 f(y)] under the balanced two-Gaussian mixture and
    compares with the closed form log2(2 sigma sqrt(2 pi e)) minus
    :func:`synchan.numerics.awgn_expectation`.
    """
    if samples < 100_000:
        raise ValueError(f"need at least 1e5 samples, got {samples}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    gen = RngState(seed).generator
    total = 0.0
    total_sq = 0.0
    remaining = samples
    while remaining:
        chunk = min(remaining, 1_000_000)
        signs = 1.0 - 2.0 * gen.integers(0, 2, size=chunk)
        y = signs + sigma * gen.standard_normal(chunk)
        values = _mixture_neg_log2_density(y, sigma)
        total += float(values.sum())
        total_sq += float((values * values).sum())
        remaining -= chunk
    estimate = total / samples
    variance = max(total_sq / samples - estimate**2, 0.0)
    std_error = math.sqrt(variance / samples)
    closed = math.log2(2.0 * sigma * math.sqrt(2.0 * math.pi * math.e)) - awgn_expectation(sigma)
    deviation = abs(estimate - closed) / std_error if std_error > 0 else 0.0
    return McCheck(estimate, closed, std_error, deviation, deviation <= max_sigmas)


def _pattern_mixture(x: RunLengthSequence, d: int):
    """Survivor symbol vectors and their conditional weights for d deletions."""
    total = comb(x.length, d)
    vectors = []
    weights = []
    for pattern in enumerate_deletion_patterns(x.run_lengths, d):
        weight = math.prod(
            comb(nk, dk) for nk, dk in zip(x.run_lengths, pattern.per_run_deletions)
        )
        survivors = []
        bit = x.first_bit
        for nk, dk in zip(x.run_lengths, pattern.per_run_deletions):
            survivors.extend([1.0 - 2.0 * bit] * (nk - dk))
            bit ^= 1
        vectors.append(tuple(survivors))
        weights.append(weight / total)
    return vectors, weights


def deletion_awgn_pattern_entropy_bound(x: RunLengthSequence, d: int, sigma: float) -> float:
    """Closed-form upper bound on the d-deletion AWGN output entropy given x.

    (n-d) log2(sigma sqrt(2 pi e)) + log2 C(n,d) minus the mean log2 pattern
    multiplicity, treating distinct deletion patterns as distinct outputs.
    """
    n = x.length
    if not 0 <= d <= n:
        raise ValueError(f"d must lie in [0, {n}], got {d}")
    _, weights = _pattern_mixture(x, d)
    total = comb(n, d)
    pattern_term = math.fsum(w * math.log2(w * total) for w in weights if w > 0)
    return (
        (n - d) * math.log2(sigma * math.sqrt(2.0 * math.pi * math.e))
        + math.log2(total)
        - pattern_term
    )


def mc_deletion_awgn_pattern_entropy(
    x: RunLengthSequence, d: int, sigma: float, samples: int = 200_000, seed: int = 0
) -> tuple[float, float]:
    """Monte-Carlo estimate (value, std error) of the d-deletion AWGN output entropy.

    Samples from the true pattern mixture and averages -log2 of its density,
    so the estimate converges to the exact differential entropy that
    :func:`deletion_awgn_pattern_entropy_bound` upper-bounds.
    """
    n = x.length
    if not 0 <= d < n:
        raise ValueError(f"d must lie in [0, {n}), got {d}")
    vectors, weights = _pattern_mixture(x, d)
    centers = np.array(vectors)
    probs = np.array(weights)
    gen = RngState(seed).generator
    dim = n - d
    choice = gen.choice(len(probs), size=samples, p=probs)
    y = centers[choice] + sigma * gen.standard_normal((samples, dim))
    # log density of the pattern mixture, stabilized over patterns
    sq = ((y[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    log_terms = np.log(probs)[None, :] - sq / (2.0 * sigma**2)
    peak = log_terms.max(axis=1)
    log_density = (
        peak
        + np.log(np.exp(log_terms - peak[:, None]).sum(axis=1))
        - dim * math.log(sigma * math.sqrt(2.0 * math.pi))
    )
    values = -log_density / LN2
    estimate = float(values.mean())
    std_error = float(values.std(ddof=1) / math.sqrt(samples))
    return estimate, std_error
