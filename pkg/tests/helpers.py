"""Brute-force enumeration helpers shared by several test modules.

These are deliberately written in the most direct way possible (string
enumeration, integer counting) so they stay independent of the library code
they check.
"""

import math
from itertools import combinations
from math import comb


def all_bit_strings(n):
    for code in range(1 << n):
        yield tuple((code >> i) & 1 for i in range(n))


def runs_of(bits):
    lengths = []
    current, count = bits[0], 0
    for b in bits:
        if b == current:
            count += 1
        else:
            lengths.append(count)
            current, count = b, 1
    lengths.append(count)
    return lengths


def brute_mean_pattern_log_weight(n, j):
    """i.u.d. average log2 per-run splitting multiplicity, by full enumeration."""
    total = 0.0
    for bits in all_bit_strings(n):
        for nk in runs_of(bits):
            for jk in range(1, min(j, nk) + 1):
                if j - jk > n - nk:
                    continue
                total += comb(nk, jk) * comb(n - nk, j - jk) * math.log2(comb(nk, jk))
    return total / (2**n * comb(n, j))


def brute_single_insertion_log_weight(n):
    """Defining per-sequence average of the single-insertion run-count terms."""
    total = 0.0
    for bits in all_bit_strings(n):
        r = runs_of(bits)
        if len(r) == 1:
            continue
        total += (r[0] + 1) * math.log2(r[0] + 1) + (r[-1] + 1) * math.log2(r[-1] + 1)
        for nk in r[1:-1]:
            total += (nk + 2) * math.log2(nk + 2)
    return total / (2 ** (n + 2) * n) + math.log2(n) / 2 ** (n + 1)


def brute_subsequence_counts(bits):
    """Map each deletion output of ``bits`` to its number of index sets."""
    n = len(bits)
    counts = {}
    for m in range(n + 1):
        for keep in combinations(range(n), m):
            y = tuple(bits[i] for i in keep)
            counts[y] = counts.get(y, 0) + 1
    return counts
