"""Exact paired Wilcoxon signed-rank test.

The p-value is exact: the null distribution of the positive-rank sum is
computed over all 2^n sign assignments (by integer dynamic programming on
doubled ranks, so tied-rank halves stay exact). No large-sample normal
approximation is ever used. Zero differences are dropped before ranking;
ties among the absolute differences receive average ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

ALT_LESS = "less"
ALT_GREATER = "greater"
ALT_TWO_SIDED = "two_sided"
ALTERNATIVES = (ALT_LESS, ALT_GREATER, ALT_TWO_SIDED)

# Exactness cap; the DP stays cheap well past this, but the test is meant
# for small paired designs.
MAX_PAIRS = 64


class AllDifferencesZeroError(ValueError):
    """Every paired difference is zero; the test is undefined."""


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # rank sum of positive differences (W+)
    p_value: float
    n: int  # pairs remaining after zero differences are dropped


def _doubled_ranks(abs_diffs: Sequence[float]) -> list[int]:
    """Average ranks of |d|, doubled so every rank is an exact integer."""
    order = sorted(range(len(abs_diffs)), key=lambda i: abs_diffs[i])
    doubled = [0] * len(abs_diffs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and abs_diffs[order[j + 1]] == abs_diffs[order[i]]:
            j += 1
        # average of 1-based positions i+1 .. j+1, doubled: (i+1) + (j+1)
        rank2 = (i + 1) + (j + 1)
        for k in range(i, j + 1):
            doubled[order[k]] = rank2
        i = j + 1
    return doubled


def _rank_sum_distribution(doubled_ranks: Iterable[int]) -> list[int]:
    """counts[s] = number of sign assignments with doubled W+ equal to s."""
    counts = [1]
    for rank2 in doubled_ranks:
        previous = counts
        counts = previous + [0] * rank2
        for s in range(len(previous)):
            counts[s + rank2] += previous[s]
    return counts


def wilcoxon_signed_rank(
    pairs: Sequence[tuple[float, float]], alternative: str = ALT_TWO_SIDED
) -> WilcoxonResult:
    """Exact signed-rank test on paired observations ``(a, b)``.

    ``alternative="less"`` tests whether the first elements tend to be
    smaller than the second (negative differences), ``"greater"`` the
    reverse, ``"two_sided"`` either.
    """
    if alternative not in ALTERNATIVES:
        raise ValueError(f"alternative must be one of {ALTERNATIVES}")
    diffs = [float(a) - float(b) for a, b in pairs]
    nonzero = [d for d in diffs if d != 0.0]
    if not nonzero:
        raise AllDifferencesZeroError("all paired differences are zero")
    n = len(nonzero)
    if n > MAX_PAIRS:
        raise ValueError(f"exact test supports at most {MAX_PAIRS} nonzero pairs, got {n}")

    ranks2 = _doubled_ranks([abs(d) for d in nonzero])
    w_plus2 = sum(r for r, d in zip(ranks2, nonzero) if d > 0)
    counts = _rank_sum_distribution(ranks2)
    total = 1 << n

    at_most = sum(counts[: w_plus2 + 1])
    at_least = sum(counts[w_plus2:])
    p_less = at_most / total
    p_greater = at_least / total

    if alternative == ALT_LESS:
        p = p_less
    elif alternative == ALT_GREATER:
        p = p_greater
    else:
        p = min(1.0, 2.0 * min(p_less, p_greater))

    return WilcoxonResult(statistic=w_plus2 / 2.0, p_value=p, n=n)
