"""Statistical machinery: paired Wilcoxon signed-rank test, Holm step-down
adjustment, locally weighted scatterplot smoothing, and summary statistics.

The Wilcoxon implementation switches between an exact sign-assignment
distribution (small samples, no ties among absolute differences) and a
normal approximation with tie correction and continuity correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import mean, median, pstdev
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateSampleError, InsufficientDataError
from .metrics import GroupSeries

DEFAULT_EXACT_CUTOFF = 20


@dataclass(frozen=True)
class TestResult:
    statistic: float  # sum of ranks of positive differences
    n_effective: int  # pairs remaining after zero differences are dropped
    p_value: float
    method: str  # "exact" | "normal"


def _average_ranks(values: Sequence[float]) -> list[float]:
    """Ranks starting at 1; tied values share the average of their ranks."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _exact_p(w: int, n: int) -> float:
    """Two-sided p for rank sum `w` over all 2^n sign assignments.

    Valid only when ranks are exactly 1..n (no ties), so the positive-rank
    sum is integral.  Tail counts are exact integers.
    """
    m = n * (n + 1) // 2
    counts = [0] * (m + 1)
    counts[0] = 1
    for r in range(1, n + 1):
        for s in range(m, r - 1, -1):
            counts[s] += counts[s - r]
    lower = sum(counts[: w + 1])
    upper = sum(counts[w:])
    total = 1 << n
    p = 2 * min(lower, upper) / total
    return min(1.0, p)


def _normal_p(w: float, n: int, tie_sizes: Sequence[int]) -> float:
    mu = n * (n + 1) / 4
    var = n * (n + 1) * (2 * n + 1) / 24 - sum(t**3 - t for t in tie_sizes) / 48
    if var <= 0:
        return 1.0
    d = w - mu
    if d > 0:
        d -= 0.5
    elif d < 0:
        d += 0.5
    z = d / math.sqrt(var)
    return min(1.0, math.erfc(abs(z) / math.sqrt(2)))


def wilcoxon_signed_rank(
    x: Sequence[float],
    y: Sequence[float],
    exact_cutoff: int = DEFAULT_EXACT_CUTOFF,
) -> TestResult:
    """Two-sided paired Wilcoxon signed-rank test.

    Zero differences are dropped.  The exact distribution is used when the
    effective sample is at most `exact_cutoff` and the absolute differences
    are tie-free; otherwise the normal approximation with tie-corrected
    variance and 0.5 continuity correction.
    """
    if len(x) != len(y):
        raise ValueError(f"paired samples differ in length: {len(x)} vs {len(y)}")
    if not x:
        raise InsufficientDataError("empty paired sample")
    diffs = []
    for a, b in zip(x, y):
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("non-finite value in paired sample")
        d = a - b
        if d != 0.0:
            diffs.append(d)
    n = len(diffs)
    if n == 0:
        raise DegenerateSampleError("all paired differences are zero")

    abs_d = [abs(d) for d in diffs]
    ranks = _average_ranks(abs_d)
    w = sum(r for r, d in zip(ranks, diffs) if d > 0)

    tie_free = len(set(abs_d)) == n
    if tie_free and n <= exact_cutoff:
        return TestResult(w, n, _exact_p(int(round(w)), n), "exact")
    tie_sizes = [abs_d.count(v) for v in set(abs_d)]
    return TestResult(w, n, _normal_p(w, n, tie_sizes), "normal")


def holm_adjust(p_values: Sequence[float]) -> list[float]:
    """Holm step-down adjustment; returns values in the input order."""
    m = len(p_values)
    for p in p_values:
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"p-value out of range: {p}")
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, (m - rank) * p_values[idx])
        adjusted[idx] = min(1.0, running)
    return adjusted


@dataclass(frozen=True)
class PairwiseResult:
    """All-pairs comparison of group series over one period."""

    groups: tuple[str, ...]
    period: tuple[int, int]
    tests: Mapping[tuple[str, str], TestResult | None]
    raw: Mapping[tuple[str, str], float | None]
    adjusted: Mapping[tuple[str, str], float | None]
    summaries: Mapping[str, tuple[float, float, float] | None]  # mean, median, stdev


def pairwise_compare(
    series_list: Sequence[GroupSeries],
    period: tuple[int, int],
    holm: bool = True,
    exact_cutoff: int = DEFAULT_EXACT_CUTOFF,
) -> PairwiseResult:
    """Wilcoxon tests for every unordered group pair on their common years
    within `period`, with optional Holm adjustment over the testable pairs.

    Pairs that cannot be tested (under 2 common years, or all differences
    zero) carry None; they do not enter the adjustment family.
    """
    if len(series_list) < 2:
        raise ValueError("need at least 2 series to compare")
    names = [s.group for s in series_list]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate group names: {names}")
    restricted = {s.group: s.restrict(period).as_dict() for s in series_list}

    tests: dict[tuple[str, str], TestResult | None] = {}
    raw: dict[tuple[str, str], float | None] = {}
    pairs = [
        (names[i], names[j])
        for i in range(len(names))
        for j in range(i + 1, len(names))
    ]
    for a, b in pairs:
        da, db = restricted[a], restricted[b]
        years = sorted(set(da) & set(db))
        if len(years) < 2:
            tests[(a, b)] = None
            raw[(a, b)] = None
            continue
        try:
            res = wilcoxon_signed_rank(
                [da[y] for y in years], [db[y] for y in years], exact_cutoff
            )
        except DegenerateSampleError:
            tests[(a, b)] = None
            raw[(a, b)] = None
            continue
        tests[(a, b)] = res
        raw[(a, b)] = res.p_value

    adjusted: dict[tuple[str, str], float | None] = {p: None for p in pairs}
    if holm:
        testable = [p for p in pairs if raw[p] is not None]
        adj = holm_adjust([raw[p] for p in testable])
        for p, v in zip(testable, adj):
            adjusted[p] = v
    else:
        adjusted = dict(raw)

    summaries: dict[str, tuple[float, float, float] | None] = {}
    for s in series_list:
        vals = list(restricted[s.group].values())
        summaries[s.group] = summary_stats(vals) if vals else None

    return PairwiseResult(tuple(names), period, tests, raw, adjusted, summaries)


def summary_stats(values: Sequence[float]) -> tuple[float, float, float]:
    """Mean, median, and population standard deviation."""
    if not values:
        raise InsufficientDataError("no values to summarise")
    return mean(values), median(values), pstdev(values)


# ---------------------------------------------------------------------------
# locally weighted smoothing

def lowess(
    xs: Sequence[float],
    ys: Sequence[float],
    fraction: float = 2.0 / 3.0,
    robust_iters: int = 3,
) -> list[float]:
    """Robust locally weighted linear smoother; returns fitted values in
    input order.

    Each point is fitted by weighted least squares over its `fraction`
    nearest neighbours with tricube distance weights, then reweighted
    `robust_iters` times with bisquare weights on the residuals.  Windows
    with no x spread fall back to the weighted mean.
    """
    n = len(xs)
    if n != len(ys):
        raise ValueError(f"x and y differ in length: {n} vs {len(ys)}")
    if n < 2:
        raise InsufficientDataError("lowess needs at least 2 points")
    if not (0.0 < fraction <= 1.0):
        raise ValueError(f"fraction must lie in (0, 1]: {fraction}")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("non-finite input to lowess")
    if len(set(x.tolist())) < 2:
        raise InsufficientDataError("lowess needs at least 2 distinct x values")

    r = min(n, max(2, math.ceil(fraction * n)))
    # r-th smallest absolute distance from each point is its bandwidth
    h = np.array([np.sort(np.abs(x - x[i]))[r - 1] for i in range(n)])
    delta = np.ones(n)
    fitted = np.zeros(n)
    for _ in range(robust_iters + 1):
        for i in range(n):
            d = np.abs(x - x[i])
            if h[i] > 0:
                u = np.clip(d / h[i], 0.0, 1.0)
            else:
                u = np.where(d > 0, 1.0, 0.0)
            w = (1.0 - u**3) ** 3 * delta
            sw = w.sum()
            if sw <= 0:
                fitted[i] = y[i]
                continue
            xw = (w * x).sum() / sw
            yw = (w * y).sum() / sw
            sxx = (w * (x - xw) ** 2).sum()
            if sxx <= 1e-12 * (1.0 + xw * xw):
                fitted[i] = yw
            else:
                beta = (w * (x - xw) * y).sum() / sxx
                fitted[i] = yw + beta * (x[i] - xw)
        resid = y - fitted
        s = float(np.median(np.abs(resid)))
        # once residuals are negligible at the scale of the data, further
        # reweighting only chases floating-point noise
        if s <= 1e-12 * max(1.0, float(np.max(np.abs(y)))):
            break
        delta = np.clip(resid / (6.0 * s), -1.0, 1.0)
        delta = (1.0 - delta**2) ** 2
    return fitted.tolist()


def smooth_series(series: GroupSeries, fraction: float = 2.0 / 3.0, robust_iters: int = 3) -> GroupSeries:
    """Lowess-smoothed copy of an annual series (same years)."""
    xs = [float(y) for y in series.years()]
    fitted = lowess(xs, series.values(), fraction, robust_iters)
    pts = tuple((yr, v) for yr, v in zip(series.years(), fitted))
    return GroupSeries(series.group, series.metric, pts)
