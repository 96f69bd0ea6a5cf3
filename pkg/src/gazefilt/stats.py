"""Autocorrelation statistics and the nonparametric comparison chain.

Per-block ACFs feed a variance-stabilizing Fisher-Z transform, an omnibus
Friedman rank test across filter conditions, and Tukey HSD post-hoc
comparisons on the mean ranks (studentized-range reference, infinite df).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy.integrate import quad
from scipy.stats import chi2 as chi2_dist

_STD_NORMAL = NormalDist()


@dataclass
class AcfResult:
    r: np.ndarray            # lags 0..max_lag, r[0] == 1
    n: int
    significant: np.ndarray  # per-lag large-sample test at alpha
    alpha: float


@dataclass
class FriedmanResult:
    chi2: float
    df: int
    p: float
    mean_ranks: np.ndarray


@dataclass
class TukeyComparison:
    pair: tuple
    difference: float  # mean rank of first minus mean rank of second
    p: float


@dataclass
class LagTest:
    lag: int
    friedman: FriedmanResult
    tukey: list[TukeyComparison]


@dataclass
class AcfStudy:
    conditions: list[str]
    n_blocks: int
    max_lag: int
    alpha: float
    median_acf: dict[str, np.ndarray]         # per condition, lags 0..max_lag
    significant_counts: dict[str, np.ndarray]  # blocks significant per lag
    lag_tests: list[LagTest]                   # lags 1..min(3, max_lag)


def acf(signal, max_lag: int = 5, alpha: float = 0.05) -> AcfResult:
    """Plug-in autocorrelation out to ``max_lag`` with white-noise bounds.

    r[k] = sum((x[t]-m)(x[t+k]-m)) / sum((x[t]-m)^2). A lag is flagged
    significant when |r[k]| exceeds z_{alpha/2}/sqrt(n), the large-sample
    bound for an uncorrelated series.
    """
    x = np.asarray(signal, dtype=float)
    n = x.size
    if n < max_lag + 2:
        raise ValueError(f"need at least {max_lag + 2} samples for {max_lag} lags")
    d = x - x.mean()
    denom = np.dot(d, d)
    if denom <= 0.0:
        raise ValueError("signal has zero variance; ACF is undefined")
    r = np.empty(max_lag + 1)
    r[0] = 1.0
    for k in range(1, max_lag + 1):
        r[k] = np.dot(d[:-k], d[k:]) / denom
    bound = _STD_NORMAL.inv_cdf(1.0 - alpha / 2.0) / math.sqrt(n)
    return AcfResult(r=r, n=n, significant=np.abs(r) > bound, alpha=alpha)


def fisher_z(r):
    """atanh(r): variance-stabilizing transform for correlation coefficients."""
    arr = np.asarray(r, dtype=float)
    if np.any(np.abs(arr) >= 1.0):
        raise ValueError("|r| must be < 1")
    out = np.arctanh(arr)
    return float(out) if np.isscalar(r) or arr.ndim == 0 else out


def _rank_rows(values: np.ndarray) -> tuple[np.ndarray, float]:
    """Average ranks within each row plus the tie term sum((t^3 - t))."""
    n, k = values.shape
    order = np.argsort(values, axis=1, kind="stable")
    ranks = np.empty((n, k))
    np.put_along_axis(ranks, order, np.broadcast_to(np.arange(1.0, k + 1.0), (n, k)).copy(), axis=1)
    sorted_vals = np.take_along_axis(values, order, axis=1)
    tie_term = 0.0
    if np.any(sorted_vals[:, 1:] == sorted_vals[:, :-1]):
        for i in range(n):
            uniq, counts = np.unique(values[i], return_counts=True)
            if len(uniq) == k:
                continue
            tie_term += float(np.sum(counts.astype(float) ** 3 - counts))
            for v, c in zip(uniq, counts):
                if c > 1:
                    mask = values[i] == v
                    ranks[i, mask] = ranks[i, mask].mean()
    return ranks, tie_term


def _as_matrix(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError("values must be a rectangular n x k matrix")
    n, k = arr.shape
    if n < 2 or k < 2:
        raise ValueError("need at least 2 rows and 2 treatments")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    return arr


def friedman_test(values) -> FriedmanResult:
    """Friedman rank test across k related treatments over n blocks.

    Ties receive average ranks and the statistic gets the standard tie
    correction; the p-value is the chi-square upper tail with k-1 df.
    """
    arr = _as_matrix(values)
    n, k = arr.shape
    ranks, tie_term = _rank_rows(arr)
    rank_sums = ranks.sum(axis=0)
    stat = 12.0 / (n * k * (k + 1)) * np.sum(rank_sums ** 2) - 3.0 * n * (k + 1)
    correction = 1.0 - tie_term / (n * k * (k * k - 1.0))
    if correction <= 0.0:
        # every row fully tied: no information, no effect
        return FriedmanResult(chi2=0.0, df=k - 1, p=1.0, mean_ranks=rank_sums / n)
    stat /= correction
    stat = max(stat, 0.0)
    return FriedmanResult(chi2=float(stat), df=k - 1,
                          p=float(chi2_dist.sf(stat, k - 1)),
                          mean_ranks=rank_sums / n)


def studentized_range_sf(q: float, k: int) -> float:
    """Upper tail of the range of k independent standard normals.

    Integrates k * phi(z) * [Phi(z)^(k-1) - (Phi(z) - Phi(z-q))^(k-1)] over
    the real line, an algebraically equivalent but cancellation-free form of
    1 - P(range <= q). Absolute error of the quadrature <= 1e-6.
    """
    if q < 0.0:
        raise ValueError("q must be >= 0")
    if k < 2:
        raise ValueError("k must be >= 2")
    if q == 0.0:
        return 1.0
    cdf = _STD_NORMAL.cdf

    def integrand(z):
        phi = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        upper = cdf(z)
        return phi * (upper ** (k - 1) - (upper - cdf(z - q)) ** (k - 1))

    value, _ = quad(integrand, -np.inf, np.inf, epsabs=1e-9, limit=200)
    return min(1.0, max(0.0, k * value))


def tukey_hsd_on_ranks(values, labels=None) -> list[TukeyComparison]:
    """All-pairs comparison of Friedman mean ranks.

    Differences are on the mean-rank scale (bounded by k-1); the standard
    error is sqrt(k*(k+1)/(12*n)) and p-values come from the studentized
    range with infinite degrees of freedom at q = |difference|*sqrt(2)/SE.
    """
    arr = _as_matrix(values)
    n, k = arr.shape
    if labels is None:
        labels = list(range(k))
    elif len(labels) != k:
        raise ValueError("labels must match the number of treatments")
    ranks, _ = _rank_rows(arr)
    mean_ranks = ranks.mean(axis=0)
    se = math.sqrt(k * (k + 1) / (12.0 * n))
    out = []
    for i in range(k):
        for j in range(i + 1, k):
            diff = float(mean_ranks[i] - mean_ranks[j])
            q = abs(diff) * math.sqrt(2.0) / se
            out.append(TukeyComparison(pair=(labels[i], labels[j]),
                                       difference=diff,
                                       p=studentized_range_sf(q, k)))
    return out


def run_acf_study(blocks_by_condition: dict, max_lag: int = 5,
                  alpha: float = 0.05) -> AcfStudy:
    """Per-block ACFs for every condition, then Friedman + Tukey per lag.

    Conditions must hold the same number of blocks, aligned by index (block i
    of each condition is the same underlying stretch of signal). Fisher-Z
    values of lags 1..3 feed the rank tests; medians and significance counts
    cover all lags.
    """
    conditions = list(blocks_by_condition)
    if len(conditions) < 2:
        raise ValueError("need at least 2 conditions to compare")
    counts = {c: len(blocks_by_condition[c]) for c in conditions}
    if len(set(counts.values())) != 1:
        raise ValueError(f"conditions have mismatched block counts: {counts}")
    n_blocks = counts[conditions[0]]
    if n_blocks < 2:
        raise ValueError("need at least 2 blocks per condition")

    r = np.empty((n_blocks, len(conditions), max_lag + 1))
    sig = np.zeros((len(conditions), max_lag + 1), dtype=int)
    for ci, cond in enumerate(conditions):
        for bi, block in enumerate(blocks_by_condition[cond]):
            res = acf(block, max_lag=max_lag, alpha=alpha)
            r[bi, ci] = res.r
            sig[ci] += res.significant
    median_acf = {c: np.median(r[:, ci, :], axis=0) for ci, c in enumerate(conditions)}
    significant_counts = {c: sig[ci].copy() for ci, c in enumerate(conditions)}

    lag_tests = []
    for lag in range(1, min(3, max_lag) + 1):
        z = fisher_z(r[:, :, lag])
        lag_tests.append(LagTest(lag=lag, friedman=friedman_test(z),
                                 tukey=tukey_hsd_on_ranks(z, labels=conditions)))
    return AcfStudy(conditions=conditions, n_blocks=n_blocks, max_lag=max_lag,
                    alpha=alpha, median_acf=median_acf,
                    significant_counts=significant_counts, lag_tests=lag_tests)
