"""Statistical test harness: chi-square, Kolmogorov-Smirnov, confidence intervals.

KS is reserved for continuous laws; discrete data must go through the
chi-square tests (the KS critical values assume a continuous cdf).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special, stats as sps

from .errors import InvalidParameterError, InvalidTestError

MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class TestReport:
    statistic: float
    threshold: float
    df: int | None
    passed: bool
    sample_size: int

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class EmpiricalDist:
    """Counts over an integer (or binned) support."""

    values: np.ndarray
    counts: np.ndarray
    total: int

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalDist":
        values, counts = np.unique(np.asarray(samples), return_counts=True)
        return cls(values, counts, int(counts.sum()))

    @classmethod
    def from_counts(cls, counts_by_value: dict) -> "EmpiricalDist":
        items = sorted(counts_by_value.items())
        values = np.array([v for v, _ in items])
        counts = np.array([c for _, c in items], dtype=np.int64)
        return cls(values, counts, int(counts.sum()))


def _merge_right_tail(observed, expected):
    """Merge cells right-to-left until every merged cell expects >= MIN_EXPECTED."""
    merged: list[tuple[float, float]] = []
    acc_o = acc_e = 0.0
    for o, e in zip(reversed(observed), reversed(expected)):
        acc_o += o
        acc_e += e
        if acc_e >= MIN_EXPECTED:
            merged.append((acc_o, acc_e))
            acc_o = acc_e = 0.0
    if acc_e > 0.0:
        if not merged:
            raise InvalidTestError("support degenerates to a single cell after merging")
        o, e = merged[-1]
        merged[-1] = (o + acc_o, e + acc_e)
    merged.reverse()
    return np.array([o for o, _ in merged]), np.array([e for _, e in merged])


def _pearson_report(obs, exp, alpha_level, total) -> TestReport:
    if len(obs) < 2:
        raise InvalidTestError("chi-square needs at least two cells")
    if np.any(exp < MIN_EXPECTED):
        raise InvalidTestError(
            "expected count below %g in a non-tail cell" % MIN_EXPECTED)
    statistic = float(np.sum((obs - exp) ** 2 / exp))
    df = len(obs) - 1
    threshold = float(sps.chi2.ppf(1.0 - alpha_level, df))
    return TestReport(statistic, threshold, df, statistic <= threshold, total)


def chi_square_gof(emp: EmpiricalDist, pmf, alpha_level: float = 0.01) -> TestReport:
    """Pearson goodness-of-fit of ``emp`` against ``pmf`` over the same support.

    ``pmf`` maps a support value to its probability.  For integer supports the
    cells cover every integer of the observed range (holes count as zero
    observations), remaining pmf mass outside the range joins the end cells,
    and the tail is merged right-to-left until every cell expects at least 5.
    """
    if emp.total <= 0:
        raise InvalidTestError("empty empirical distribution")
    values = emp.values
    if np.issubdtype(values.dtype, np.integer):
        lo, hi = int(values.min()), int(values.max())
        grid = np.arange(lo, hi + 1)
        observed = np.zeros(grid.size, dtype=float)
        observed[values - lo] = emp.counts
    else:
        grid = values
        observed = emp.counts.astype(float)
    probs = np.array([float(pmf(v)) for v in grid])
    if np.any(probs < 0.0):
        raise InvalidParameterError("pmf returned a negative probability")
    expected = emp.total * probs
    residual = emp.total * max(0.0, 1.0 - probs.sum())
    if residual > 1e-9:
        observed = np.append(observed, 0.0)
        expected = np.append(expected, residual)
    obs, exp = _merge_right_tail(observed, expected)
    return _pearson_report(obs, exp, alpha_level, emp.total)


def chi_square_counts(observed, probs, alpha_level: float = 0.01) -> TestReport:
    """Pearson test for categorical counts; sparse cells are pooled into one."""
    observed = np.asarray(observed, dtype=float)
    probs = np.asarray(probs, dtype=float)
    total = observed.sum()
    expected = total * probs
    residual = total * max(0.0, 1.0 - probs.sum())
    big = expected >= MIN_EXPECTED
    obs = list(observed[big])
    exp = list(expected[big])
    pool_o = observed[~big].sum()
    pool_e = expected[~big].sum() + residual
    if pool_e > 0.0:
        obs.append(pool_o)
        exp.append(pool_e)
    if len(exp) >= 2 and exp[-1] < MIN_EXPECTED:
        exp[-2] += exp.pop()
        obs[-2] += obs.pop()
    return _pearson_report(np.array(obs), np.array(exp), alpha_level, int(total))


def chi_square_two_sample(counts_a, counts_b, alpha_level: float = 0.01) -> TestReport:
    """Homogeneity test for two samplers binned over the same categories."""
    a = np.asarray(counts_a, dtype=float)
    b = np.asarray(counts_b, dtype=float)
    if a.shape != b.shape:
        raise InvalidTestError("count vectors must align")
    na, nb = a.sum(), b.sum()
    pooled = (a + b) / (na + nb)
    keep = (na * pooled >= MIN_EXPECTED) & (nb * pooled >= MIN_EXPECTED)
    a = np.append(a[keep], a[~keep].sum())
    b = np.append(b[keep], b[~keep].sum())
    if a[-1] + b[-1] == 0:
        a, b = a[:-1], b[:-1]
    if len(a) < 2:
        raise InvalidTestError("fewer than two usable categories")
    statistic = 0.0
    pooled = (a + b) / (na + nb)
    for obs, n in ((a, na), (b, nb)):
        exp = n * pooled
        statistic += float(np.sum((obs - exp) ** 2 / exp))
    df = len(a) - 1
    threshold = float(sps.chi2.ppf(1.0 - alpha_level, df))
    return TestReport(statistic, threshold, df, statistic <= threshold, int(na + nb))


def ks_test(samples, cdf, alpha_level: float = 0.01) -> TestReport:
    """One-sample KS test against ``cdf`` at the asymptotic critical value."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 50:
        raise InvalidTestError(f"KS needs at least 50 samples, got {n}")
    if np.any(np.diff(x) < 0):
        x = np.sort(x)
    f = np.asarray(cdf(x), dtype=float)
    if np.any(np.diff(f) < -1e-12):
        raise InvalidParameterError("cdf must be nondecreasing")
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - f)), float(np.max(f - (i - 1) / n)))
    threshold = float(special.kolmogi(alpha_level)) / np.sqrt(n)
    return TestReport(d, threshold, None, d <= threshold, n)


def mean_ci(samples, level: float = 0.95) -> tuple[float, float]:
    """Normal-approximation confidence interval: (mean, half-width)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise InvalidTestError("mean_ci needs at least 2 samples")
    if not 0.0 < level < 1.0:
        raise InvalidParameterError("confidence level must be in (0, 1)")
    z = float(sps.norm.ppf(0.5 + level / 2.0))
    return float(x.mean()), z * float(x.std(ddof=1)) / float(np.sqrt(x.size))
