import math

import numpy as np
import pytest

from randstruct import rng as R
from randstruct.errors import InvalidParameterError, InvalidTestError
from randstruct.stats import (EmpiricalDist, chi_square_counts, chi_square_gof,
                              chi_square_two_sample, ks_test, mean_ci)


def test_chi_square_exact_multiples_pass():
    pmf = {0: 0.5, 1: 0.3, 2: 0.2}
    emp = EmpiricalDist.from_counts({k: int(1000 * p) for k, p in pmf.items()})
    report = chi_square_gof(emp, lambda v: pmf[int(v)])
    assert report.passed and report.statistic < 1e-9


def test_chi_square_fair_die_zero_statistic():
    emp = EmpiricalDist.from_counts({i: 1000 for i in range(1, 7)})
    report = chi_square_gof(emp, lambda v: 1 / 6)
    assert report.statistic == 0.0 and report.passed


def test_chi_square_loaded_die_statistic_1500():
    counts = dict(zip(range(1, 7), (2000, 1000, 1000, 1000, 500, 500)))
    emp = EmpiricalDist.from_counts(counts)
    report = chi_square_gof(emp, lambda v: 1 / 6, alpha_level=1e-6)
    assert report.statistic == pytest.approx(1500.0)
    assert not report.passed


def test_chi_square_merges_right_tail():
    # geometric-ish tail cells with tiny expectation must be pooled
    rng = R.make_stream(11, 0)
    x = R.sample(R.poisson(2.0), rng, size=20_000)
    emp = EmpiricalDist.from_samples(x)
    report = chi_square_gof(
        emp, lambda k: math.exp(-2.0 + k * math.log(2.0) - math.lgamma(k + 1)))
    assert report.passed
    assert report.df < emp.values.size  # merging happened


def test_chi_square_single_cell_invalid():
    emp = EmpiricalDist.from_counts({0: 100})
    with pytest.raises(InvalidTestError):
        chi_square_gof(emp, lambda v: 1.0)


def test_chi_square_two_sample_same_law_passes():
    rng = R.make_stream(11, 1)
    a = np.bincount(R.sample(R.binomial(8, 0.4), rng, size=50_000), minlength=9)
    b = np.bincount(R.sample(R.binomial(8, 0.4), rng, size=50_000), minlength=9)
    assert chi_square_two_sample(a, b).passed


def test_chi_square_two_sample_detects_difference():
    rng = R.make_stream(11, 2)
    a = np.bincount(R.sample(R.binomial(8, 0.4), rng, size=50_000), minlength=9)
    b = np.bincount(R.sample(R.binomial(8, 0.5), rng, size=50_000), minlength=9)
    assert not chi_square_two_sample(a, b).passed


def test_chi_square_counts_pools_sparse_cells():
    report = chi_square_counts([800, 150, 40, 7, 2, 1],
                               [0.8, 0.15, 0.04, 0.007, 0.002, 0.001])
    assert report.passed


def test_ks_quantile_samples_pass():
    n = 1000
    samples = -np.log(1.0 - (np.arange(1, n + 1) - 0.5) / n)  # exp(1) quantiles
    report = ks_test(samples, lambda x: 1.0 - np.exp(-x))
    assert report.statistic <= 0.5 / n + 1e-12
    assert report.passed


def test_ks_null_passes():
    rng = R.make_stream(12, 0)
    x = np.sort(R.sample(R.exponential(1.0), rng, size=10_000))
    assert ks_test(x, lambda v: 1.0 - np.exp(-v), alpha_level=0.01).passed


def test_ks_wrong_law_fails():
    rng = R.make_stream(12, 1)
    x = np.sort(R.sample(R.exponential(1.0), rng, size=10_000))
    gumbel_cdf = lambda v: np.exp(-np.exp(-v))  # noqa: E731
    report = ks_test(x, gumbel_cdf, alpha_level=0.01)
    assert not report.passed
    assert report.statistic > abs(0.0 - math.exp(-1.0)) - 0.02


def test_ks_needs_fifty_samples():
    with pytest.raises(InvalidTestError):
        ks_test(np.arange(10.0), lambda x: x)


def test_mean_ci_constant():
    assert mean_ci([3.5] * 10) == (3.5, 0.0)


def test_mean_ci_bernoulli_half_width():
    samples = np.concatenate([np.zeros(500_000), np.ones(500_000)])
    mean, hw = mean_ci(samples, level=0.95)
    assert mean == pytest.approx(0.5)
    assert hw == pytest.approx(1.96 * 0.5 / 1000, rel=1e-3)


def test_mean_ci_coverage():
    covered = 0
    reps = 300
    for i in range(reps):
        x = R.make_stream(13, i).gen.random(2_000)
        mean, hw = mean_ci(x, level=0.95)
        covered += abs(mean - 0.5) <= hw
    # coverage should be near 95%; allow 3 sigma of Binomial(reps, 0.95)
    assert covered / reps >= 0.95 - 3 * math.sqrt(0.95 * 0.05 / reps)


def test_mean_ci_needs_two_samples():
    with pytest.raises(InvalidTestError):
        mean_ci([1.0])


def test_mean_ci_bad_level():
    with pytest.raises(InvalidParameterError):
        mean_ci([1.0, 2.0], level=1.5)
