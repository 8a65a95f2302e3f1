import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randstruct import exact, permutations as perms
from randstruct.errors import FormatError, InvalidParameterError
from randstruct.permutations import Permutation
from randstruct.rng import make_stream
from randstruct.stats import (EmpiricalDist, chi_square_counts, chi_square_gof,
                              ks_test, mean_ci)


def test_sample_identity_for_n_one():
    assert perms.sample_perm(1, make_stream(3, 0)).images.tolist() == [1]


def test_sample_perm_uniform_n3():
    rng = make_stream(3, 1)
    reps = 600_000
    base = np.tile(np.arange(1, 4), (reps, 1))
    shuffled = rng.gen.permuted(base, axis=1)
    codes = shuffled[:, 0] * 10 + shuffled[:, 1]
    counts = np.unique(codes, return_counts=True)[1]
    assert counts.size == 6
    assert chi_square_counts(counts, [1 / 6] * 6, alpha_level=0.01).passed


def test_fixed_point_mean_is_one():
    rng = make_stream(3, 2)
    reps = 100_000
    base = np.tile(np.arange(1, 5), (reps, 1))
    shuffled = rng.gen.permuted(base, axis=1)
    fixed = (shuffled == np.arange(1, 5)).sum(axis=1).astype(float)
    se = fixed.std(ddof=1) / math.sqrt(reps)
    assert abs(fixed.mean() - 1.0) < 3 * se


def test_cycles_of_known_permutation():
    perm = Permutation(np.array([2, 3, 1, 5, 4, 6]))
    structure = perms.cycles_of(perm)
    assert structure.lengths == (3, 2, 1)  # min-ranked: (1 2 3), (4 5), (6)
    assert structure.counts == (1, 1, 1, 0, 0, 0)
    assert structure.n_cycles == 3


def test_foata_identity_word():
    word = perms.foata(Permutation(np.array([1, 2, 3])))
    assert word.tolist() == [1, 2, 3]
    assert perms._suffix_minima_count(word) == 3


def test_foata_roundtrip_exhaustive_n4():
    for images in itertools.permutations(range(1, 5)):
        perm = Permutation(np.array(images))
        assert perms.foata_inv(perms.foata(perm)).images.tolist() == list(images)


def test_foata_cycles_equal_records_random():
    rng = make_stream(3, 3)
    for _ in range(2_000):
        perm = perms.sample_perm(50, rng)
        word = perms.foata(perm)  # internal assertion ties cycles to records
        assert perms._suffix_minima_count(word) == perms.cycles_of(perm).n_cycles


def test_foata_inv_rejects_non_words():
    with pytest.raises(FormatError):
        perms.foata_inv([1, 1, 2])


@settings(max_examples=50, deadline=None)
@given(st.permutations(list(range(1, 9))))
def test_foata_roundtrip_property(images):
    perm = Permutation(np.array(images))
    assert perms.foata_inv(perms.foata(perm)).images.tolist() == list(images)


def test_feller_single_point():
    assert perms.feller_cycles(1, make_stream(3, 4)).lengths == (1,)


def test_feller_first_cycle_uniform():
    n = 20
    reps = 100_000
    rng = make_stream(3, 5)
    firsts = np.array([perms.feller_cycles(n, rng).lengths[0]
                       for _ in range(reps)])
    emp = EmpiricalDist.from_samples(firsts)
    assert chi_square_gof(emp, lambda k: 1 / n, alpha_level=0.01).passed


def test_feller_joint_law_matches_cauchy():
    n = 6
    reps = 1_000_000
    rng = make_stream(3, 6)
    from randstruct.verify import _feller_type_counts, _partition_keys
    counts_matrix = _feller_type_counts(n, reps, rng)
    keys = _partition_keys(n)
    key_index = {key: i for i, key in enumerate(keys)}
    observed = np.zeros(len(keys), dtype=np.int64)
    idx = np.fromiter((key_index[tuple(row)] for row in counts_matrix),
                      dtype=np.int64, count=reps)
    np.add.at(observed, idx, 1)
    probs = [float(exact.cauchy_cycle_type_pmf(key)) for key in keys]
    report = chi_square_counts(observed, probs, alpha_level=0.01)
    assert report.passed, (report.statistic, report.threshold)


def test_feller_matches_direct_cycle_counts_small():
    n = 5
    reps = 200_000
    rng = make_stream(3, 7)
    feller_cycles_count = np.array([perms.feller_cycles(n, rng).n_cycles
                                    for _ in range(reps)])
    emp = EmpiricalDist.from_samples(feller_cycles_count)
    pmf = exact.cycles_count_pmf(n)
    assert chi_square_gof(emp, lambda k: float(pmf[int(k) - 1]),
                          alpha_level=0.01).passed


def test_number_of_cycles_law_n8():
    n = 8
    reps = 200_000
    rng = make_stream(3, 8)
    successes = rng.gen.random((reps, n)) < 1.0 / np.arange(n, 0, -1)
    cycle_counts = successes.sum(axis=1)
    emp = EmpiricalDist.from_samples(cycle_counts)
    pmf = exact.cycles_count_pmf(n)
    assert chi_square_gof(emp, lambda k: float(pmf[int(k) - 1]),
                          alpha_level=0.01).passed


def test_crp_single_customer():
    sizes, perm = perms.crp_chain(1, make_stream(3, 9))
    assert sizes == [1]
    assert perm.images.tolist() == [1]


def test_crp_table_count_law():
    reps = 400_000
    rng = make_stream(3, 10)
    tables = np.array([len(perms.crp_chain(5, rng)[0]) for _ in range(reps)])
    emp = EmpiricalDist.from_samples(tables)
    pmf = exact.cycles_count_pmf(5)
    assert chi_square_gof(emp, lambda k: float(pmf[int(k) - 1]),
                          alpha_level=0.01).passed


def test_crp_permutation_marginal_uniform():
    reps = 600_000
    rng = make_stream(3, 11)
    codes = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        _, perm = perms.crp_chain(3, rng)
        codes[r] = perm.images[0] * 10 + perm.images[1]
    counts = np.unique(codes, return_counts=True)[1]
    assert counts.size == 6
    assert chi_square_counts(counts, [1 / 6] * 6, alpha_level=0.01).passed


def test_crp_tables_equal_foata_lengths():
    rng = make_stream(3, 12)
    for _ in range(5_000):
        sizes, perm = perms.crp_chain(20, rng)
        assert tuple(sizes) == perms.cycles_of(perm).lengths


def test_stick_breaking_invariants():
    rng = make_stream(3, 13)
    reps = 100_000
    first = np.empty(reps)
    largest = np.empty(reps)
    for r in range(reps):
        stick = perms.stick_breaking(rng, epsilon=1e-9)
        assert abs(stick.lengths.sum() + stick.residual - 1.0) < 1e-12
        first[r] = stick.lengths[0]
        largest[r] = stick.lengths.max()
    se = first.std(ddof=1) / math.sqrt(reps)
    assert abs(first.mean() - 0.5) < 3 * se
    p_half = float(np.mean(largest <= 0.5))
    target = 1.0 - math.log(2.0)
    assert abs(p_half - target) < 3 * math.sqrt(target * (1 - target) / reps)


def test_stick_breaking_epsilon_validation():
    with pytest.raises(InvalidParameterError):
        perms.stick_breaking(make_stream(3, 14), epsilon=2.0)


def test_longest_cycle_statistics():
    n = 10_000
    reps = 20_000
    rng = make_stream(103, 1)
    longest = perms.longest_cycle_stats(n, reps, rng)
    p_half = float(np.mean(longest <= 0.5))
    target = 1.0 - math.log(2.0)
    assert abs(p_half - target) < 3 * math.sqrt(target * (1 - target) / reps)
    p_third = float(np.mean(longest <= 1 / 3))
    rho3 = exact.dickman_rho(3.0)
    assert abs(p_third - rho3) < 3 * math.sqrt(rho3 * (1 - rho3) / reps) + 1e-3
    # Golomb-Dickman constant by quadrature of the rho integral
    from scipy import integrate
    gd, _ = integrate.quad(lambda t: exact.dickman_rho(t) / (t + 1.0) ** 2,
                           0.0, 60.0, limit=300)
    assert gd == pytest.approx(0.62433, abs=1e-4)
    mean, hw = mean_ci(longest, level=0.99)
    assert abs(mean - gd) < max(hw, 3 * longest.std() / math.sqrt(reps))


def test_small_cycle_counts_poisson_limit():
    n = 2_000
    reps = 100_000
    rng = make_stream(3, 16)
    counts = perms.small_cycle_counts(n, 3, reps, rng)
    p_derange = float(np.mean(counts[:, 0] == 0))
    target = math.exp(-1.0)
    assert abs(p_derange - target) < 3 * math.sqrt(target * (1 - target) / reps)
    emp = EmpiricalDist.from_samples(counts[:, 1])
    from scipy import stats as sps
    assert chi_square_gof(emp, lambda k: sps.poisson.pmf(int(k), 0.5),
                          alpha_level=0.01).passed
    corr = np.corrcoef(counts[:, 0], counts[:, 1])[0, 1]
    assert abs(corr) < 3 / math.sqrt(reps) + 0.01


def test_randomized_length_poisson_counts():
    # with a geometric total size, the per-length cycle counts decouple into
    # independent Poisson variables of mean x^i / i
    x = 0.7
    reps = 200_000
    rng = make_stream(3, 17)
    sizes = rng.gen.geometric(1.0 - x, size=reps) - 1
    n1 = np.zeros(reps, dtype=np.int64)
    n2 = np.zeros(reps, dtype=np.int64)
    for r in range(reps):
        n = int(sizes[r])
        if n == 0:
            continue
        structure = perms.feller_cycles(n, rng)
        n1[r] = structure.counts[0]
        n2[r] = structure.counts[1] if n >= 2 else 0
    from scipy import stats as sps
    emp1 = EmpiricalDist.from_samples(n1)
    assert chi_square_gof(emp1, lambda k: sps.poisson.pmf(int(k), x),
                          alpha_level=0.01).passed
    emp2 = EmpiricalDist.from_samples(n2)
    assert chi_square_gof(emp2, lambda k: sps.poisson.pmf(int(k), x * x / 2),
                          alpha_level=0.01).passed


def test_doubling_identity_monte_carlo():
    rng = make_stream(101, 0)
    for n in (5, 20, 100):
        reps = 100_000
        successes = rng.gen.random((reps, n)) < 1.0 / np.arange(n, 0, -1)
        doubled = np.exp2(successes.sum(axis=1).astype(float))
        se = doubled.std(ddof=1) / math.sqrt(reps)
        assert abs(doubled.mean() - (n + 1)) < 3 * se


def test_table_one_fraction_uniform():
    # the first table's share converges to a uniform fraction
    n = 100_000
    reps = 1_000
    rng = make_stream(3, 19)
    rows, gaps = perms._spacing_rows(n, reps, rng)
    firsts = gaps[np.concatenate([[True], np.diff(rows) != 0])]
    blurred = (firsts - rng.gen.random(reps)) / n
    report = ks_test(np.sort(blurred), lambda x: np.clip(x, 0, 1),
                     alpha_level=0.01)
    assert report.passed, (report.statistic, report.threshold)


def test_perm_dump_roundtrip():
    perm = Permutation(np.array([3, 1, 2]))
    assert perms.perm_from_line(perms.perm_to_line(perm)).images.tolist() == [3, 1, 2]
    with pytest.raises(FormatError):
        perms.perm_from_line("1 2 2")
