import math

import numpy as np
import pytest
from scipy import stats as sps

from randstruct import exact, graphs
from randstruct.errors import InvalidParameterError, ResourceLimitError
from randstruct.graphs import Graph
from randstruct.rng import make_stream
from randstruct.stats import (EmpiricalDist, chi_square_gof,
                              chi_square_two_sample)


def test_graph_invariants():
    g = Graph(4, [[0, 1], [1, 2]])
    assert g.m == 2
    assert g.degrees().sum() == 2 * g.m
    assert g.neighbors(1).tolist() == [0, 2]
    with pytest.raises(InvalidParameterError):
        Graph(3, [[0, 0]])
    with pytest.raises(InvalidParameterError):
        Graph(3, [[0, 1], [1, 0]])


def test_graph_dump_roundtrip():
    g = Graph(5, [[0, 1], [2, 4], [1, 3]])
    lines = graphs.graph_to_lines(g)
    assert lines[0] == "5 3"
    back = graphs.graph_from_lines(lines)
    assert np.array_equal(back.edge_array(), g.edge_array())


def test_gnp_extremes():
    rng = make_stream(2, 0)
    assert graphs.sample_gnp(6, 0.0, rng).m == 0
    full = graphs.sample_gnp(6, 1.0, rng)
    assert full.m == 15


def test_gnp_edge_count_mean():
    rng = make_stream(2, 1)
    reps = 3_000
    counts = np.array([graphs.sample_gnp(100, 0.05, rng).m for _ in range(reps)])
    target = 4950 * 0.05
    se = counts.std(ddof=1) / math.sqrt(reps)
    assert abs(counts.mean() - target) < 3 * se


def test_gnp_sparse_and_dense_same_law():
    # both internal paths produce Binomial(n(n-1)/2, p) edge counts
    n, p, reps = 200, 0.05, 4_000
    rng = make_stream(2, 2)
    sparse = np.array([graphs._sample_gnp_sparse(n, p, rng).m for _ in range(reps)])
    rng = make_stream(2, 3)
    dense = np.array([graphs._sample_gnp_dense(n, p, rng).m for _ in range(reps)])
    lo = min(sparse.min(), dense.min())
    hi = max(sparse.max(), dense.max())
    bins = np.arange(lo, hi + 2)
    report = chi_square_two_sample(np.histogram(sparse, bins)[0],
                                   np.histogram(dense, bins)[0], alpha_level=0.01)
    assert report.passed
    total = n * (n - 1) // 2
    emp = EmpiricalDist.from_samples(sparse)
    gof = chi_square_gof(emp, lambda k: sps.binom.pmf(int(k), total, p))
    assert gof.passed


def test_components_examples():
    assert graphs.components(Graph(4, [])).tolist() == [1, 1, 1, 1]
    path_plus_isolated = Graph(4, [[0, 1], [1, 2]])
    assert graphs.components(path_plus_isolated).tolist() == [3, 1]


def test_connected_matches_component_count():
    rng = make_stream(2, 4)
    for _ in range(300):
        n = int(rng.gen.integers(1, 40))
        g = graphs.sample_gnp(n, float(rng.gen.random() * 0.2), rng)
        assert graphs.connected(g) == (graphs.components(g).size == 1)


def test_explore_empty_graph():
    trace = graphs.explore_luka(Graph(3, []))
    assert trace.walk.increments.tolist() == [-1, -1, -1]
    assert trace.component_sizes.tolist() == [1, 1, 1]


def test_explore_triangle():
    trace = graphs.explore_luka(Graph(3, [[0, 1], [0, 2], [1, 2]]))
    assert trace.walk.increments.tolist() == [1, -1, -1]
    assert trace.component_sizes.tolist() == [3]


def test_explore_matches_union_find_components():
    rng = make_stream(2, 5)
    for _ in range(1_000):
        n = int(rng.gen.integers(2, 60))
        g = graphs.sample_gnp(n, min(1.0, float(rng.gen.random() * 3 / n)), rng)
        trace = graphs.explore_luka(g)
        assert np.array_equal(trace.sorted_components(), graphs.components(g))
        prefix = np.concatenate([[0], trace.walk.prefix_sums()])
        assert prefix[-1] == -trace.component_sizes.size
        # stack size identity at every step
        mins = np.minimum.accumulate(prefix)
        assert np.array_equal(trace.stack_sizes, prefix[:-1] - mins[:-1] + 1)


def test_exploration_increment_law():
    # pooled over steps, increments + 1 against their conditional Binomial law
    n, c = 10_000, 2.0
    p = c / n
    g = graphs.sample_gnp(n, p, make_stream(2, 6))
    trace = graphs.explore_luka(g)
    prefix = np.concatenate([[0], trace.walk.prefix_sums()])
    untouched = n - np.arange(n) - trace.stack_sizes
    observed = np.bincount(trace.walk.increments + 1, minlength=16)[:16]
    ks = np.arange(16)
    expected_probs = sps.binom.pmf(ks[None, :], untouched[:, None], p).sum(axis=0)
    expected_probs /= n
    report = chi_square_gof(EmpiricalDist(ks, observed, n),
                            lambda k: float(expected_probs[int(k)]),
                            alpha_level=0.01)
    assert report.passed, (report.statistic, report.threshold)


def test_isolated_counts():
    assert graphs.isolated_count(Graph(5, [])) == 5
    rng = make_stream(2, 7)
    reps = 30_000
    counts = np.array([graphs.isolated_count(graphs.sample_gnp(3, 0.5, rng))
                       for _ in range(reps)])
    se = counts.std(ddof=1) / math.sqrt(reps)
    assert abs(counts.mean() - 0.75) < 3 * se


def test_isolated_mean_at_threshold():
    n = 10_000
    p = math.log(n) / n
    rng = make_stream(2, 8)
    reps = 100
    counts = np.array([graphs.isolated_count(graphs.sample_gnp(n, p, rng))
                       for _ in range(reps)])
    target = n * (1 - p) ** (n - 1)
    se = counts.std(ddof=1) / math.sqrt(reps)
    assert abs(counts.mean() - target) < 3 * se


def test_clique_trivial_cases():
    complete = graphs.sample_gnp(10, 1.0, make_stream(2, 9))
    assert graphs.clique_greedy(complete) == 10
    assert graphs.clique_max_exact(complete) == 10
    assert graphs.clique_greedy(Graph(7, [])) == 1
    assert graphs.clique_max_exact(Graph(7, [])) == 1
    with pytest.raises(ResourceLimitError):
        graphs.clique_max_exact(Graph(50, []))


def test_clique_growth_rate_and_exact_dominates():
    rng = make_stream(2, 10)
    ratios = []
    for _ in range(20):
        g = graphs.sample_gnp(2_000, 0.5, rng)
        ratios.append(graphs.clique_greedy(g) / math.log2(2_000))
        # exact max on an induced prefix subgraph of 40 vertices
        sub_edges = [e for e in g.edge_array() if e[0] < 40 and e[1] < 40]
        sub = Graph(40, np.array(sub_edges))
        assert graphs.clique_max_exact(sub) >= graphs.clique_greedy(sub)
    assert 0.85 <= np.mean(ratios) <= 1.15


def test_independent_greedy_trivial():
    assert graphs.independent_greedy(Graph(5, []))[0] == 5
    complete = graphs.sample_gnp(8, 1.0, make_stream(2, 11))
    assert graphs.independent_greedy(complete)[0] == 1


def test_independent_greedy_fluid_limit():
    n, c = 100_000, 1.0
    g = graphs.sample_gnp(n, c / n, make_stream(2, 12))
    size, trajectory = graphs.independent_greedy(g)
    assert abs(size / n - math.log(2.0)) < 0.01
    t = np.arange(trajectory.size) / n
    limit = np.maximum((1 + c - np.exp(c * t)) * np.exp(-c * t) / c, 0.0)
    assert np.max(np.abs(trajectory / n - limit)) < 0.02


def test_triangle_counts():
    k4 = graphs.sample_gnp(4, 1.0, make_stream(2, 13))
    assert graphs.triangle_count(k4) == 4
    tree = Graph(5, [[0, 1], [1, 2], [2, 3], [3, 4]])
    assert graphs.triangle_count(tree) == 0


def test_spectral_moment_identities():
    rng = make_stream(2, 14)
    g = graphs.sample_gnp(60, 0.1, rng)
    sm = graphs.spectral_moments(g, 6)
    assert sm.moments[0] == 0.0
    assert sm.moments[1] == pytest.approx(2 * g.m / g.n)
    assert np.all(sm.moments[1::2] >= 0)
    with pytest.raises(ResourceLimitError):
        graphs.spectral_moments(graphs.sample_gnp(5000, 0.0, rng), 3)


def test_stacked_walk_monotone_coupling():
    rng = make_stream(2, 15)
    path = graphs.stacked_walk(500, 0.01, rng)
    s = np.concatenate([[0], np.cumsum(path.increments)])
    k = np.arange(s.size)
    assert np.all(np.diff(s + k) >= 0)


def test_stacked_walk_first_increment_binomial():
    n, p, reps = 100, 0.05, 50_000
    rng = make_stream(2, 16)
    first = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        first[r] = graphs.stacked_walk(n, p, rng).increments[0] + 1
    emp = EmpiricalDist.from_samples(first)
    report = chi_square_gof(emp, lambda k: sps.binom.pmf(int(k), n, p),
                            alpha_level=0.01)
    assert report.passed, (report.statistic, report.threshold)


def test_stacked_walk_rising_curve():
    # the reservoir walk follows 1 - e^(-ct) - t with no infimum reflection
    n = 100_000
    sup = graphs.stacked_sup_distance(n, 2.0 / n, 2.0, make_stream(2, 17))
    assert sup < 0.02


def test_exploration_walk_fluid_limit():
    # the component exploration walk follows the piecewise curve
    sup = graphs.fluid_sup_distance(50_000, 2.0, make_stream(2, 20))
    assert sup < 0.02


def test_poissonized_walk_laws():
    alpha, p, k_max, reps = 5.0, 0.1, 200, 100_000
    rng = make_stream(2, 18)
    totals = np.empty(reps, dtype=np.int64)
    firsts = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        inc = graphs.poissonized_walk(alpha, p, rng, k_max).increments
        totals[r] = inc.sum() + k_max
        firsts[r] = inc[0] + 1
    report = chi_square_gof(EmpiricalDist.from_samples(totals),
                            lambda k: sps.poisson.pmf(int(k), alpha),
                            alpha_level=0.01)
    assert report.passed, (report.statistic, report.threshold)
    report = chi_square_gof(EmpiricalDist.from_samples(firsts),
                            lambda k: sps.poisson.pmf(int(k), alpha * p),
                            alpha_level=0.01)
    assert report.passed, (report.statistic, report.threshold)


def test_poissonized_walk_critical_window_scaling():
    # order-of-magnitude band for the rescaled running maximum near p = 1/n
    n = 10_000
    reps = 1_000
    k_max = int(5 * n ** (2 / 3))
    rng = make_stream(2, 19)
    maxima = np.empty(reps)
    for r in range(reps):
        inc = graphs.poissonized_walk(float(n), 1.0 / n, rng, k_max).increments
        maxima[r] = np.max(np.concatenate([[0], np.cumsum(inc)])) / n ** (1 / 3)
    median = float(np.median(maxima))
    assert 0.3 <= median <= 3.0


def test_giant_experiment_smoke():
    summary = graphs.giant_experiment(5_000, 2.0, 10, seed=4)
    assert abs(summary.largest_fraction - exact.giant_fraction(2.0)) < 0.03
    assert summary.second_fraction < 0.02


def test_connectivity_experiment_smoke():
    summary = graphs.connectivity_experiment(2_000, 0.0, 200, seed=4)
    target = exact.connectivity_limit(0.0)
    assert abs(summary.connected_fraction - target) < 5 * math.sqrt(
        target * (1 - target) / 200)
    assert summary.no_isolated_fraction >= summary.connected_fraction
