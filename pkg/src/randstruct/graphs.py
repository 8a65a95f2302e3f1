"""Erdos-Renyi samplers, component statistics, the minimal-label exploration
walk, threshold experiments, cliques, triangles, spectral moments, and the
stacked / size-randomized exploration walks."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import InvalidParameterError, ResourceLimitError
from .exact import fluid_curve
from .rng import RngStream, make_stream
from .stats import mean_ci
from .walks import LatticePath

_SPARSE_P = 0.1
_SPECTRAL_N_CAP = 4096


class Graph:
    """Simple labeled graph on {1..n} held in CSR form with sorted neighbors.

    Vertices are 0-based internally; dump format and error messages are 1-based.
    """

    __slots__ = ("n", "m", "indptr", "indices")

    def __init__(self, n: int, edges: np.ndarray):
        if n < 0:
            raise InvalidParameterError("n must be >= 0")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise InvalidParameterError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise InvalidParameterError("loops are not allowed")
        self.n = n
        self.m = int(edges.shape[0])
        both = np.concatenate([edges, edges[:, ::-1]]) if edges.size else edges
        order = np.lexsort((both[:, 1], both[:, 0])) if both.size else []
        sorted_pairs = both[order] if both.size else both.reshape(0, 2)
        if sorted_pairs.size and np.any(
                (np.diff(sorted_pairs[:, 0]) == 0) & (np.diff(sorted_pairs[:, 1]) == 0)):
            raise InvalidParameterError("duplicate edge")
        counts = np.bincount(sorted_pairs[:, 0], minlength=n) if both.size \
            else np.zeros(n, dtype=np.int64)
        self.indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self.indices = sorted_pairs[:, 1].copy() if both.size \
            else np.empty(0, dtype=np.int64)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge_array(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.n), self.degrees())
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def adjacency_csr(self) -> sparse.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.int64)
        return sparse.csr_matrix((data, self.indices, self.indptr),
                                 shape=(self.n, self.n))


def graph_to_lines(g: Graph) -> list[str]:
    """Edge-list dump: header "n m", then one 1-based "u v" line per edge."""
    lines = [f"{g.n} {g.m}"]
    for u, v in g.edge_array():
        lines.append(f"{u + 1} {v + 1}")
    return lines


def graph_from_lines(lines) -> Graph:
    it = iter(lines)
    try:
        n, m = map(int, next(it).split())
        edges = [tuple(int(t) - 1 for t in line.split()) for line in it]
    except (ValueError, StopIteration) as exc:
        raise InvalidParameterError("malformed graph dump") from exc
    if len(edges) != m:
        raise InvalidParameterError("edge count does not match header")
    return Graph(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


# ---------------------------------------------------------------------------
# Sampling


def _pair_from_linear(linear: np.ndarray, n: int) -> np.ndarray:
    """Map linear indices over row-major pairs (i < j) back to pairs."""
    b = 2 * n - 1
    i = ((b - np.sqrt(b * b - 8.0 * linear)) // 2).astype(np.int64)
    # float sqrt can be off by one row; fix against exact row offsets
    off = i * (2 * n - 1 - i) // 2
    too_big = off > linear
    i[too_big] -= 1
    off = i * (2 * n - 1 - i) // 2
    too_small = linear - off >= n - 1 - i
    i[too_small] += 1
    off = i * (2 * n - 1 - i) // 2
    j = linear - off + i + 1
    return np.column_stack([i, j])


def _sample_gnp_sparse(n: int, p: float, rng: RngStream) -> Graph:
    """Geometric gap skipping over the linearized pair order."""
    total = n * (n - 1) // 2
    gaps = []
    pos = -1
    expect = int(total * p + 6 * math.sqrt(total * p + 1) + 16)
    while pos < total:
        block = rng.gen.geometric(p, size=expect)
        gaps.append(block)
        pos += int(block.sum())
        expect = max(16, expect // 2)
    linear = np.cumsum(np.concatenate(gaps)) - 1
    linear = linear[linear < total]
    return Graph(n, _pair_from_linear(linear, n))


def _sample_gnp_dense(n: int, p: float, rng: RngStream) -> Graph:
    """One Bernoulli draw per vertex pair."""
    edges = []
    for i in range(n - 1):
        hits = np.flatnonzero(rng.gen.random(n - 1 - i) < p) + i + 1
        if hits.size:
            edges.append(np.column_stack([np.full(hits.size, i), hits]))
    stacked = np.concatenate(edges) if edges else np.empty((0, 2), dtype=np.int64)
    return Graph(n, stacked)


def sample_gnp(n: int, p: float, rng: RngStream) -> Graph:
    """Graph where each of the n(n-1)/2 edges is present independently with
    probability p.  Below p = 0.1 edges are generated by geometric gap
    skipping over the linearized pair order (same law, near-linear cost)."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError("p must be in [0, 1]")
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    if p == 0.0 or n < 2:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    if p < _SPARSE_P:
        return _sample_gnp_sparse(n, p, rng)
    return _sample_gnp_dense(n, p, rng)


# ---------------------------------------------------------------------------
# Components


def components(g: Graph) -> np.ndarray:
    """Component sizes, sorted descending (union-find with path halving)."""
    parent = list(range(g.n))
    size = [1] * g.n

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edge_array():
        ru, rv = find(int(u)), find(int(v))
        if ru != rv:
            if size[ru] < size[rv]:
                ru, rv = rv, ru
            parent[rv] = ru
            size[ru] += size[rv]
    sizes = [size[v] for v in range(g.n) if find(v) == v]
    return np.array(sorted(sizes, reverse=True), dtype=np.int64)


def connected(g: Graph) -> bool:
    """Breadth-first reachability of all vertices from vertex 0."""
    if g.n <= 1:
        return True
    if np.any(np.diff(g.indptr) == 0):
        return False
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    frontier = np.array([0])
    reached = 1
    while frontier.size:
        starts = g.indptr[frontier]
        counts = g.indptr[frontier + 1] - starts
        total = int(counts.sum())
        before = np.concatenate([[0], np.cumsum(counts)[:-1]])
        flat = np.repeat(starts - before, counts) + np.arange(total)
        nbrs = g.indices[flat]
        new = np.unique(nbrs[~seen[nbrs]])
        seen[new] = True
        reached += new.size
        frontier = new
    return reached == g.n


def isolated_count(g: Graph) -> int:
    return int(np.sum(np.diff(g.indptr) == 0))


# ---------------------------------------------------------------------------
# Exploration walk


@dataclass(frozen=True)
class ExplorationTrace:
    walk: LatticePath
    component_sizes: np.ndarray  # excursion lengths, in exploration order
    stack_sizes: np.ndarray      # stack size before each step

    def sorted_components(self) -> np.ndarray:
        return np.array(sorted(self.component_sizes, reverse=True), dtype=np.int64)


def explore_luka(g: Graph) -> ExplorationTrace:
    """Reveal the graph one vertex per step, always popping the minimal-label
    stack vertex; the walk increment is (#untouched neighbors found) - 1 and
    each excursion above the running minimum explores one component."""
    n = g.n
    untouched = np.ones(n, dtype=bool)
    in_stack = np.zeros(n, dtype=bool)
    heap: list[int] = []
    increments = np.empty(n, dtype=np.int64)
    stack_sizes = np.empty(n, dtype=np.int64)
    next_fresh = 0
    stack_count = 0
    comp_sizes = []
    comp_len = 0
    for k in range(n):
        if stack_count == 0:
            while next_fresh < n and not untouched[next_fresh]:
                next_fresh += 1
            untouched[next_fresh] = False
            in_stack[next_fresh] = True
            heapq.heappush(heap, next_fresh)
            stack_count = 1
            if comp_len:
                comp_sizes.append(comp_len)
            comp_len = 0
        stack_sizes[k] = stack_count
        x = heapq.heappop(heap)
        while not in_stack[x]:
            x = heapq.heappop(heap)
        in_stack[x] = False
        stack_count -= 1
        comp_len += 1
        nbrs = g.neighbors(x)
        fresh = nbrs[untouched[nbrs]]
        untouched[fresh] = False
        in_stack[fresh] = True
        for y in fresh:
            heapq.heappush(heap, int(y))
        stack_count += fresh.size
        increments[k] = fresh.size - 1
    comp_sizes.append(comp_len)
    return ExplorationTrace(LatticePath(increments),
                            np.array(comp_sizes, dtype=np.int64), stack_sizes)


# ---------------------------------------------------------------------------
# Threshold experiments


@dataclass(frozen=True)
class GiantSummary:
    largest_fraction: float
    largest_half_width: float
    second_fraction: float
    second_half_width: float
    rows: np.ndarray  # columns: largest, second


def giant_rep(n: int, c: float, stream: RngStream) -> tuple[int, int]:
    sizes = components(sample_gnp(n, c / n, stream))
    largest = int(sizes[0]) if sizes.size else 0
    second = int(sizes[1]) if sizes.size > 1 else 0
    return largest, second


def giant_experiment(n: int, c: float, reps: int, seed: int) -> GiantSummary:
    """Mean rescaled sizes of the two largest components of G(n, c/n)."""
    if c <= 0:
        raise InvalidParameterError("c must be > 0")
    rows = np.array([giant_rep(n, c, make_stream(seed, r)) for r in range(reps)],
                    dtype=np.int64)
    largest, lhw = mean_ci(rows[:, 0] / n)
    second, shw = mean_ci(rows[:, 1] / n)
    return GiantSummary(largest, lhw, second, shw, rows)


@dataclass(frozen=True)
class ConnectivitySummary:
    connected_fraction: float
    connected_half_width: float
    no_isolated_fraction: float
    no_isolated_half_width: float
    rows: np.ndarray  # columns: connected, no_isolated


def connectivity_rep(n: int, c: float, stream: RngStream) -> tuple[bool, bool]:
    p = (math.log(n) + c) / n
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError("(log n + c) / n is outside [0, 1]")
    g = sample_gnp(n, p, stream)
    conn = connected(g)
    no_iso = isolated_count(g) == 0
    assert not conn or no_iso, "a connected graph cannot have isolated vertices"
    return conn, no_iso


def connectivity_experiment(n: int, c: float, reps: int, seed: int) -> ConnectivitySummary:
    """Fractions of connected / no-isolated-vertex graphs at p = (log n + c)/n."""
    rows = np.array([connectivity_rep(n, c, make_stream(seed, r))
                     for r in range(reps)], dtype=np.int64)
    conn, chw = mean_ci(rows[:, 0].astype(float))
    iso, ihw = mean_ci(rows[:, 1].astype(float))
    return ConnectivitySummary(conn, chw, iso, ihw, rows)


# ---------------------------------------------------------------------------
# Cliques and independent sets


def clique_greedy(g: Graph) -> int:
    """Scan labels upward, keeping each vertex adjacent to everything kept."""
    kept_sets: list[set] = []
    for v in range(g.n):
        if all(v in s for s in kept_sets):
            kept_sets.append(set(g.neighbors(v).tolist()))
    return len(kept_sets)


def clique_max_exact(g: Graph, n_cap: int = 40) -> int:
    """Exact maximum clique by bitmask branch and bound; bounded size only."""
    if g.n > n_cap:
        raise ResourceLimitError(f"exact clique limited to n <= {n_cap}")
    masks = [0] * g.n
    for v in range(g.n):
        for w in g.neighbors(v):
            masks[v] |= 1 << int(w)
    best = 0

    def expand(size: int, cand: int):
        nonlocal best
        while cand:
            if size + cand.bit_count() <= best:
                return
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            ext = cand & masks[v]
            if size + 1 + ext.bit_count() > best:
                if ext:
                    expand(size + 1, ext)
                elif size + 1 > best:
                    best = size + 1

    if g.n:
        expand(0, (1 << g.n) - 1)
    return best


def independent_greedy(g: Graph) -> tuple[int, np.ndarray]:
    """Greedy independent set: repeatedly take the smallest untouched label and
    drop its neighbors.  Returns (set size, untouched-count trajectory)."""
    untouched = np.ones(g.n, dtype=bool)
    remaining = g.n
    trajectory = [remaining]
    size = 0
    v = 0
    while remaining:
        while not untouched[v]:
            v += 1
        size += 1
        nbrs = g.neighbors(v)
        remaining -= 1 + int(untouched[nbrs].sum())
        untouched[v] = False
        untouched[nbrs] = False
        trajectory.append(remaining)
    return size, np.array(trajectory, dtype=np.int64)


# ---------------------------------------------------------------------------
# Triangles and spectral moments


def triangle_count(g: Graph) -> int:
    """Number of triangles, via the diagonal of the cubed adjacency matrix."""
    if g.m == 0:
        return 0
    a = g.adjacency_csr()
    paths2 = (a @ a).multiply(a)
    return int(paths2.sum()) // 6


@dataclass(frozen=True)
class SpectralMoments:
    k_max: int
    moments: np.ndarray  # moments[k-1] = Tr(A^k) / n


def spectral_moments(g: Graph, k_max: int) -> SpectralMoments:
    """Normalized traces of adjacency powers, exact walk counts.

    Powers are accumulated in float64, which is exact while every entry stays
    below 2^53; a degree-based bound enforces that.
    """
    if not 1 <= k_max <= 12:
        raise InvalidParameterError("k_max must be in 1..12")
    if g.n > _SPECTRAL_N_CAP:
        raise ResourceLimitError(f"spectral moments limited to n <= {_SPECTRAL_N_CAP}")
    n = g.n
    if n == 0:
        raise InvalidParameterError("empty graph")
    max_deg = int(g.degrees().max(initial=0))
    if n * float(max(max_deg, 1)) ** k_max >= 2.0 ** 53:
        raise ResourceLimitError("walk counts would overflow exact float range")
    dense = np.zeros((n, n))
    arr = g.edge_array()
    if arr.size:
        dense[arr[:, 0], arr[:, 1]] = 1.0
        dense[arr[:, 1], arr[:, 0]] = 1.0
    moments = np.empty(k_max)
    power = dense
    moments[0] = 0.0
    for k in range(2, k_max + 1):
        power = power @ dense
        moments[k - 1] = np.trace(power) / n
    return SpectralMoments(k_max, moments)


# ---------------------------------------------------------------------------
# Stacked and size-randomized exploration walks


def stacked_walk(n: int, p: float, rng: RngStream) -> LatticePath:
    """Exploration walk of the graph with an infinite reservoir of outside
    vertices: S_k = F_n(1 - (1-p)^k) - k with F_n the empirical counting
    function of n i.i.d. uniforms.  Returned for k = 1..n+1."""
    if not 0.0 < p < 1.0:
        raise InvalidParameterError("p must be in (0, 1)")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    u = np.sort(rng.gen.random(n))
    ks = np.arange(0, n + 2)
    x = -np.expm1(ks * math.log1p(-p))
    f = np.searchsorted(u, x, side="right")
    s = f - ks
    return LatticePath(np.diff(s))


def poissonized_walk(alpha: float, p: float, rng: RngStream,
                     k_max: int) -> LatticePath:
    """Walk whose increments are independent Poisson(alpha p (1-p)^(k-1)) - 1."""
    if alpha <= 0.0:
        raise InvalidParameterError("alpha must be > 0")
    if not 0.0 < p < 1.0:
        raise InvalidParameterError("p must be in (0, 1)")
    if k_max < 1:
        raise InvalidParameterError("k_max must be >= 1")
    lam = alpha * p * (1.0 - p) ** np.arange(k_max)
    return LatticePath(rng.gen.poisson(lam) - 1)


def fluid_curve_grid(c: float, t: np.ndarray) -> np.ndarray:
    """Vectorized fluid limit over a time grid (single fixed-point solve)."""
    from .exact import giant_fraction
    alpha = 1.0 - giant_fraction(c)
    t_star = 1.0 - alpha
    rising = 1.0 - np.exp(-c * t) - t
    parabola = 0.5 * (c * (1.0 + alpha - t) - 2.0) * (t - 1.0 + alpha)
    return np.where(t <= t_star, rising, parabola)


def fluid_sup_distance(n: int, c: float, stream: RngStream) -> float:
    """sup over t in [0, 1] of |S_(nt)/n - f_c(t)| for the component
    exploration walk of one G(n, c/n) sample; f_c is the piecewise limit with
    the parabolic tail, which the minimal-label exploration follows."""
    trace = explore_luka(sample_gnp(n, c / n, stream))
    s = np.concatenate([[0], trace.walk.prefix_sums()])
    t = np.arange(n + 1) / n
    return float(np.max(np.abs(s / n - fluid_curve_grid(c, t))))


def stacked_sup_distance(n: int, p: float, c: float, stream: RngStream) -> float:
    """sup over t of |S_(nt)/n - (1 - e^(-ct) - t)| for one stacked walk,
    whose limit keeps rising past the giant's excursion (no reflection)."""
    path = stacked_walk(n, p, stream)
    s = np.concatenate([[0], np.cumsum(path.increments)])[: n + 1]
    t = np.arange(n + 1) / n
    return float(np.max(np.abs(s / n - (1.0 - np.exp(-c * t) - t))))
