"""Plane trees and their walk encodings, branching-process samplers (free and
size-conditioned), uniform labeled trees, random mappings, and the
tree-percolation survival experiment.

A plane tree is stored as its breadth-first child-count sequence, which is the
depth-zero form of its encoding walk: encoding is free, decoding is a
validation step.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidParameterError, ResourceLimitError
from .exact import OffspringLaw
from .rng import RngStream
from .walks import LatticePath


class PlaneTree:
    """Rooted ordered tree; ``child_counts[i]`` is the child count of the i-th
    vertex in breadth-first order."""

    __slots__ = ("child_counts",)

    def __init__(self, child_counts):
        counts = np.asarray(child_counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size == 0:
            raise FormatError("child counts must be a non-empty sequence")
        if counts.min() < 0:
            raise FormatError("child counts must be >= 0")
        walk = np.cumsum(counts - 1)
        if walk[-1] != -1 or (counts.size > 1 and walk[:-1].min() < 0):
            raise FormatError("child counts do not describe a tree")
        self.child_counts = counts

    @property
    def n_vertices(self) -> int:
        return int(self.child_counts.size)

    @property
    def n_edges(self) -> int:
        return self.n_vertices - 1

    def depths(self) -> np.ndarray:
        """Depth of each vertex in breadth-first order."""
        counts = self.child_counts
        depths = np.empty(counts.size, dtype=np.int64)
        depths[0] = 0
        nxt = 1
        for u in range(counts.size):
            c = int(counts[u])
            if c:
                depths[nxt:nxt + c] = depths[u] + 1
                nxt += c
        return depths

    def height(self) -> int:
        return int(self.depths().max())

    def children_lists(self) -> list[list[int]]:
        counts = self.child_counts
        out: list[list[int]] = []
        nxt = 1
        for u in range(counts.size):
            c = int(counts[u])
            out.append(list(range(nxt, nxt + c)))
            nxt += c
        return out

    def __eq__(self, other):
        return isinstance(other, PlaneTree) and \
            np.array_equal(self.child_counts, other.child_counts)

    def __hash__(self):
        return hash(self.child_counts.tobytes())

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"PlaneTree({self.child_counts.tolist()})"


@dataclass(frozen=True)
class LabeledTree:
    """Unrooted tree on labels {1..n}, stored by its sorted edge set."""

    n: int
    edges: tuple

    def __post_init__(self):
        if len(self.edges) != self.n - 1:
            raise FormatError("a tree on n labels has n - 1 edges")

    @classmethod
    def from_edges(cls, n: int, edges) -> "LabeledTree":
        canon = tuple(sorted(tuple(sorted(map(int, e))) for e in edges))
        return cls(n, canon)

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def distance(self, a: int, b: int) -> int:
        if a == b:
            return 0
        adj = self.adjacency()
        dist = {a: 0}
        frontier = [a]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        if w == b:
                            return dist[w]
                        nxt.append(w)
            frontier = nxt
        raise FormatError("labels not connected; not a tree")


# ---------------------------------------------------------------------------
# Encodings


def luka_encode(tree: PlaneTree) -> LatticePath:
    """Breadth-first encoding walk: increment = child count - 1."""
    return LatticePath(tree.child_counts - 1)


def luka_decode(path: LatticePath) -> PlaneTree:
    """Inverse of ``luka_encode``; the path must first hit -1 at its end."""
    prefix = path.prefix_sums()
    if path.n == 0 or prefix[-1] != -1 or (path.n > 1 and prefix[:-1].min() < 0):
        raise FormatError("path is not an encoding of a tree")
    return PlaneTree(path.increments + 1)


def contour_encode(tree: PlaneTree) -> LatticePath:
    """Height profile of the clockwise contour; +-1 steps, length 2 * edges."""
    children = tree.children_lists()
    steps: list[int] = []
    # iterative depth-first traversal; each edge contributes one +1 and one -1
    stack = [(0, iter(children[0]))]
    while stack:
        _, it = stack[-1]
        child = next(it, None)
        if child is None:
            stack.pop()
            if stack:
                steps.append(-1)
        else:
            steps.append(1)
            stack.append((child, iter(children[child])))
    return LatticePath(np.array(steps, dtype=np.int64))


def contour_decode(path: LatticePath) -> PlaneTree:
    """Inverse of ``contour_encode`` for nonnegative +-1 paths from 0 to 0."""
    inc = path.increments
    if inc.size % 2 == 1 or (inc.size and not np.all(np.abs(inc) == 1)):
        raise FormatError("contour paths make +-1 steps and have even length")
    prefix = path.prefix_sums()
    if inc.size and (prefix.min() < 0 or prefix[-1] != 0):
        raise FormatError("contour paths stay >= 0 and end at 0")
    children: list[list[int]] = [[]]
    stack = [0]
    for step in inc:
        if step == 1:
            children.append([])
            v = len(children) - 1
            children[stack[-1]].append(v)
            stack.append(v)
        else:
            stack.pop()
    # children lists are in depth-first discovery order; re-index breadth-first
    counts = np.empty(len(children), dtype=np.int64)
    order = [0]
    for i, v in enumerate(order):
        counts[i] = len(children[v])
        order.extend(children[v])
    return PlaneTree(counts)


def plane_tree_to_line(tree: PlaneTree) -> str:
    """One-line dump: breadth-first child counts, space-separated."""
    return " ".join(map(str, tree.child_counts.tolist()))


def plane_tree_from_line(line: str) -> PlaneTree:
    try:
        counts = [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise FormatError(f"bad tree line: {line!r}") from exc
    return PlaneTree(counts)


# ---------------------------------------------------------------------------
# Samplers


def sample_bgw(law: OffspringLaw, rng: RngStream,
               vertex_cap: int = 1_000_000) -> PlaneTree | None:
    """Branching-process tree in breadth-first order; ``None`` when the
    population is still alive at ``vertex_cap`` vertices (survival evidence)."""
    if vertex_cap < 1:
        raise InvalidParameterError("vertex_cap must be >= 1")
    counts: list[int] = []
    alive = 1
    block = 64
    while alive > 0:
        if len(counts) >= vertex_cap:
            return None
        draw = law.sample(rng, size=min(block, vertex_cap - len(counts) + 1))
        for k in draw:
            counts.append(int(k))
            alive += int(k) - 1
            if alive == 0:
                return PlaneTree(counts)
            if len(counts) >= vertex_cap:
                return None
        block = min(4 * block, 1 << 16)
    return PlaneTree(counts)


def bgw_total_sizes(law: OffspringLaw, reps: int, rng: RngStream,
                    cap: int = 4096) -> np.ndarray:
    """Vector of total progenies over independent trees, ``cap`` where larger.

    Sizes are first passage times to -1 of the increment walk, computed in
    vectorized blocks.
    """
    sizes = np.full(reps, cap, dtype=np.int64)
    pending = np.arange(reps)
    length = 256
    offset = np.zeros(reps, dtype=np.int64)  # walk value carried between blocks
    steps_done = np.zeros(reps, dtype=np.int64)
    while pending.size and length <= 4 * cap:
        draws = law.sample(rng, size=(pending.size, length)) - 1
        walk = offset[pending, None] + np.cumsum(draws, axis=1)
        hit = walk <= -1
        has = hit.any(axis=1)
        first = np.argmax(hit, axis=1)
        done = pending[has]
        sizes[done] = steps_done[done] + first[has] + 1
        rest = ~has
        offset[pending[rest]] = walk[rest, -1]
        steps_done[pending[rest]] += length
        pending = pending[rest]
        pending = pending[steps_done[pending] < cap]
        length = min(2 * length, 4 * cap)
    return np.minimum(sizes, cap)


def _conditioned_increments(law: OffspringLaw, n: int, rng: RngStream,
                            max_batches: int) -> np.ndarray:
    """One vector of n offspring-minus-one increments conditioned on sum -1."""
    batch = max(4, min(20_000, 4 * int(np.sqrt(n)) * 8))
    for _ in range(max_batches):
        draws = law.sample(rng, size=(batch, n)) - 1
        good = np.flatnonzero(draws.sum(axis=1) == -1)
        if good.size:
            return draws[good[0]]
    raise ResourceLimitError(
        f"no draw of {n} increments hit total -1 in {max_batches} batches")


def sample_bgw_conditioned(law: OffspringLaw, n_vertices: int, rng: RngStream,
                           max_batches: int = 10_000) -> PlaneTree:
    """Branching-process tree conditioned on its total size, sampled by
    rejection on the increment sum followed by rotation to the unique good
    cyclic shift."""
    if n_vertices < 1:
        raise InvalidParameterError("n_vertices must be >= 1")
    inc = _conditioned_increments(law, n_vertices, rng, max_batches)
    walk = np.cumsum(inc)
    shift = int(np.argmin(walk)) + 1
    rotated = np.concatenate([inc[shift:], inc[:shift]])
    # the rotated path must decode; this asserts the chosen shift is good
    return luka_decode(LatticePath(rotated))


def sample_bgw_conditioned_batch(law: OffspringLaw, n_vertices: int, reps: int,
                                 rng: RngStream,
                                 max_batches: int = 100_000) -> list[PlaneTree]:
    """Independent size-conditioned trees; keeps every accepted rejection row."""
    out: list[PlaneTree] = []
    batch = max(64, min(20_000, 200_000 // max(1, n_vertices)))
    for _ in range(max_batches):
        if len(out) >= reps:
            return out[:reps]
        draws = law.sample(rng, size=(batch, n_vertices)) - 1
        for row in draws[draws.sum(axis=1) == -1]:
            walk = np.cumsum(row)
            shift = int(np.argmin(walk)) + 1
            out.append(luka_decode(LatticePath(
                np.concatenate([row[shift:], row[:shift]]))))
    raise ResourceLimitError("rejection budget exhausted")


def sample_cayley(n: int, rng: RngStream) -> LabeledTree:
    """Uniform labeled tree on {1..n}: a size-conditioned unit-Poisson
    branching tree with uniform labels, plane order forgotten."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if n == 1:
        return LabeledTree(1, ())
    tree = sample_bgw_conditioned(OffspringLaw.poisson(1.0), n, rng)
    labels = rng.gen.permutation(n) + 1
    counts = tree.child_counts
    edges = []
    nxt = 1
    for u in range(n):
        for v in range(nxt, nxt + int(counts[u])):
            edges.append((labels[u], labels[v]))
        nxt += int(counts[u])
    return LabeledTree.from_edges(n, edges)


def tree_stats(tree: PlaneTree) -> tuple[int, Counter, int]:
    """(height, child-count histogram, vertex count)."""
    hist = Counter(tree.child_counts.tolist())
    return tree.height(), hist, tree.n_vertices


def uniform_vertex_height(tree: PlaneTree, rng: RngStream) -> int:
    """Height of a uniformly chosen vertex."""
    depths = tree.depths()
    return int(depths[rng.gen.integers(0, depths.size)])


# ---------------------------------------------------------------------------
# Random mappings


def random_mapping(n: int, rng: RngStream) -> np.ndarray:
    """Uniform function {1..n} -> {1..n}, returned as a 1-based image array."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    return rng.gen.integers(1, n + 1, size=n)


def cyclic_point_count(mapping: np.ndarray) -> int:
    """Number of points lying on a cycle of the functional graph."""
    n = mapping.size
    state = np.zeros(n + 1, dtype=np.int8)  # 0 new, 1 on current path, 2 done
    on_cycle = np.zeros(n + 1, dtype=bool)
    for start in range(1, n + 1):
        if state[start]:
            continue
        path = []
        v = start
        while state[v] == 0:
            state[v] = 1
            path.append(v)
            v = int(mapping[v - 1])
        if state[v] == 1:  # hit the current path: the loop from v is a cycle
            for u in reversed(path):
                on_cycle[u] = True
                if u == v:
                    break
        for u in path:
            state[u] = 2
    return int(on_cycle.sum())


# ---------------------------------------------------------------------------
# Percolation on regular trees


def tree_percolation_survival(d: int, p: float, reps: int, rng: RngStream,
                              cap: int = 100_000) -> float:
    """Frequency of open clusters of the root reaching ``cap`` vertices in the
    rooted tree where every vertex has d - 1 children (degree d away from the
    root).  The open cluster is a branching process with Binomial(d-1, p)
    offspring, simulated generation by generation."""
    if d < 3:
        raise InvalidParameterError("d must be >= 3")
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError("p must be in [0, 1]")
    survived = 0
    for _ in range(reps):
        alive = 1
        total = 1
        while alive and total < cap:
            alive = int(rng.gen.binomial(alive * (d - 1), p))
            total += alive
        if total >= cap:
            survived += 1
    return survived / reps
