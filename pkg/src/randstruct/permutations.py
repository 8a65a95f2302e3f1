"""Uniform permutations and their cycle structure: direct sampling, the
Bernoulli-spacing representation of the cycle lengths, the min-ranked cycle
word and its inverse, the sequential seating chain, stick breaking, and
Monte Carlo helpers for long- and short-cycle laws."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidParameterError
from .rng import RngStream


@dataclass(frozen=True)
class Permutation:
    """One-line notation: images[i] = sigma(i + 1), values in 1..n."""

    images: np.ndarray

    def __post_init__(self):
        imgs = np.asarray(self.images, dtype=np.int64)
        object.__setattr__(self, "images", imgs)

    @property
    def n(self) -> int:
        return int(self.images.size)

    def validate(self) -> "Permutation":
        if self.n == 0 or not np.array_equal(np.sort(self.images),
                                             np.arange(1, self.n + 1)):
            raise FormatError("not a bijection of {1..n}")
        return self


@dataclass(frozen=True)
class CycleStructure:
    """Cycle lengths ranked by the cycles' minimal elements, plus the
    count vector counts[i-1] = number of cycles of length i."""

    lengths: tuple
    counts: tuple

    @classmethod
    def from_lengths(cls, lengths, n: int) -> "CycleStructure":
        counts = np.zeros(n, dtype=np.int64)
        for ell in lengths:
            counts[ell - 1] += 1
        return cls(tuple(int(x) for x in lengths), tuple(int(x) for x in counts))

    @property
    def n_cycles(self) -> int:
        return len(self.lengths)


def sample_perm(n: int, rng: RngStream) -> Permutation:
    """Uniform permutation of {1..n}."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    return Permutation(rng.gen.permutation(n) + 1)


def cycles_of(perm: Permutation) -> CycleStructure:
    """Cycle lengths in min-ranked order, by index chasing with a seen bitmap."""
    images = perm.images
    n = perm.n
    seen = np.zeros(n + 1, dtype=bool)
    lengths = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        length = 0
        v = start
        while not seen[v]:
            seen[v] = True
            length += 1
            v = int(images[v - 1])
        lengths.append(length)
    return CycleStructure.from_lengths(lengths, n)


def feller_cycles(n: int, rng: RngStream) -> CycleStructure:
    """Cycle lengths generated as spacings between successes of independent
    Bernoulli(1/n), 1/(n-1), ..., 1/2, 1 trials; same joint law as the
    min-ranked cycle lengths of a uniform permutation."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    ks = np.arange(n, 0, -1)
    success = rng.gen.random(n) < 1.0 / ks
    points = ks[success]  # descending, last one is always 1
    lengths = np.diff(np.concatenate([[n + 1], points])) * -1
    return CycleStructure.from_lengths(lengths.tolist(), n)


def foata(perm: Permutation) -> np.ndarray:
    """Word reading the cycles ranked by minimal element, minimum last; the
    number of cycles becomes the number of suffix minima of the word."""
    structure = cycles_of(perm)
    images = perm.images
    word = np.empty(perm.n, dtype=np.int64)
    seen = np.zeros(perm.n + 1, dtype=bool)
    pos = 0
    for start in range(1, perm.n + 1):
        if seen[start]:
            continue
        # walk the cycle from the successor of its minimum so the minimum lands last
        block = []
        v = int(images[start - 1])
        while v != start:
            block.append(v)
            v = int(images[v - 1])
        block.append(start)
        for v in block:
            seen[v] = True
            word[pos] = v
            pos += 1
    assert structure.n_cycles == _suffix_minima_count(word)
    return word


def _suffix_minima_count(word: np.ndarray) -> int:
    return int(np.sum(word == np.minimum.accumulate(word[::-1])[::-1]))


def foata_inv(word) -> Permutation:
    """Rebuild the permutation whose min-ranked cycle word is ``word``."""
    word = np.asarray(word, dtype=np.int64)
    n = word.size
    if n == 0 or not np.array_equal(np.sort(word), np.arange(1, n + 1)):
        raise FormatError("word must list each of 1..n once")
    suffix_min = np.minimum.accumulate(word[::-1])[::-1]
    images = np.empty(n, dtype=np.int64)
    block_start = 0
    for i in range(n):
        if word[i] == suffix_min[i]:  # the block's minimal element closes it
            block = word[block_start:i + 1]
            for a, b in zip(block, np.roll(block, -1)):
                images[a - 1] = b
            block_start = i + 1
    return Permutation(images)


def crp_chain(n: int, rng: RngStream) -> tuple[list[int], Permutation]:
    """Sequential seating chain: customer j sits to the right of a uniform
    earlier customer or opens a new table, each with probability 1/j.

    Returns table sizes in creation order and the coupled uniform permutation;
    the table sizes equal the min-ranked cycle lengths of that permutation.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    images = np.arange(1, n + 1, dtype=np.int64)
    table_of = np.empty(n + 1, dtype=np.int64)
    sizes: list[int] = [1]
    table_of[1] = 0
    choices = rng.gen.integers(0, np.arange(2, n + 1)) if n > 1 else []
    for j, r in zip(range(2, n + 1), choices):
        if r == 0:
            sizes.append(1)
            table_of[j] = len(sizes) - 1
        else:
            images[j - 1] = images[r - 1]
            images[r - 1] = j
            sizes[table_of[r]] += 1
            table_of[j] = table_of[r]
    return sizes, Permutation(images)


@dataclass(frozen=True)
class StickBreaking:
    lengths: np.ndarray
    residual: float


def stick_breaking(rng: RngStream, epsilon: float = 1e-9) -> StickBreaking:
    """Split [0, 1] by repeatedly breaking off a uniform fraction of what is
    left, stopping once the residual drops below epsilon."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError("epsilon must be in (0, 1)")
    lengths = []
    residual = 1.0
    while residual >= epsilon:
        u = rng.gen.random()
        lengths.append(residual * (1.0 - u))
        residual *= u
    return StickBreaking(np.array(lengths), residual)


# ---------------------------------------------------------------------------
# Batched cycle statistics (law-level helpers used by experiments and tests)


def _spacing_rows(n: int, reps: int, rng: RngStream):
    """Success positions of the Bernoulli trials for ``reps`` rows at once.

    Returns (row index, gap length) arrays covering every spacing of every row.
    """
    probs = 1.0 / np.arange(n, 0, -1)
    success = rng.gen.random((reps, n)) < probs
    rows, cols = np.nonzero(success)
    first = np.concatenate([[True], np.diff(rows) != 0])
    prev = np.empty(cols.size, dtype=np.int64)
    prev[0] = -1
    prev[1:] = cols[:-1]
    prev[first] = -1
    return rows, cols - prev


def _rep_chunks(n: int, reps: int, budget: int = 20_000_000):
    chunk = max(1, budget // max(n, 1))
    done = 0
    while done < reps:
        size = min(chunk, reps - done)
        yield done, size
        done += size


def longest_cycle_stats(n: int, reps: int, rng: RngStream) -> np.ndarray:
    """Renormalized longest cycle length over ``reps`` uniform permutations,
    sampled through the Bernoulli-spacing representation of the cycle lengths."""
    if n < 10:
        raise InvalidParameterError("n must be >= 10")
    longest = np.empty(reps, dtype=np.int64)
    for done, size in _rep_chunks(n, reps):
        rows, gaps = _spacing_rows(n, size, rng)
        starts = np.flatnonzero(np.concatenate([[True], np.diff(rows) != 0]))
        longest[done:done + size] = np.maximum.reduceat(gaps, starts)
    return longest / n


def small_cycle_counts(n: int, i_max: int, reps: int, rng: RngStream) -> np.ndarray:
    """Matrix of counts of cycles of each length 1..i_max per replicate."""
    if not 1 <= i_max <= 6:
        raise InvalidParameterError("i_max must be in 1..6")
    if n < 100 * i_max:
        raise InvalidParameterError("need n >= 100 * i_max")
    out = np.zeros((reps, i_max), dtype=np.int64)
    for done, size in _rep_chunks(n, reps):
        rows, gaps = _spacing_rows(n, size, rng)
        small = gaps <= i_max
        np.add.at(out, (rows[small] + done, gaps[small] - 1), 1)
    return out


def cycle_type_batch(images_batch: np.ndarray, i_max: int | None = None) -> np.ndarray:
    """Cycle-length count vectors for a batch of one-line permutations.

    Uses fixed-point counts of iterated powers, so the cost is n * n per row
    but fully vectorized across rows; meant for small n.
    """
    reps, n = images_batch.shape
    i_max = n if i_max is None else i_max
    zero_based = images_batch - 1
    fixed = np.empty((n, reps), dtype=np.int64)
    power = zero_based
    idx = np.arange(n)
    rows = np.arange(reps)[:, None]
    fixed[0] = np.sum(power == idx, axis=1)
    for j in range(1, n):
        power = zero_based[rows, power]
        fixed[j] = np.sum(power == idx, axis=1)
    counts = np.zeros((reps, i_max), dtype=np.int64)
    weighted = np.zeros((n + 1, reps), dtype=np.int64)  # weighted[d] = d * N_d
    for j in range(1, n + 1):
        acc = np.zeros(reps, dtype=np.int64)
        for d in range(1, j):
            if j % d == 0:
                acc += weighted[d]
        weighted[j] = fixed[j - 1] - acc
        if j <= i_max:
            counts[:, j - 1] = weighted[j] // j
    return counts


def perm_to_line(perm: Permutation) -> str:
    """One-line dump: space-separated 1-based images."""
    return " ".join(map(str, perm.images.tolist()))


def perm_from_line(line: str) -> Permutation:
    try:
        images = [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise FormatError(f"bad permutation line: {line!r}") from exc
    return Permutation(np.array(images, dtype=np.int64)).validate()
