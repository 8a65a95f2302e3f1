"""Skip-free walks and the combinatorial path transforms built on them:
cyclic shifts and the good-shift count, first-passage identities, ballot
estimates, records, argmax times, and the parking simulator."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidParameterError, ResourceLimitError
from .exact import OffspringLaw
from .rng import RngStream

_ENUMERATION_CAP = 10_000_000


class LatticePath:
    """Integer path stored by its increments; skip-free (all increments >= -1).

    Prefix sums exclude the starting 0 and are computed lazily and cached,
    so cyclic shifts stay O(n) array surgery.
    """

    __slots__ = ("increments", "_prefix")

    def __init__(self, increments):
        inc = np.asarray(increments, dtype=np.int64)
        if inc.ndim != 1:
            raise InvalidParameterError("increments must be one-dimensional")
        if inc.size and inc.min() < -1:
            raise InvalidParameterError("skip-free walks have no jump below -1")
        self.increments = inc
        self._prefix = None

    @property
    def n(self) -> int:
        return int(self.increments.size)

    def prefix_sums(self) -> np.ndarray:
        """S_1, ..., S_n (the walk starts at S_0 = 0, not stored)."""
        if self._prefix is None:
            self._prefix = np.cumsum(self.increments)
        return self._prefix

    @property
    def total(self) -> int:
        return int(self.increments.sum())

    def __eq__(self, other):
        return isinstance(other, LatticePath) and \
            np.array_equal(self.increments, other.increments)

    def __repr__(self):  # pragma: no cover - cosmetic
        return f"LatticePath({self.increments.tolist()})"


@dataclass(frozen=True)
class StepLaw:
    """Step law on {-1, 0, 1, 2, ...}: finite pmf or a named family."""

    kind: str
    params: tuple
    pmf_pairs: tuple = ()

    @classmethod
    def from_pmf(cls, pairs) -> "StepLaw":
        items = sorted((int(k), Fraction(p)) for k, p in dict(pairs).items())
        if any(k < -1 for k, _ in items):
            raise InvalidParameterError("steps below -1 are not allowed")
        if any(p < 0 for _, p in items):
            raise InvalidParameterError("probabilities must be >= 0")
        if abs(float(sum(p for _, p in items)) - 1.0) > 1e-12:
            raise InvalidParameterError("pmf must sum to 1")
        return cls("pmf", (), tuple(items))

    @classmethod
    def pm_one(cls) -> "StepLaw":
        return cls.from_pmf({-1: Fraction(1, 2), 1: Fraction(1, 2)})

    @classmethod
    def poisson_minus_one(cls, alpha: float) -> "StepLaw":
        if alpha < 0:
            raise InvalidParameterError("alpha must be >= 0")
        return cls("poisson_m1", (float(alpha),))

    @classmethod
    def geometric_minus_one(cls, p: float) -> "StepLaw":
        """Step G - 1 where G counts failures before a success: pmf p(1-p)^(k+1)."""
        if not 0.0 < p <= 1.0:
            raise InvalidParameterError("p must be in (0, 1]")
        return cls("geometric_m1", (float(p),))

    @classmethod
    def from_offspring(cls, law: OffspringLaw) -> "StepLaw":
        if law.kind == "pmf":
            return cls.from_pmf({k - 1: p for k, p in law.pmf_pairs})
        if law.kind == "poisson":
            return cls.poisson_minus_one(law.params[0])
        if law.kind == "geometric":
            return cls.geometric_minus_one(law.params[0])
        d, p = law.params
        return cls("binomial_m1", (d, p))

    @property
    def mean(self) -> float:
        if self.kind == "pmf":
            return float(sum(k * p for k, p in self.pmf_pairs))
        if self.kind == "poisson_m1":
            return self.params[0] - 1.0
        if self.kind == "geometric_m1":
            p = self.params[0]
            return (1.0 - p) / p - 1.0
        d, p = self.params
        return d * p - 1.0

    def support(self):
        """(values, exact probabilities); finite-pmf laws only."""
        if self.kind != "pmf":
            raise InvalidParameterError("support enumeration needs a finite pmf")
        return tuple(k for k, _ in self.pmf_pairs), tuple(p for _, p in self.pmf_pairs)

    def sample(self, rng: RngStream, size=None):
        g = rng.gen
        if self.kind == "poisson_m1":
            return g.poisson(self.params[0], size) - 1
        if self.kind == "geometric_m1":
            return g.geometric(self.params[0], size) - 2
        if self.kind == "binomial_m1":
            d, p = self.params
            return g.binomial(d, p, size) - 1
        values = np.array([k for k, _ in self.pmf_pairs])
        probs = np.array([float(p) for _, p in self.pmf_pairs])
        return g.choice(values, size=size, p=probs / probs.sum())


def sample_path(law: StepLaw, n: int, rng: RngStream) -> LatticePath:
    """Walk of n i.i.d. increments of the given step law."""
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    return LatticePath(law.sample(rng, size=n))


def hitting_time(path: LatticePath, k: int = 1):
    """First index with prefix sum -k, or None if the level is never reached."""
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    prefix = path.prefix_sums()
    hits = np.flatnonzero(prefix == -k)
    if hits.size == 0:
        return None
    return int(hits[0]) + 1


def cycle_shift(path: LatticePath, shift: int) -> LatticePath:
    """Cyclic shift moving increment ``shift`` to the front."""
    return LatticePath(np.roll(path.increments, -shift))


def _good_shift_counts(batch: np.ndarray, k: int) -> np.ndarray:
    """For each row (total -k), count cyclic shifts whose first passage to -k
    happens exactly at time n.  Vectorized over rows."""
    m, n = batch.shape
    doubled = np.concatenate([batch, batch], axis=1)
    csum = np.cumsum(doubled, axis=1)
    base = np.concatenate([np.zeros((m, 1), dtype=csum.dtype), csum[:, :-1]], axis=1)
    # windows[r, s, i] = prefix sum after i+1 steps of shift s of row r
    windows = (np.lib.stride_tricks.sliding_window_view(csum, n, axis=1)[:, :n, :]
               - base[:, :n, None])
    early = windows[:, :, :-1].min(axis=2) > -k if n > 1 else np.ones((m, n), bool)
    good = early & (windows[:, :, -1] == -k)
    return good.sum(axis=1)


def good_shift_count(path: LatticePath) -> int:
    """Number of cyclic shifts of a walk with total -k whose hitting time of
    -k is exactly the walk length; always equals k (counting with multiplicity)."""
    total = path.total
    if total >= 0:
        raise InvalidParameterError("walk total must be -k for some k >= 1")
    k = -total
    return int(_good_shift_counts(path.increments[None, :], k)[0])


def kemperman_check(law: StepLaw, n: int, k: int):
    """Evaluate (1/n) P(S_n = -k) and (1/k) P(first passage to -k at n) by
    exhaustive enumeration over the step support; returns the exact pair."""
    if n < 1 or k < 1:
        raise InvalidParameterError("need n >= 1 and k >= 1")
    values, probs = law.support()
    if len(values) ** n > _ENUMERATION_CAP:
        raise ResourceLimitError("enumeration too large")
    p_end = 0
    p_first = 0
    for steps in itertools.product(range(len(values)), repeat=n):
        weight = math.prod(probs[i] for i in steps)
        s = 0
        hit = None
        for t, i in enumerate(steps, start=1):
            s += values[i]
            if hit is None and s == -k:
                hit = t
        if s == -k:
            p_end += weight
        if hit == n:
            p_first += weight
    return p_end / n, p_first / k


def ballot_prob(a: int, b: int) -> Fraction:
    """Chance the winner leads throughout the count of a + b shuffled votes."""
    if not a > b >= 0:
        raise InvalidParameterError("need a > b >= 0")
    return Fraction(a - b, a + b)


def ballot_mc(a: int, b: int, reps: int, rng: RngStream) -> float:
    """Monte Carlo frequency of the always-strictly-ahead event."""
    if not a > b >= 0:
        raise InvalidParameterError("need a > b >= 0")
    votes = np.concatenate([np.ones(a, dtype=np.int64), -np.ones(b, dtype=np.int64)])
    wins = 0
    for _ in range(reps):
        order = rng.gen.permutation(votes)
        if np.cumsum(order).min() > 0:
            wins += 1
    return wins / reps


@dataclass(frozen=True)
class ParkingResult:
    success: bool
    occupancy: np.ndarray
    exited: int


def _park(n: int, arrivals) -> ParkingResult:
    # next_free[s] = largest free spot <= s, found by path-compressed jumps
    next_free = list(range(n + 1))  # spot 0 is the "exit" sentinel

    def find(s: int) -> int:
        root = s
        while next_free[root] != root:
            root = next_free[root]
        while next_free[s] != root:
            next_free[s], s = root, next_free[s]
        return root

    occupancy = np.zeros(n + 1, dtype=bool)
    exited = 0
    for spot in arrivals:
        spot = int(spot)
        if not 1 <= spot <= n:
            raise InvalidParameterError(f"arrival spot {spot} outside 1..{n}")
        free = find(spot)
        if free == 0:
            exited += 1
        else:
            occupancy[free] = True
            next_free[free] = free - 1
    return ParkingResult(exited == 0, occupancy[1:], exited)


def parking_simulate(n: int, m: int | None = None, arrivals=None,
                     rng: RngStream | None = None) -> ParkingResult:
    """Park cars on a line of n spots, each driving left from its arrival spot.

    Pass explicit ``arrivals`` for a deterministic replay, or ``m`` and ``rng``
    for i.i.d. uniform arrival spots.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if arrivals is None:
        if m is None or m < 1 or rng is None:
            raise InvalidParameterError("need arrivals, or m >= 1 with an rng")
        arrivals = rng.gen.integers(1, n + 1, size=m)
    return _park(n, arrivals)


def parking_success_batch(n: int, m: int, reps: int, rng: RngStream) -> np.ndarray:
    """Boolean vector of full-parking outcomes over independent arrival draws."""
    arrivals = rng.gen.integers(1, n + 1, size=(reps, m))
    return np.fromiter((_park(n, row).success for row in arrivals),
                       dtype=bool, count=reps)


def argmax_time(path: LatticePath) -> int:
    """First index (0..n) at which the walk attains its running maximum."""
    full = np.concatenate([[0], path.prefix_sums()])
    return int(np.argmax(full))


def record_stats(path: LatticePath) -> tuple[int, int]:
    """(weak ascending record count, strict descending record count).

    Index 0 counts as a record of both kinds: a record time is an index whose
    value is >= every earlier value (weak ascending) or < every earlier value
    (strict descending).
    """
    full = np.concatenate([[0], path.prefix_sums()])
    if full.size == 1:
        return 1, 1
    run_max = np.maximum.accumulate(full)
    run_min = np.minimum.accumulate(full)
    weak_asc = 1 + int(np.sum(full[1:] >= run_max[:-1]))
    strict_desc = 1 + int(np.sum(full[1:] < run_min[:-1]))
    return weak_asc, strict_desc
