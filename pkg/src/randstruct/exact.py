"""Exact combinatorial counts and numeric evaluators used as ground truth.

Counts are arbitrary-precision integers, probabilities exact rationals.
Fixed points are found by monotone iteration from 0 refined by bisection,
matching the construction that identifies the smallest fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidParameterError, ResourceLimitError
from .rng import RngStream


@dataclass(frozen=True)
class SolverConfig:
    atol: float = 1e-12
    max_iter: int = 10_000

    def __post_init__(self):
        if self.atol <= 0 or self.max_iter < 1:
            raise InvalidParameterError("bad solver configuration")


DEFAULT_SOLVER = SolverConfig()


# ---------------------------------------------------------------------------
# Offspring laws


@dataclass(frozen=True)
class OffspringLaw:
    """A law on {0, 1, 2, ...}: finite pmf or a named parametric family."""

    kind: str
    params: tuple
    pmf_pairs: tuple = ()

    @classmethod
    def from_pmf(cls, pairs) -> "OffspringLaw":
        items = sorted((int(k), Fraction(p)) for k, p in dict(pairs).items())
        if any(k < 0 or p < 0 for k, p in items):
            raise InvalidParameterError("pmf needs k >= 0 and p >= 0")
        total = sum(p for _, p in items)
        if abs(float(total) - 1.0) > 1e-12:
            raise InvalidParameterError(f"pmf sums to {float(total)}, not 1")
        support = [k for k, p in items if p > 0]
        if support == [1]:
            raise InvalidParameterError("offspring law concentrated on {1}")
        return cls("pmf", (), tuple(items))

    @classmethod
    def poisson(cls, c: float) -> "OffspringLaw":
        if c < 0:
            raise InvalidParameterError("poisson mean must be >= 0")
        return cls("poisson", (float(c),))

    @classmethod
    def geometric(cls, p: float) -> "OffspringLaw":
        """Failures before the first success: pmf p (1-p)^k on {0, 1, ...}."""
        if not 0.0 < p <= 1.0:
            raise InvalidParameterError("geometric parameter must be in (0, 1]")
        return cls("geometric", (float(p),))

    @classmethod
    def binomial(cls, d: int, p: float) -> "OffspringLaw":
        if d < 0 or not 0.0 <= p <= 1.0:
            raise InvalidParameterError("bad binomial parameters")
        return cls("binomial", (int(d), float(p)))

    @property
    def mean(self) -> float:
        if self.kind == "pmf":
            return float(sum(k * p for k, p in self.pmf_pairs))
        if self.kind == "poisson":
            return self.params[0]
        if self.kind == "geometric":
            p = self.params[0]
            return (1.0 - p) / p
        d, p = self.params
        return d * p

    def pgf(self, z: float) -> float:
        """Generating function E[z^X] for z in [0, 1]."""
        if self.kind == "pmf":
            return float(sum(float(p) * z ** k for k, p in self.pmf_pairs))
        if self.kind == "poisson":
            return math.exp(self.params[0] * (z - 1.0))
        if self.kind == "geometric":
            p = self.params[0]
            return p / (1.0 - (1.0 - p) * z)
        d, p = self.params
        return (1.0 - p + p * z) ** d

    def probability(self, k: int) -> float:
        if self.kind == "pmf":
            for kk, p in self.pmf_pairs:
                if kk == k:
                    return float(p)
            return 0.0
        if self.kind == "poisson":
            c = self.params[0]
            if c == 0.0:
                return 1.0 if k == 0 else 0.0
            return math.exp(-c + k * math.log(c) - math.lgamma(k + 1))
        if self.kind == "geometric":
            p = self.params[0]
            return p * (1.0 - p) ** k
        d, p = self.params
        if k > d:
            return 0.0
        return math.comb(d, k) * p ** k * (1.0 - p) ** (d - k)

    def sample(self, rng: RngStream, size=None):
        g = rng.gen
        if self.kind == "poisson":
            return g.poisson(self.params[0], size)
        if self.kind == "geometric":
            return g.geometric(self.params[0], size) - 1
        if self.kind == "binomial":
            return g.binomial(*self.params, size=size)
        values = np.array([k for k, _ in self.pmf_pairs])
        probs = np.array([float(p) for _, p in self.pmf_pairs])
        probs = probs / probs.sum()
        return g.choice(values, size=size, p=probs)


# ---------------------------------------------------------------------------
# Exact counts


def catalan(n: int) -> int:
    """Number of plane trees with n edges."""
    if n < 0:
        raise InvalidParameterError("n must be >= 0")
    return math.comb(2 * n, n) // (n + 1)


def cayley_count(n: int) -> int:
    """Number of labeled unrooted trees on {1..n}: n^(n-2)."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if n <= 2:
        return 1
    return n ** (n - 2)


def cayley_forest_count(k: int, n: int) -> int:
    """Labeled forests on {1..n} of k trees rooted at 1..k: (k/n) n^(n-k)."""
    if not 1 <= k <= n:
        raise InvalidParameterError("need 1 <= k <= n")
    if k == n:
        return 1
    return k * n ** (n - k - 1)


def plane_trees_with_degree_profile(profile) -> int:
    """Plane trees with profile[i] vertices of i children: (n-1)! / prod d_i!."""
    d = {int(i): int(m) for i, m in dict(profile).items() if m != 0}
    if any(i < 0 or m < 0 for i, m in d.items()):
        raise InvalidParameterError("profile entries must be >= 0")
    n = sum(d.values())
    if n == 0 or 1 + sum(i * m for i, m in d.items()) != n:
        return 0
    out = math.factorial(n - 1)
    for m in d.values():
        out //= math.factorial(m)
    return out


def plane_forest_count(f: int, n: int) -> int:
    """Ordered forests of f plane trees with n edges total: f/(2n+f) C(2n+f, n)."""
    if f < 1 or n < 0:
        raise InvalidParameterError("need f >= 1 and n >= 0")
    value = Fraction(f, 2 * n + f) * math.comb(2 * n + f, n)
    assert value.denominator == 1
    return value.numerator


# ---------------------------------------------------------------------------
# Exact and log-space pmfs


def borel_tanner_pmf(alpha: float, n: int) -> float:
    """Total-progeny law of a Poisson(alpha) branching tree: e^(-an) (an)^(n-1) / n!."""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParameterError("alpha must be in [0, 1]")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if alpha == 0.0:
        return 1.0 if n == 1 else 0.0
    log_p = -alpha * n + (n - 1) * math.log(alpha * n) - math.lgamma(n + 1)
    return math.exp(log_p)


def parking_full_prob(n: int, m: int) -> Fraction:
    """Exact probability that m uniform cars all park on a line of n spots."""
    if n < 1 or m < 0:
        raise InvalidParameterError("need n >= 1 and m >= 0")
    if m > n:
        return Fraction(0)
    if m == 0:
        return Fraction(1)
    return Fraction((n + 1 - m) * (n + 1) ** (m - 1), n ** m)


def simple_walk_hitting_pmf(n: int) -> Fraction:
    """P(first passage to -1 of the +-1 walk takes 2n-1 steps)."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    return Fraction(catalan(n - 1), 2 * 4 ** (n - 1))


def plane_height_pmf(n: int, h: int) -> Fraction:
    """Height law of a uniform vertex in a uniform plane tree with n edges."""
    if n < 1 or not 0 <= h <= n:
        raise InvalidParameterError("need n >= 1 and 0 <= h <= n")
    return Fraction((2 * h + 1) * math.comb(2 * n + 1, n - h),
                    (2 * n + 1) * math.comb(2 * n, n))


def cayley_distance_pmf(n: int, k: int) -> Fraction:
    """P(distance between vertex 1 and a uniform vertex is k-1) in a uniform
    labeled tree on n vertices; the first-collision law of the birthday problem."""
    if n < 1 or not 1 <= k <= n:
        raise InvalidParameterError("need 1 <= k <= n")
    num = k
    for j in range(1, k):
        num *= n - j
    return Fraction(num, n ** k)


def cycles_count_pmf(n: int) -> list[Fraction]:
    """Exact law of the number of cycles of a uniform permutation of size n.

    Entry k-1 is P(#cycles = k); computed by expanding prod_{j<n} (z + j) / n!.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    coeffs = [1]  # polynomial in z, lowest degree first
    for j in range(n):
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += c * j
            nxt[i + 1] += c
        coeffs = nxt
    n_fact = math.factorial(n)
    return [Fraction(c, n_fact) for c in coeffs[1:]]


def cauchy_cycle_type_pmf(multiplicities) -> Fraction:
    """P(a uniform permutation has c_i cycles of length i): prod (1/i)^c_i / c_i!."""
    c = list(multiplicities)
    n = len(c)
    if any(x < 0 for x in c):
        raise InvalidParameterError("multiplicities must be >= 0")
    if sum(i * ci for i, ci in enumerate(c, start=1)) != n:
        return Fraction(0)
    out = Fraction(1)
    for i, ci in enumerate(c, start=1):
        if ci:
            out /= Fraction(i ** ci * math.factorial(ci))
    return out


# ---------------------------------------------------------------------------
# Fixed points and special functions


def _bisect(f, lo: float, hi: float, cfg: SolverConfig) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ResourceLimitError("bisection bracket does not change sign")
    for _ in range(cfg.max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < cfg.atol:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def bgw_extinction(law: OffspringLaw, cfg: SolverConfig = DEFAULT_SOLVER) -> float:
    """Extinction probability: smallest fixed point of the offspring pgf in [0, 1].

    The fixed point is the increasing limit of u <- pgf(u) from u = 0 and
    equals 1 exactly when the mean is at most 1.
    """
    if law.mean <= 1.0:
        return 1.0
    u = 0.0
    for _ in range(min(cfg.max_iter, 200)):
        nxt = law.pgf(u)
        if nxt - u < cfg.atol:
            break
        u = nxt
    # refine: pgf(x) - x is positive on [0, alpha), negative on (alpha, 1)
    hi = 1.0
    while law.pgf(hi) - hi >= 0.0 and hi > u:
        hi = u + 0.9 * (hi - u)
    if hi <= u:
        return u
    return _bisect(lambda x: law.pgf(x) - x, u, hi, cfg)


@lru_cache(maxsize=256)
def _poisson_extinction(c: float, cfg: SolverConfig) -> float:
    return bgw_extinction(OffspringLaw.poisson(c), cfg)


def giant_fraction(c: float, cfg: SolverConfig = DEFAULT_SOLVER) -> float:
    """Asymptotic density 1 - alpha(c) of the largest component of G(n, c/n),
    where alpha(c) is the smallest root of alpha = exp(-c (1 - alpha))."""
    if c <= 0.0:
        raise InvalidParameterError("c must be > 0")
    if c <= 1.0:
        return 0.0
    return 1.0 - _poisson_extinction(float(c), cfg)


def fluid_curve(c: float, t: float, cfg: SolverConfig = DEFAULT_SOLVER) -> float:
    """Deterministic limit of the rescaled component-exploration walk at time t."""
    if c <= 0.0:
        raise InvalidParameterError("c must be > 0")
    if not 0.0 <= t <= 1.0:
        raise InvalidParameterError("t must be in [0, 1]")
    alpha = 1.0 - giant_fraction(c, cfg)
    t_star = 1.0 - alpha
    if t <= t_star:
        return 1.0 - math.exp(-c * t) - t
    return 0.5 * (c * (1.0 + alpha - t) - 2.0) * (t - 1.0 + alpha)


_DICKMAN_CACHE: dict[tuple[float, int], np.ndarray] = {}


def _dickman_grid(x_max: int, step: float) -> np.ndarray:
    key = (step, x_max)
    grid = _DICKMAN_CACHE.get(key)
    if grid is not None:
        return grid
    k = round(1.0 / step)
    if abs(k * step - 1.0) > 1e-12:
        raise InvalidParameterError("step must divide 1")
    m = x_max * k
    rho = np.empty(m + 1)
    rho[: k + 1] = 1.0
    integral = 1.0  # integral of rho over [y-1, y] at y = 1
    h = step
    for j in range(k, m):
        # solve the integral form y rho(y) = int_{y-1}^{y} rho by trapezoid steps
        y_next = (j + 1) * h
        rhs = integral + 0.5 * h * rho[j] - 0.5 * h * (rho[j - k] + rho[j + 1 - k])
        rho_next = rhs / (y_next - 0.5 * h)
        rho[j + 1] = rho_next
        integral = integral + 0.5 * h * (rho[j] + rho_next) \
            - 0.5 * h * (rho[j - k] + rho[j + 1 - k])
    _DICKMAN_CACHE[key] = rho
    return rho


def dickman_rho(x: float, step: float = 1e-4) -> float:
    """Dickman's function: rho = 1 on [0, 1] and x rho'(x) = -rho(x - 1)."""
    if x < 0.0:
        raise InvalidParameterError("x must be >= 0")
    if x <= 1.0:
        return 1.0
    grid = _dickman_grid(int(math.ceil(x)), step)
    pos = x / step
    j = min(int(pos), len(grid) - 2)
    frac = pos - j
    return float((1.0 - frac) * grid[j] + frac * grid[j + 1])


def poisson_ld_rate(a: float) -> float:
    """Large-deviation rate of the Poisson law: I(a) = a log a - (a - 1)."""
    if a <= 0.0:
        raise InvalidParameterError("a must be > 0")
    return a * math.log(a) - (a - 1.0)


def poisson_ld_rate_inverse(c: float, cfg: SolverConfig = DEFAULT_SOLVER) -> float:
    """The root x >= 1 of poisson_ld_rate(x) = c."""
    if c < 0.0:
        raise InvalidParameterError("c must be >= 0")
    if c == 0.0:
        return 1.0
    hi = 2.0
    while poisson_ld_rate(hi) < c:
        hi *= 2.0
    return _bisect(lambda x: poisson_ld_rate(x) - c, 1.0, hi, cfg)


def ba_height_constant(cfg: SolverConfig = DEFAULT_SOLVER) -> float:
    """Height constant of the preferential-attachment tree: 1/(2 gamma) with
    gamma the root of gamma e^(1+gamma) = 1."""
    # the defining equation must hold to cfg.atol, so bracket well below it
    tight = SolverConfig(atol=cfg.atol / 64.0, max_iter=cfg.max_iter)
    gamma_root = _bisect(lambda g: g * math.exp(1.0 + g) - 1.0, 1e-9, 1.0, tight)
    return 1.0 / (2.0 * gamma_root)


def connectivity_limit(c: float) -> float:
    """Limit probability that G(n, (log n + c)/n) is connected: exp(-exp(-c))."""
    return math.exp(-math.exp(-c))
