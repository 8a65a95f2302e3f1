"""randstruct: samplers for random walks, trees, graphs and permutations,
verified against exact combinatorial oracles by a statistical test harness."""

__version__ = "0.1.0"

from .rng import RngStream, make_stream  # noqa: F401
