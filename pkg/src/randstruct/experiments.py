"""Named, seeded experiments over the library, run replicate-by-replicate so
results are identical for any worker count (replicate i always consumes the
stream with index i)."""

from __future__ import annotations

import concurrent.futures
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, exact, graphs, growth, permutations, trees, walks
from .errors import InvalidParameterError
from .rng import make_stream
from .stats import EmpiricalDist, chi_square_gof, ks_test, mean_ci


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: dict
    master_seed: int = 0
    reps: int = 1
    workers: int = 1
    out: str | None = None
    fmt: str = "csv"
    per_rep: bool = False

    def __post_init__(self):
        if self.reps < 1:
            raise InvalidParameterError("reps must be >= 1")
        if self.workers < 1:
            raise InvalidParameterError("workers must be >= 1")
        if self.fmt not in ("csv", "json"):
            raise InvalidParameterError("format must be csv or json")


@dataclass
class Report:
    experiment: str
    params: dict
    seed: int
    reps: int
    columns: list
    rows: list
    summary: dict
    verdicts: dict
    wall_clock: float = 0.0
    version: str = __version__


@dataclass(frozen=True)
class Experiment:
    name: str
    schema: dict
    columns: tuple
    rep_fn: object          # (params, stream) -> tuple of row values
    summarize: object       # (params, rows ndarray) -> (summary dict, verdicts)
    defaults: dict = field(default_factory=dict)


REGISTRY: dict[str, Experiment] = {}


def _register(experiment: Experiment):
    REGISTRY[experiment.name] = experiment
    return experiment


def list_experiments() -> dict[str, dict]:
    """Experiment names with their parameter schemas."""
    return {name: dict(exp.schema) for name, exp in sorted(REGISTRY.items())}


def _coerce_params(exp: Experiment, raw: dict) -> dict:
    params = dict(exp.defaults)
    for key, value in raw.items():
        if key not in exp.schema:
            raise InvalidParameterError(
                f"unknown parameter {key!r} for {exp.name}; "
                f"expected {sorted(exp.schema)}")
        params[key] = exp.schema[key](value)
    missing = [k for k in exp.schema if k not in params]
    if missing:
        raise InvalidParameterError(f"{exp.name} needs parameters {missing}")
    return params


def _run_chunk(args):
    name, params, seed, lo, hi = args
    exp = REGISTRY[name]
    return [exp.rep_fn(params, make_stream(seed, r)) for r in range(lo, hi)]


def run_experiment(cfg: ExperimentConfig) -> Report:
    """Dispatch to the named experiment; merge replicates in index order."""
    if cfg.experiment not in REGISTRY:
        raise InvalidParameterError(
            f"unknown experiment {cfg.experiment!r}; known: {sorted(REGISTRY)}")
    exp = REGISTRY[cfg.experiment]
    params = _coerce_params(exp, cfg.params)
    start = time.perf_counter()
    if cfg.workers == 1 or cfg.reps == 1:
        rows = _run_chunk((exp.name, params, cfg.master_seed, 0, cfg.reps))
    else:
        chunk = max(1, math.ceil(cfg.reps / (4 * cfg.workers)))
        tasks = [(exp.name, params, cfg.master_seed, lo, min(lo + chunk, cfg.reps))
                 for lo in range(0, cfg.reps, chunk)]
        with concurrent.futures.ProcessPoolExecutor(cfg.workers) as pool:
            rows = [row for part in pool.map(_run_chunk, tasks) for row in part]
    matrix = np.array(rows, dtype=float)
    summary, verdicts = exp.summarize(params, matrix)
    report = Report(exp.name, params, cfg.master_seed, cfg.reps,
                    list(exp.columns), rows, summary, verdicts,
                    wall_clock=time.perf_counter() - start)
    if cfg.out:
        write_report(report, cfg)
    return report


def write_report(report: Report, cfg: ExperimentConfig) -> None:
    if cfg.fmt == "json":
        payload = {
            "config": {"experiment": report.experiment, "params": report.params,
                       "seed": report.seed, "reps": report.reps,
                       "version": report.version, "wall_clock": report.wall_clock},
            "rows": [list(map(float, row)) for row in report.rows]
            if cfg.per_rep else [],
            "summary": report.summary,
            "verdicts": report.verdicts,
        }
        with open(cfg.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return
    with open(cfg.out, "w") as fh:
        fh.write("experiment,seed,metric,value\n")
        for key in sorted(report.summary):
            fh.write(f"{report.experiment},{report.seed},{key},{report.summary[key]!r}\n")
        for key in sorted(report.verdicts):
            fh.write(f"{report.experiment},{report.seed},verdict:{key},"
                     f"{int(report.verdicts[key])}\n")
    if cfg.per_rep:
        per_rep_path = _per_rep_path(cfg.out)
        with open(per_rep_path, "w") as fh:
            fh.write("experiment,seed,rep," + ",".join(report.columns) + "\n")
            for r, row in enumerate(report.rows):
                cells = ",".join(repr(float(x)) for x in row)
                fh.write(f"{report.experiment},{report.seed},{r},{cells}\n")


def _per_rep_path(out: str) -> str:
    stem, dot, ext = out.rpartition(".")
    return f"{stem}-reps.{ext}" if dot else f"{out}-reps"


# ---------------------------------------------------------------------------
# Experiment definitions


def _mean_summary(columns):
    def summarize(params, matrix):
        summary = {}
        for j, col in enumerate(columns):
            mean, hw = mean_ci(matrix[:, j]) if matrix.shape[0] > 1 \
                else (float(matrix[0, j]), 0.0)
            summary[f"{col}_mean"] = mean
            summary[f"{col}_hw"] = hw
        return summary, {}
    return summarize


_register(Experiment(
    "giant", {"n": int, "c": float}, ("largest_frac", "second_frac"),
    lambda p, s: tuple(x / p["n"] for x in graphs.giant_rep(p["n"], p["c"], s)),
    _mean_summary(("largest_frac", "second_frac")),
))


def _connectivity_summary(params, matrix):
    summary, _ = _mean_summary(("connected", "no_isolated"))(params, matrix)
    summary["double_exponential_limit"] = exact.connectivity_limit(params["c"])
    lo = summary["connected_mean"] - summary["connected_hw"]
    hi = summary["connected_mean"] + summary["connected_hw"]
    verdicts = {"ci_brackets_limit": lo <= summary["double_exponential_limit"] <= hi}
    return summary, verdicts


_register(Experiment(
    "connectivity", {"n": int, "c": float}, ("connected", "no_isolated"),
    lambda p, s: tuple(map(float, graphs.connectivity_rep(p["n"], p["c"], s))),
    _connectivity_summary,
))

_register(Experiment(
    "fluid-curve", {"n": int, "c": float}, ("sup_distance",),
    lambda p, s: (graphs.fluid_sup_distance(p["n"], p["c"], s),),
    _mean_summary(("sup_distance",)),
))


def _triangle_summary(params, matrix):
    lam = params["c"] ** 3 / 6.0
    summary, _ = _mean_summary(("triangles",))(params, matrix)
    summary["poisson_mean_limit"] = lam
    verdicts = {}
    if matrix.shape[0] >= 100:
        emp = EmpiricalDist.from_samples(matrix[:, 0].astype(np.int64))
        report = chi_square_gof(
            emp, lambda k: math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))
            if lam > 0 else float(k == 0), alpha_level=0.01)
        verdicts["poisson_chi_square"] = report.passed
    return summary, verdicts


_register(Experiment(
    "triangles", {"n": int, "c": float}, ("triangles",),
    lambda p, s: (float(graphs.triangle_count(
        graphs.sample_gnp(p["n"], p["c"] / p["n"], s))),),
    _triangle_summary,
))

_register(Experiment(
    "spectral-moments", {"n": int, "c": float, "k_max": int},
    tuple(f"m{k}" for k in range(1, 13)),
    lambda p, s: tuple(graphs.spectral_moments(
        graphs.sample_gnp(p["n"], p["c"] / p["n"], s), p["k_max"]).moments) +
    (0.0,) * (12 - p["k_max"]),
    _mean_summary(tuple(f"m{k}" for k in range(1, 13))),
    defaults={"k_max": 3},
))


def _bgw_law(params) -> exact.OffspringLaw:
    family = params["law"]
    if family == "geometric":
        return exact.OffspringLaw.geometric(params["param"])
    if family == "poisson":
        return exact.OffspringLaw.poisson(params["param"])
    raise InvalidParameterError("law must be geometric or poisson")


_register(Experiment(
    "bgw-size", {"law": str, "param": float, "cap": int}, ("size",),
    lambda p, s: (float(trees.bgw_total_sizes(_bgw_law(p), 1, s, cap=p["cap"])[0]),),
    _mean_summary(("size",)),
    defaults={"cap": 4096},
))


def _parking_summary(params, matrix):
    summary, _ = _mean_summary(("parked",))(params, matrix)
    exact_p = float(exact.parking_full_prob(params["n"], params["m"]))
    summary["exact_probability"] = exact_p
    lo = summary["parked_mean"] - summary["parked_hw"]
    hi = summary["parked_mean"] + summary["parked_hw"]
    return summary, {"ci_brackets_exact": lo <= exact_p <= hi}


_register(Experiment(
    "parking", {"n": int, "m": int}, ("parked",),
    lambda p, s: (float(walks.parking_simulate(p["n"], m=p["m"], rng=s).success),),
    _parking_summary,
))


def _ballot_summary(params, matrix):
    summary, _ = _mean_summary(("always_ahead",))(params, matrix)
    summary["exact_probability"] = float(walks.ballot_prob(params["a"], params["b"]))
    return summary, {}


_register(Experiment(
    "ballot", {"a": int, "b": int}, ("always_ahead",),
    lambda p, s: (walks.ballot_mc(p["a"], p["b"], 1, s),),
    _ballot_summary,
))


def _cycles_summary(params, matrix):
    summary, _ = _mean_summary(("n_cycles",))(params, matrix)
    summary["harmonic_mean"] = float(sum(1.0 / k for k in range(1, params["n"] + 1)))
    return summary, {}


_register(Experiment(
    "cycles", {"n": int}, ("n_cycles",),
    lambda p, s: (float(permutations.feller_cycles(p["n"], s).n_cycles),),
    _cycles_summary,
))


def _pd_summary(params, matrix):
    frac = matrix[:, 0]
    mean, hw = mean_ci((frac <= 0.5).astype(float))
    return ({"p_longest_below_half": mean, "p_longest_below_half_hw": hw,
             "dickman_half": 1.0 - math.log(2.0)}, {})


_register(Experiment(
    "poisson-dirichlet", {"n": int}, ("longest_frac",),
    lambda p, s: (float(permutations.longest_cycle_stats(p["n"], 1, s)[0]),),
    _pd_summary,
))


def _dickman_rep(params, stream):
    del stream  # deterministic evaluation
    return (exact.dickman_rho(params["x"]),)


_register(Experiment(
    "dickman", {"x": float}, ("rho",),
    _dickman_rep,
    _mean_summary(("rho",)),
))


def _growth_rep(chain):
    def rep(p, s):
        tree = (growth.rrt_chain if chain == "rrt" else growth.ba_chain)(p["n"], s)
        out = tree.out_degrees()
        return float(out.max()), float(tree.height()), float(out[0])
    return rep


_register(Experiment(
    "rrt", {"n": int}, ("max_out_degree", "height", "root_degree"),
    _growth_rep("rrt"),
    _mean_summary(("max_out_degree", "height", "root_degree")),
))

_register(Experiment(
    "ba", {"n": int}, ("max_out_degree", "height", "root_degree"),
    _growth_rep("ba"),
    _mean_summary(("max_out_degree", "height", "root_degree")),
))


def _yule_summary(params, matrix):
    summary, _ = _mean_summary(("particles",))(params, matrix)
    summary["mean_limit"] = math.exp((params["k"] - 1) * params["t"])
    return summary, {}


_register(Experiment(
    "yule", {"k": int, "t": float}, ("particles",),
    lambda p, s: (float(growth.yule_counts_at(p["k"], p["t"], 1, s)[0]),),
    _yule_summary,
))

_register(Experiment(
    "coupon", {"n": int}, ("draws",),
    lambda p, s: (float(growth.coupon_collector(p["n"], s)),),
    _mean_summary(("draws",)),
))

_register(Experiment(
    "bins", {"n": int}, ("max_load",),
    lambda p, s: (float(growth.balls_in_bins(p["n"], s)),),
    _mean_summary(("max_load",)),
))

_register(Experiment(
    "pills", {"n": int}, ("half_pills_left",),
    lambda p, s: (float(growth.pills(p["n"], s)),),
    _mean_summary(("half_pills_left",)),
))

_register(Experiment(
    "corral", {"n": int}, ("survivors",),
    lambda p, s: (float(growth.ok_corral(p["n"], s)),),
    _mean_summary(("survivors",)),
))


def _many_to_one_rep(p, s):
    functional = (p["functional"], p["arg"])
    result = growth.many_to_one_table(p["k"], p["t"], [functional], 1, s)[functional]
    return result.lhs_mean, result.rhs_mean


def _many_to_one_summary(params, matrix):
    lhs_mean, lhs_hw = mean_ci(matrix[:, 0], level=0.99)
    rhs_mean, rhs_hw = mean_ci(matrix[:, 1], level=0.99)
    overlap = (lhs_mean - lhs_hw <= rhs_mean + rhs_hw
               and rhs_mean - rhs_hw <= lhs_mean + lhs_hw)
    return ({"population_mean": lhs_mean, "population_hw": lhs_hw,
             "line_mean": rhs_mean, "line_hw": rhs_hw},
            {"ci_overlap": overlap})


_register(Experiment(
    "many-to-one", {"k": int, "t": float, "functional": str, "arg": int},
    ("population_sum", "line_estimate"),
    _many_to_one_rep,
    _many_to_one_summary,
    defaults={"functional": "constant-1", "arg": 0},
))


def _arcsine_rep(p, s):
    path = walks.sample_path(walks.StepLaw.pm_one(), p["n"], s)
    return (walks.argmax_time(path) / p["n"],)


def _arcsine_summary(params, matrix):
    mean, hw = mean_ci(matrix[:, 0]) if matrix.shape[0] > 1 \
        else (float(matrix[0, 0]), 0.0)
    verdicts = {}
    if matrix.shape[0] >= 50:
        samples = np.sort(matrix[:, 0])
        report = ks_test(samples, lambda x: 2.0 / math.pi * np.arcsin(np.sqrt(x)))
        verdicts["arcsine_ks"] = report.passed
    return ({"argmax_frac_mean": mean, "argmax_frac_hw": hw}, verdicts)


_register(Experiment(
    "arcsine", {"n": int}, ("argmax_frac",),
    _arcsine_rep,
    _arcsine_summary,
))
