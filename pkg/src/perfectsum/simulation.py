"""Experiment harness: set generation, error-vs-n curves, per-k divergence tables.

Every experiment is fully determined by its config and seeds; results
carry the config echo and per-row seeds so any aggregate can be traced
back to its points. Output is plot-ready rows (CSV or JSON), not plots.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .evaluation import DiscretePmf, discretize, js_divergence
from .exact import InfeasibleError, binomial, exact_sum_pmf, DEFAULT_ENUMERATION_CAP
from .kde import DEFAULT_KDE_SAMPLES, sample_subset_sums
from .moments import set_statistics
from .pipeline import (
    ApproxConfig,
    _build_distribution,
    approximate_perfect_sum,
    auto_granularity,
    exact_perfect_sum,
    per_k_seed,
)

__all__ = [
    "SetSpec",
    "ExperimentResult",
    "generate_set",
    "error_experiment",
    "divergence_experiment",
]

FAMILIES = ("discrete_uniform", "uniform", "chi_square", "custom_file")

# Reference pmfs for divergence tables: exact enumeration up to this many
# subsets (integer-valued sets use the DP and ignore it), else a seeded
# empirical reference of `ref_samples` subset sums.
MAX_EXACT_REFERENCE_SUBSETS = 2_000_000
DEFAULT_REFERENCE_SAMPLES = 200_000

_GRID_LIMIT = 200_000


@dataclass(frozen=True)
class SetSpec:
    """Recipe for one generated value set."""

    family: str
    n: int
    seed: int = 0
    low: float = 0.0
    high: float = 1.0
    df: float = 1.0
    path: Optional[str] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; options: {FAMILIES}")
        if self.n < 1:
            raise ValueError(f"set size must be >= 1, got {self.n}")

    def describe(self) -> dict:
        doc = {"family": self.family, "n": self.n, "seed": self.seed}
        if self.family in ("discrete_uniform", "uniform"):
            doc.update(low=self.low, high=self.high)
        elif self.family == "chi_square":
            doc.update(df=self.df)
        else:
            doc.update(path=self.path)
        return doc


def generate_set(spec: SetSpec) -> np.ndarray:
    """n i.i.d. draws from the family, deterministic per seed.

    ``discrete_uniform`` yields integers on [low, high] inclusive (as
    float64, like every other family). ``custom_file`` returns the file
    contents verbatim, one value per line.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.family == "discrete_uniform":
        return rng.integers(int(spec.low), int(spec.high) + 1, spec.n).astype(np.float64)
    if spec.family == "uniform":
        if not spec.low < spec.high:
            raise ValueError(f"need low < high, got [{spec.low}, {spec.high}]")
        return rng.uniform(spec.low, spec.high, spec.n)
    if spec.family == "chi_square":
        if not spec.df > 0:
            raise ValueError(f"df must be > 0, got {spec.df}")
        return rng.chisquare(spec.df, spec.n)
    if spec.path is None:
        raise ValueError("custom_file family needs a path")
    return np.loadtxt(spec.path, dtype=np.float64).reshape(-1)


_ROW_KEYS = ("n", "k", "method", "metric", "value", "seed")


@dataclass(eq=False)
class ExperimentResult:
    """Plot-ready observation rows plus the config echo."""

    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = sorted(self.rows, key=_row_sort_key)

    def values(self, **match) -> list:
        return [r["value"] for r in self.rows if all(r.get(k) == v for k, v in match.items())]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_ROW_KEYS)
            for row in self.rows:
                writer.writerow(["" if row.get(key) is None else row.get(key) for key in _ROW_KEYS])

    def to_json(self, path) -> None:
        doc = {"metadata": self.metadata, "rows": self.rows}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _row_sort_key(row: dict):
    return (
        row.get("metric") or "",
        row.get("n") if row.get("n") is not None else -1,
        row.get("k") if row.get("k") is not None else -1,
        row.get("method") or "",
        row.get("seed") if row.get("seed") is not None else -1,
    )


def _half_total_target(values: np.ndarray) -> float:
    total = float(values.sum())
    if np.array_equal(values, np.rint(values)):
        return float(round(0.5 * total))
    return 0.5 * total


def error_experiment(
    family: SetSpec,
    n_values: Sequence[int],
    config: ApproxConfig,
    seeds: Sequence[int],
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> ExperimentResult:
    """Absolute relative error of the approximate total versus ground truth.

    For each (n, seed) a set is generated from ``family``, the target is
    half its total sum (rounded for integer sets), and
    ``|approx - exact| / max(exact, 1)`` is recorded. Per-n mean and
    standard deviation rows accompany the points. Fails up front if any
    n exceeds the exact-oracle cap.
    """
    n_values = list(n_values)
    for n in n_values:
        if n > cap:
            raise InfeasibleError(
                f"error experiment needs exact ground truth; n={n} exceeds the cap of {cap}"
            )
    rows = []
    for n in n_values:
        errors = []
        for seed in seeds:
            spec = replace(family, n=n, seed=seed)
            values = generate_set(spec)
            target = _half_total_target(values)
            exact_total = exact_perfect_sum(values, target, config.relation, cap=cap).total
            approx_total = approximate_perfect_sum(values, target, config).total
            err = abs(approx_total - exact_total) / max(exact_total, 1)
            errors.append(err)
            rows.append(
                {"n": n, "k": None, "method": config.method, "metric": "abs_rel_error",
                 "value": float(err), "seed": seed}
            )
        if errors:
            rows.append(
                {"n": n, "k": None, "method": config.method,
                 "metric": "mean_abs_rel_error", "value": float(np.mean(errors)), "seed": None}
            )
            rows.append(
                {"n": n, "k": None, "method": config.method,
                 "metric": "sd_abs_rel_error", "value": float(np.std(errors)), "seed": None}
            )
    metadata = {
        "experiment": "error",
        "family": family.describe(),
        "n_values": n_values,
        "seeds": list(seeds),
        "config": _config_echo(config),
        "target_rule": "half_total_sum",
        "cap": cap,
    }
    return ExperimentResult(rows=rows, metadata=metadata)


def _config_echo(config: ApproxConfig) -> dict:
    return {
        "method": config.method,
        "relation": config.relation,
        "granularity": config.granularity,
        "k_min": config.k_min,
        "k_max": config.k_max,
        "exact_small_k": config.exact_small_k,
        "low": config.low,
        "high": config.high,
        "df": config.df,
        "samples": config.samples,
        "seed": config.seed,
    }


def _bin_pmf(sums: np.ndarray, weights: np.ndarray, g: float) -> DiscretePmf:
    idx = np.floor(sums / g + 0.5).astype(np.int64)
    uniq, inverse = np.unique(idx, return_inverse=True)
    mass = np.bincount(inverse, weights=weights)
    mass = mass / mass.sum()
    return DiscretePmf(support=uniq.astype(np.float64) * g, mass=mass)


def _raw_reference(
    arr: np.ndarray, k: int, seed: int, ref_samples: int, max_exact_subsets: int
) -> tuple[np.ndarray, np.ndarray, str]:
    """(points, weights, kind) of the reference size-k sum distribution.

    Exact whenever computable (integer-valued sets via the DP, real sets
    while C(n, k) is within budget); otherwise a seeded empirical
    reference of ``ref_samples`` sampled sums, which is what large-n
    divergence tables compare against.
    """
    n = arr.size
    integral = bool(np.array_equal(arr, np.rint(arr)))
    if integral or binomial(n, k) <= max_exact_subsets:
        pmf = exact_sum_pmf(arr, k)
        return pmf.support, pmf.mass, "exact"
    sums = sample_subset_sums(arr, k, ref_samples, seed)
    return sums, np.full(sums.size, 1.0 / sums.size), "sampled"


def reference_pmf(
    values,
    k: int,
    granularity: float,
    *,
    seed: int = 0,
    ref_samples: int = DEFAULT_REFERENCE_SAMPLES,
    max_exact_subsets: int = MAX_EXACT_REFERENCE_SUBSETS,
) -> tuple[DiscretePmf, str]:
    """Reference size-k sum distribution binned onto the granularity grid."""
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    points, weights, kind = _raw_reference(arr, k, seed, ref_samples, max_exact_subsets)
    return _bin_pmf(points, weights, granularity), kind


def _method_spec(method) -> dict:
    if isinstance(method, str):
        return {"method": method}
    return dict(method)


def _approx_grid(ref: DiscretePmf, dist, g: float) -> np.ndarray:
    """Granularity grid covering both the reference support and the approximation."""
    lo = float(ref.support[0])
    hi = float(ref.support[-1])
    if hasattr(dist, "bandwidth"):
        lo = min(lo, float(dist.sums.min()) - dist.bandwidth)
        hi = max(hi, float(dist.sums.max()) + dist.bandwidth)
    elif dist.kind == "degenerate":
        lo = min(lo, dist.atom)
        hi = max(hi, dist.atom)
    else:
        spread = 8.0 * math.sqrt(dist.variance)
        lo = min(lo, dist.mean - spread)
        hi = max(hi, dist.mean + spread)
    i_lo = int(math.floor(lo / g + 0.5))
    i_hi = int(math.floor(hi / g + 0.5))
    if i_hi - i_lo + 1 > _GRID_LIMIT:
        raise ValueError(
            f"divergence grid of {i_hi - i_lo + 1} points exceeds {_GRID_LIMIT}; "
            f"use a coarser granularity"
        )
    return np.arange(i_lo, i_hi + 1, dtype=np.float64) * g


def divergence_experiment(
    values,
    k_values: Sequence[int],
    methods: Sequence,
    *,
    granularity: Optional[float] = None,
    bins: int = 60,
    seed: int = 0,
    ref_samples: int = DEFAULT_REFERENCE_SAMPLES,
    max_exact_subsets: int = MAX_EXACT_REFERENCE_SUBSETS,
) -> ExperimentResult:
    """Jensen-Shannon divergence of each method against the reference, per k.

    ``granularity=None`` resolves per set: the sum-lattice gcd for
    integer-valued sets, else each k's reference range divided into
    ``bins`` windows. Methods are names or dicts with family parameters,
    e.g. ``{"method": "chi_square", "df": 3}``.
    """
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    stats = set_statistics(arr)
    n = stats.n
    bad = [k for k in k_values if not 1 <= k <= n]
    if bad:
        raise ValueError(f"infeasible subset sizes for n={n}: {bad}")

    specs = [_method_spec(m) for m in methods]
    rows = []
    grans: dict[str, float] = {}
    ref_kinds: dict[str, str] = {}
    base_g = auto_granularity(arr) if granularity is None else float(granularity)

    for k in k_values:
        points, weights, kind = _raw_reference(
            arr, k, per_k_seed(seed, k), ref_samples, max_exact_subsets
        )
        if base_g > 0:
            g = base_g
        else:
            g = max((float(points.max()) - float(points.min())) / bins, 1e-12)
        ref = _bin_pmf(points, weights, g)
        grans[str(k)] = g
        ref_kinds[str(k)] = kind
        for spec in specs:
            config = ApproxConfig(
                method=spec["method"],
                low=spec.get("low"),
                high=spec.get("high"),
                df=spec.get("df"),
                samples=spec.get("samples", DEFAULT_KDE_SAMPLES),
                seed=spec.get("seed", seed),
            )
            dist = _build_distribution(arr, stats, k, config)
            grid = _approx_grid(ref, dist, g)
            approx_pmf = discretize(dist, grid, g)
            rows.append(
                {"n": n, "k": int(k), "method": spec["method"], "metric": "jsd",
                 "value": js_divergence(ref, approx_pmf), "seed": seed}
            )

    metadata = {
        "experiment": "divergence",
        "n": n,
        "k_values": [int(k) for k in k_values],
        "methods": specs,
        "granularity": grans,
        "reference": {"kind": ref_kinds, "samples": ref_samples,
                      "max_exact_subsets": max_exact_subsets},
        "seed": seed,
        "bins": bins,
    }
    return ExperimentResult(rows=rows, metadata=metadata)