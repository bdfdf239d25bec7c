"""End-to-end perfect-sum counting: exact engines and the O(n) approximation loop.

The approximation loops over every subset size k, models the size-k sum
with the configured distribution family, converts the queried
probability into a subset count via round-half-even of p * C(n, k), and
accumulates an arbitrary-precision total. Counts are never accumulated
in floating point. Per-k failures abort the whole run with the k
attached; a silently missing stratum would corrupt the total invisibly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np
from scipy.special import ndtr

from . import exact as exact_mod
from .approx import (
    DegenerateSum,
    _be_terms_from_aggregates,
    _standardized_be_aggregates,
    chi_square_sum,
    irwin_hall_sum,
    normal_sum_approx,
    probability_query,
)
from .exact import InfeasibleError, binomial
from .kde import DEFAULT_KDE_SAMPLES, KdeModel, fit_bandwidth, sample_subset_sums
from .moments import SetStatistics, set_statistics

__all__ = [
    "ApproxConfig",
    "ApproxReport",
    "PipelineError",
    "approximate_perfect_sum",
    "exact_perfect_sum",
    "auto_granularity",
    "METHODS",
]

METHODS = ("normal", "irwin_hall", "chi_square", "kde")

# Hybrid mode never enumerates a stratum larger than this.
EXACT_STRATUM_BUDGET = 1_000_000


class PipelineError(RuntimeError):
    """A per-k stratum failed; the run is aborted rather than left with a gap."""


@dataclass(frozen=True)
class ApproxConfig:
    """Configuration of the approximation loop.

    ``granularity=None`` means auto: the gcd of pairwise differences for
    integer-valued sets (their sum lattice spacing), 0 for real-valued
    sets. ``exact_small_k`` switches strata k <= that bound to exact
    enumeration when C(n, k) stays within the stratum budget; the normal
    family is weakest at small k, where few large strata dominate.
    """

    method: str = "normal"
    relation: str = "ge"
    granularity: Optional[float] = None
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    exact_small_k: int = 0
    low: Optional[float] = None
    high: Optional[float] = None
    df: Optional[float] = None
    samples: int = DEFAULT_KDE_SAMPLES
    seed: int = 0
    diagnostics: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.relation not in exact_mod.RELATIONS:
            raise ValueError(f"relation must be one of {exact_mod.RELATIONS}")
        if self.exact_small_k < 0:
            raise ValueError("exact_small_k must be >= 0")


@dataclass(eq=False)
class ApproxReport:
    """Per-size probabilities and counts plus the arbitrary-precision total.

    Stored columnar (``ks`` aligned with ``probabilities``, ``counts``,
    ``methods``) so million-row reports stay cheap; ``rows()`` yields
    the per-k records. ``meta`` echoes the full invocation for
    reproducibility.
    """

    ks: np.ndarray
    probabilities: np.ndarray
    counts: list
    methods: list
    total: int
    meta: dict = field(default_factory=dict)
    diagnostics: Optional[list] = None

    def rows(self) -> Iterator[dict]:
        for i in range(self.ks.size):
            yield {
                "k": int(self.ks[i]),
                "probability": float(self.probabilities[i]),
                "count": self.counts[i],
                "method_used": self.methods[i],
            }

    def counts_by_k(self) -> dict:
        return {int(k): c for k, c in zip(self.ks, self.counts)}

    def to_json_dict(self) -> dict:
        """Stable JSON shape; counts as decimal strings, zero rows elided.

        Any k inside [k_min, k_max] that is absent from ``per_k.k`` has
        probability 0 and count 0.
        """
        keep = [
            i
            for i in range(self.ks.size)
            if self.probabilities[i] > 0.0 or self.counts[i] != 0
        ]
        doc = dict(self.meta)
        doc["total"] = str(self.total)
        doc["per_k"] = {
            "k": [int(self.ks[i]) for i in keep],
            "probability": [float(self.probabilities[i]) for i in keep],
            "count": [str(self.counts[i]) for i in keep],
            "method_used": [self.methods[i] for i in keep],
        }
        if self.diagnostics is not None:
            doc["diagnostics"] = {
                "k": [int(k) for k in self.ks],
                "p": [t.p for t in self.diagnostics],
                "q": [t.q for t in self.diagnostics],
                "b": [t.b for t in self.diagnostics],
                "delta1": [_json_real(t.delta1) for t in self.diagnostics],
                "delta2": [_json_real(t.delta2) for t in self.diagnostics],
                "bound_over_c": [_json_real(t.bound_over_c) for t in self.diagnostics],
            }
        return doc


def _json_real(x: float):
    # strict JSON has no Infinity/NaN literals
    return x if math.isfinite(x) else repr(x)


def auto_granularity(values) -> float:
    """Sum-lattice spacing: gcd of pairwise differences for integer sets, else 0.

    A constant integer set has no spacing information and falls back to 1.
    """
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    rounded = np.rint(arr)
    if arr.size == 0 or not np.array_equal(arr, rounded):
        return 0.0
    ints = rounded.astype(np.int64)
    g = int(np.gcd.reduce(np.abs(ints - ints[0])))
    return float(g) if g > 0 else 1.0


def _round_half_even(p: float, c: int) -> int:
    """round-half-even(p * c) with the float p expanded exactly."""
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return c
    f = Fraction(p) * c
    q, r = divmod(f.numerator, f.denominator)
    twice = 2 * r
    if twice > f.denominator or (twice == f.denominator and q % 2 == 1):
        return q + 1
    return q


def _as_values(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValueError("empty set")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite element in input set")
    return arr


def _normal_probabilities(
    stats: SetStatistics, ks: np.ndarray, target: float, relation: str, g: float
) -> np.ndarray:
    """Vectorized window probabilities for the corrected-variance normal family."""
    n = stats.n
    kf = ks.astype(np.float64)
    mu = kf * stats.mean
    if n == 1:
        var = np.zeros_like(kf)
    else:
        var = kf * stats.variance * (1.0 - (kf - 1.0) / (n - 1.0))
    degenerate = var <= 0.0
    sd = np.sqrt(np.where(degenerate, 1.0, var))

    # expressions mirror probability_query over NormalSum term by term, so
    # the vectorized fast path is bit-identical to the scalar route
    with np.errstate(invalid="ignore"):
        if relation == "eq":
            if g == 0.0:
                raise ValueError(
                    "eq query on a continuous distribution needs granularity > 0"
                )
            prob = ndtr(((target + g / 2) - mu) / sd) - ndtr(((target - g / 2) - mu) / sd)
        elif relation == "ge":
            prob = 1.0 - ndtr(((target - g / 2) - mu) / sd)
        else:
            prob = ndtr(((target + g / 2) - mu) / sd)

    if relation == "eq":
        atom_hit = mu == target
    elif relation == "ge":
        atom_hit = mu >= target
    else:
        atom_hit = mu <= target
    prob = np.where(degenerate, np.where(atom_hit, 1.0, 0.0), prob)
    return np.clip(prob, 0.0, 1.0)


def _build_distribution(values, stats: SetStatistics, k: int, config: ApproxConfig):
    if k == stats.n:
        # only one subset: the set itself
        return DegenerateSum(atom=k * stats.mean)
    if config.method == "normal":
        return normal_sum_approx(stats, k)
    if config.method == "irwin_hall":
        if config.low is None or config.high is None:
            raise ValueError("irwin_hall method needs low and high bounds")
        return irwin_hall_sum(k, config.low, config.high)
    if config.method == "chi_square":
        if config.df is None:
            raise ValueError("chi_square method needs df")
        return chi_square_sum(k, config.df)
    # kde: per-k seed derived from (master seed, k) so any evaluation order
    # and any parallel split agree with the serial run
    seed_k = per_k_seed(config.seed, k)
    sums = sample_subset_sums(values, k, config.samples, seed_k)
    return KdeModel(sums=sums, bandwidth=fit_bandwidth(sums), k=k, seed=seed_k)


def per_k_seed(master_seed: int, k: int) -> int:
    """Deterministic per-stratum sampling seed derived from (master seed, k)."""
    return int(np.random.SeedSequence((master_seed, k)).generate_state(1, np.uint64)[0])


def _relation_mask(sums: np.ndarray, target: float, relation: str, g: float) -> np.ndarray:
    if relation == "eq":
        if g > 0:
            return (sums > target - g / 2) & (sums <= target + g / 2)
        return sums == target
    if relation == "ge":
        return sums >= target
    return sums <= target


def _exact_stratum_count(arr: np.ndarray, k: int, target: float, relation: str, g: float) -> int:
    """Exact number of k-subsets satisfying the relation (window semantics for eq)."""
    return sum(
        int(_relation_mask(sums, target, relation, g).sum())
        for sums in exact_mod._sums_of_size(arr, k)
    )


def approximate_perfect_sum(values, target: float, config: ApproxConfig) -> ApproxReport:
    """Approximate, for every subset size, how many subsets satisfy the sum relation.

    Runs one distribution evaluation per k. The per-k count is
    round-half-even of probability * C(n, k), computed exactly from the
    float probability; the total is the exact big-integer sum of the
    per-k counts. k = n is always handled by the degenerate point mass
    (there is only one subset of full size).
    """
    arr = _as_values(values)
    stats = set_statistics(arr)
    n = stats.n
    k_min = 1 if config.k_min is None else config.k_min
    k_max = n if config.k_max is None else config.k_max
    if not 1 <= k_min <= k_max <= n:
        raise ValueError(f"invalid k range [{k_min}, {k_max}] for n={n}")
    if config.exact_small_k > k_max:
        raise ValueError("exact_small_k must be <= k_max")
    g = auto_granularity(arr) if config.granularity is None else float(config.granularity)
    if g < 0:
        raise ValueError(f"granularity must be >= 0, got {g}")

    ks = np.arange(k_min, k_max + 1, dtype=np.int64)
    methods = [config.method] * ks.size

    if config.method == "normal":
        probs = _normal_probabilities(stats, ks, target, config.relation, g)
    else:
        probs = np.empty(ks.size, dtype=np.float64)
        for i, k in enumerate(ks.tolist()):
            try:
                dist = _build_distribution(arr, stats, k, config)
                probs[i] = probability_query(dist, target, config.relation, g)
            except (ValueError, InfeasibleError) as err:
                raise PipelineError(f"stratum k={k} failed: {err}") from err

    # hybrid mode: replace small strata with exact enumeration
    exact_idx: dict[int, int] = {}
    if config.exact_small_k >= k_min:
        for i, k in enumerate(ks.tolist()):
            if k > config.exact_small_k:
                break
            if binomial(n, k) > EXACT_STRATUM_BUDGET:
                continue
            try:
                exact_idx[i] = _exact_stratum_count(arr, k, target, config.relation, g)
            except (ValueError, InfeasibleError) as err:
                raise PipelineError(f"stratum k={k} failed: {err}") from err
            methods[i] = "exact"

    counts: list = [0] * ks.size
    total = 0
    needs_c = [
        i for i in range(ks.size) if probs[i] > 0.0 and i not in exact_idx
    ]
    if needs_c:
        first, last = needs_c[0], needs_c[-1]
        k0 = int(ks[first])
        c = math.comb(n, k0)
        for i in range(first, last + 1):
            if probs[i] > 0.0 and i not in exact_idx:
                counts[i] = _round_half_even(float(probs[i]), c)
            c = c * (n - int(ks[i])) // (int(ks[i]) + 1)
    for i, cnt in exact_idx.items():
        counts[i] = cnt
        probs[i] = cnt / binomial(n, int(ks[i]))
    total = sum(counts)

    diagnostics = None
    if config.diagnostics:
        try:
            nn, m2, abs3 = _standardized_be_aggregates(arr)
        except ValueError as err:
            raise PipelineError(f"diagnostics failed: {err}") from err
        diagnostics = [_be_terms_from_aggregates(m2, abs3, int(k), nn) for k in ks]

    meta = {
        "command": "approx",
        "n": n,
        "target": float(target),
        "relation": config.relation,
        "method": config.method,
        "granularity": g,
        "k_min": k_min,
        "k_max": k_max,
        "exact_small_k": config.exact_small_k,
        "samples": config.samples if config.method == "kde" else None,
        "seed": config.seed if config.method == "kde" else None,
        "low": config.low,
        "high": config.high,
        "df": config.df,
    }
    return ApproxReport(
        ks=ks,
        probabilities=probs,
        counts=counts,
        methods=methods,
        total=total,
        meta=meta,
        diagnostics=diagnostics,
    )


def exact_perfect_sum(
    values,
    target: float,
    relation: str,
    tolerance: float = 0.0,
    *,
    engine: str = "auto",
    cap: int = exact_mod.DEFAULT_ENUMERATION_CAP,
) -> ApproxReport:
    """Ground-truth counts in the same report shape as the approximation.

    ``engine`` picks the oracle: ``enumerate`` (any values, n capped),
    ``dp`` (integer values, bounded sum range), or ``auto`` (dp when it
    applies, else enumeration). The probability column is
    count / C(n, k).

    Raises
    ------
    InfeasibleError
        When the instance exceeds the chosen engine's budget; the
        approximate mode has no such cap.
    """
    if engine not in ("auto", "enumerate", "dp"):
        raise ValueError(f"engine must be auto, enumerate or dp, got {engine!r}")
    arr = _as_values(values)
    n = arr.size

    integral = bool(np.array_equal(arr, np.rint(arr)))
    chosen = engine
    if engine == "auto":
        chosen = "dp" if integral and tolerance == 0.0 else "enumerate"

    if chosen == "dp":
        result = exact_mod.dp_counts(arr, target, relation)
    else:
        result = exact_mod.enumerate_counts(arr, target, relation, tolerance, cap=cap)

    ks = np.arange(1, n + 1, dtype=np.int64)
    counts = [result.counts[k] for k in range(1, n + 1)]
    probs = np.array(
        [cnt / math.comb(n, k) for k, cnt in zip(range(1, n + 1), counts)],
        dtype=np.float64,
    )
    meta = {
        "command": "exact",
        "n": n,
        "target": float(target),
        "relation": relation,
        "method": chosen,
        "granularity": None,
        "k_min": 1,
        "k_max": n,
        "tolerance": tolerance,
    }
    return ApproxReport(
        ks=ks,
        probabilities=probs,
        counts=counts,
        methods=[chosen] * n,
        total=result.total,
        meta=meta,
    )
