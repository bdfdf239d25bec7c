"""Ground-truth engines for subset-sum counting.

Two independent oracles are provided: full enumeration of all subsets
(split-half, vectorized) and a dynamic program over (subset size,
partial sum) for integer-valued sets. Both count subsets of every size
k = 1..n whose sum compares to a target, with exact arbitrary-precision
results. Enumeration cost is 2^n, so it is capped (default n <= 26);
the DP extends much further whenever the sum range is small.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RELATIONS",
    "DEFAULT_ENUMERATION_CAP",
    "InfeasibleError",
    "CountBySize",
    "ExactSumPmf",
    "binomial",
    "enumerate_counts",
    "dp_counts",
    "exact_sum_pmf",
]

RELATIONS = ("eq", "ge", "le")

DEFAULT_ENUMERATION_CAP = 26

# int64 table cells are exact while every count fits below 2^63; counts are
# bounded by C(n, k) <= 2^n, so n <= 62 is safe. Larger n switches to
# object (Python int) cells.
_INT64_SAFE_N = 62

_DEFAULT_MAX_TABLE_CELLS = 50_000_000


class InfeasibleError(RuntimeError):
    """Raised when an exact computation would exceed its size/memory budget."""


@dataclass(frozen=True)
class CountBySize:
    """Exact subset counts indexed by subset size k = 1..n."""

    counts: dict[int, int]
    total: int = field(default=0)

    @classmethod
    def from_counts(cls, counts: dict[int, int]) -> "CountBySize":
        return cls(counts=dict(counts), total=sum(counts.values()))

    def __getitem__(self, k: int) -> int:
        return self.counts[k]


@dataclass(eq=False)
class ExactSumPmf:
    """Exact distribution of the sum of a uniform random size-k subset."""

    k: int
    support: np.ndarray
    mass: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.dot(self.support, self.mass))

    @property
    def variance(self) -> float:
        m = self.mean
        return float(np.dot((self.support - m) ** 2, self.mass))


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k) as an arbitrary-precision integer.

    ``k > n`` returns 0 by convention; negative arguments are a domain error.
    """
    if n < 0 or k < 0:
        raise ValueError(f"binomial arguments must be nonnegative, got ({n}, {k})")
    if k > n:
        return 0
    return math.comb(n, k)


def _check_relation(relation: str) -> None:
    if relation not in RELATIONS:
        raise ValueError(f"relation must be one of {RELATIONS}, got {relation!r}")


def _as_finite_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValueError("empty set")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite element in input set")
    return arr


def _doubling_sums(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sums and sizes of all 2^m subsets of ``values``, built incrementally."""
    m = len(values)
    sums = np.zeros(1 << m, dtype=np.float64)
    sizes = np.zeros(1 << m, dtype=np.int64)
    filled = 1
    for x in values:
        sums[filled : 2 * filled] = sums[:filled] + x
        sizes[filled : 2 * filled] = sizes[:filled] + 1
        filled *= 2
    return sums, sizes


def enumerate_counts(
    values,
    target: float,
    relation: str,
    tolerance: float = 0.0,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> CountBySize:
    """Count, for every subset size k, the k-subsets whose sum satisfies the relation.

    All 2^n subsets are visited once, as pairs of half-set subsets with
    vectorized inner sweeps, so the default cap of n = 26 runs in well
    under a second. ``tolerance`` applies only to ``eq`` and means
    ``|sum - target| <= tolerance``; the default 0 is exact float
    equality, mainly useful for integer-valued data.

    Raises
    ------
    InfeasibleError
        If ``len(values) > cap``.
    ValueError
        On non-finite values, a bad relation, or negative tolerance.
    """
    _check_relation(relation)
    if tolerance < 0:
        raise ValueError(f"tolerance must be >= 0, got {tolerance}")
    arr = _as_finite_array(values)
    n = arr.size
    if n > cap:
        raise InfeasibleError(
            f"enumeration over {n} values would visit 2^{n} subsets; "
            f"the cap is n = {cap} (raise `cap` explicitly or use dp_counts)"
        )
    if n > _INT64_SAFE_N:
        raise InfeasibleError(f"enumeration not supported beyond n = {_INT64_SAFE_N}")

    half = n // 2
    sums_a, sizes_a = _doubling_sums(arr[:half])
    sums_b, sizes_b = _doubling_sums(arr[half:])

    counts = np.zeros(n + 1, dtype=np.int64)
    for s, z in zip(sums_a.tolist(), sizes_a.tolist()):
        total = sums_b + s
        if relation == "eq":
            mask = np.abs(total - target) <= tolerance
        elif relation == "ge":
            mask = total >= target
        else:
            mask = total <= target
        counts += np.bincount(sizes_b[mask] + z, minlength=n + 1)

    return CountBySize.from_counts({k: int(counts[k]) for k in range(1, n + 1)})


def _sums_of_size(arr: np.ndarray, k: int):
    """Yield the sums of all C(n, k) size-k subsets, in vectorized batches.

    Small sets use the split-half merge (cost 2^(n/2) per half); larger
    sets walk index combinations directly, which is what makes small-k
    strata of big sets affordable.
    """
    n = arr.size
    if n <= 32:
        half = n // 2
        sums_a, sizes_a = _doubling_sums(arr[:half])
        sums_b, sizes_b = _doubling_sums(arr[half:])
        for ka in range(max(0, k - (n - half)), min(half, k) + 1):
            a = sums_a[sizes_a == ka]
            b = sums_b[sizes_b == k - ka]
            if a.size and b.size:
                yield (a[:, None] + b[None, :]).ravel()
        return
    combos = itertools.combinations(range(n), k)
    batch = 200_000
    while True:
        idx = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(combos, batch)),
            dtype=np.int64,
        )
        if idx.size == 0:
            return
        yield arr[idx.reshape(-1, k)].sum(axis=1)


def _as_int_array(values) -> np.ndarray:
    arr = _as_finite_array(values)
    rounded = np.rint(arr)
    if not np.array_equal(arr, rounded):
        raise ValueError(
            "dp_counts requires an integer-valued set; pre-scale rationals first"
        )
    return rounded.astype(np.int64)


def _shift_add_rows(dp: np.ndarray, x: int, n: int) -> None:
    # dp[k] gains dp[k-1] shifted by x along the sum axis; k descends so each
    # element is counted once per subset.
    width = dp.shape[1]
    for k in range(n, 0, -1):
        if x == 0:
            dp[k, :] += dp[k - 1, :]
        elif x > 0:
            if x < width:
                dp[k, x:] += dp[k - 1, : width - x]
        else:
            if -x < width:
                dp[k, :x] += dp[k - 1, -x:]


def _table(shape: tuple[int, int], n: int) -> np.ndarray:
    if n <= _INT64_SAFE_N:
        return np.zeros(shape, dtype=np.int64)
    dp = np.empty(shape, dtype=object)
    dp[...] = 0
    return dp


def _all_binomials(n: int) -> dict[int, int]:
    return {k: math.comb(n, k) for k in range(1, n + 1)}


def dp_counts(
    values,
    target: float,
    relation: str,
    *,
    max_cells: int = _DEFAULT_MAX_TABLE_CELLS,
) -> CountBySize:
    """Exact subset counts per size k via dynamic programming on (k, partial sum).

    Requires an integer-valued set. Nonnegative sets use a bounded table
    of width O(target): for ``ge`` sums at or above the target collapse
    into one saturation bucket, and for ``eq``/``le`` sums beyond the
    target are discarded (a nonnegative set can never bring them back).
    Signed sets fall back to the full sum range with an offset axis.

    Raises
    ------
    InfeasibleError
        If the table would exceed ``max_cells`` cells (the message
        reports the computed size).
    """
    _check_relation(relation)
    ints = _as_int_array(values)
    n = ints.size

    lo = int(ints[ints < 0].sum())
    hi = int(ints[ints > 0].sum())

    # Shortcut when the target is outside the achievable sum range.
    zeros = CountBySize.from_counts({k: 0 for k in range(1, n + 1)})
    everything = CountBySize.from_counts(_all_binomials(n))
    if relation == "eq" and (target < lo or target > hi or target != int(target)):
        return zeros
    if relation == "ge":
        if target > hi:
            return zeros
        if target <= lo:
            return everything
    if relation == "le":
        if target < lo:
            return zeros
        if target >= hi:
            return everything

    if lo == 0:
        return _dp_counts_nonneg(ints, target, relation, max_cells)
    return _dp_counts_full_range(ints, target, relation, lo, hi, max_cells)


def _check_cells(rows: int, width: int, max_cells: int) -> None:
    cells = rows * width
    if cells > max_cells:
        raise InfeasibleError(
            f"DP table of {rows} x {width} = {cells} cells exceeds the "
            f"budget of {max_cells}; shrink the sum range or use sampling"
        )


def _dp_counts_nonneg(
    ints: np.ndarray, target: float, relation: str, max_cells: int
) -> CountBySize:
    n = ints.size
    if relation == "ge":
        bound = math.ceil(target)  # count sums >= bound
        width = bound  # exact region 0..bound-1, bucket holds >= bound
    else:
        bound = math.floor(target)
        width = bound + 1  # exact region 0..bound

    _check_cells(n + 1, width + 1, max_cells)
    dp = _table((n + 1, width), n)
    dp[0, 0] = 1
    bucket = _table((n + 1, 1), n)[:, 0] if relation == "ge" else None

    for x in ints.tolist():
        if relation == "ge":
            # subsets that cross the bound when x joins, plus already-bucketed ones
            for k in range(n, 0, -1):
                spill = dp[k - 1, max(0, width - x) :].sum() if x > 0 else 0
                bucket[k] += bucket[k - 1] + spill
        _shift_add_rows(dp, int(x), n)

    if relation == "eq":
        per_k = {k: int(dp[k, width - 1]) for k in range(1, n + 1)}
    elif relation == "le":
        per_k = {k: int(dp[k, :].sum()) for k in range(1, n + 1)}
    else:
        per_k = {k: int(bucket[k]) for k in range(1, n + 1)}
    return CountBySize.from_counts(per_k)


def _dp_counts_full_range(
    ints: np.ndarray, target: float, relation: str, lo: int, hi: int, max_cells: int
) -> CountBySize:
    n = ints.size
    width = hi - lo + 1
    _check_cells(n + 1, width, max_cells)
    dp = _table((n + 1, width), n)
    dp[0, -lo] = 1  # sum axis offset: index s - lo
    for x in ints.tolist():
        _shift_add_rows(dp, int(x), n)

    if relation == "eq":
        col = int(target) - lo
        per_k = {k: int(dp[k, col]) for k in range(1, n + 1)}
    elif relation == "ge":
        start = max(math.ceil(target) - lo, 0)
        per_k = {k: int(dp[k, start:].sum()) for k in range(1, n + 1)}
    else:
        stop = min(math.floor(target) - lo + 1, width)
        per_k = {k: int(dp[k, :stop].sum()) for k in range(1, n + 1)}
    return CountBySize.from_counts(per_k)


def exact_sum_pmf(
    values,
    k: int,
    *,
    max_subsets: int = 20_000_000,
    merge_tolerance: float = 1e-9,
) -> ExactSumPmf:
    """Exact pmf of the sum of a uniform random size-k subset.

    Integer-valued sets go through the DP table, which is exact and fast
    regardless of C(n, k). Real-valued sets enumerate all C(n, k)
    subsets (capped at ``max_subsets``) and merge sums that agree within
    ``merge_tolerance`` of the group's first representative, so float
    associativity noise cannot split a support point.
    """
    arr = _as_finite_array(values)
    n = arr.size
    if not 1 <= k <= n:
        raise ValueError(f"subset size k={k} out of range 1..{n}")

    total_subsets = math.comb(n, k)

    rounded = np.rint(arr)
    if np.array_equal(arr, rounded):
        ints = rounded.astype(np.int64)
        lo = int(ints[ints < 0].sum())
        hi = int(ints[ints > 0].sum())
        _check_cells(n + 1, hi - lo + 1, _DEFAULT_MAX_TABLE_CELLS)
        dp = _table((n + 1, hi - lo + 1), n)
        dp[0, -lo] = 1
        for x in ints.tolist():
            _shift_add_rows(dp, int(x), n)
        row = dp[k]
        idx = np.flatnonzero(row)
        support = (idx + lo).astype(np.float64)
        mass = np.array([int(row[i]) / total_subsets for i in idx], dtype=np.float64)
        return ExactSumPmf(k=k, support=support, mass=mass)

    if total_subsets > max_subsets:
        raise InfeasibleError(
            f"C({n},{k}) = {total_subsets} subsets exceeds the budget of {max_subsets}"
        )

    sums = np.sort(np.concatenate(list(_sums_of_size(arr, k))))
    assert sums.size == total_subsets

    support, counts = _merge_close(sums, merge_tolerance)
    mass = counts.astype(np.float64) / total_subsets
    return ExactSumPmf(k=k, support=support, mass=mass)


def _merge_close(sums: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Group sorted sums onto the first representative within ``tol``.

    Adjacent-gap runs are found vectorized. A run can only be wider than
    ``tol`` when near-ties chain, which real data essentially never
    produces; those rare runs get the sequential anchor walk.
    """
    boundaries = np.flatnonzero(np.diff(sums) > tol) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [sums.size]])
    ok = sums[ends - 1] - sums[starts] <= tol
    if ok.all():
        return sums[starts].copy(), ends - starts

    support: list[float] = []
    counts: list[int] = []
    for lo, hi, good in zip(starts.tolist(), ends.tolist(), ok.tolist()):
        if good:
            support.append(float(sums[lo]))
            counts.append(hi - lo)
            continue
        i = lo
        while i < hi:
            j = int(np.searchsorted(sums[i:hi], sums[i] + tol, side="right")) + i
            support.append(float(sums[i]))
            counts.append(j - i)
            i = j
    return np.asarray(support), np.asarray(counts, dtype=np.int64)
