"""Tophat kernel density estimation of subset-sum distributions.

The estimator draws many independent size-k subsets (each sampled
without replacement inside the subset, with replacement across draws),
keeps their sums, and places a uniform kernel of half-width h on each
sum. The bandwidth rule is the 10% quantile of the consecutive gaps of
the sorted sample. Density and CDF are exact for the tophat mixture, so
the model integrates to 1 with no quadrature.

Randomness comes from numpy's seeded PCG64 generator; a fixed seed
reproduces the model bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "KdeModel",
    "sample_subset_sums",
    "fit_bandwidth",
    "fit_kde",
    "kde_density",
    "kde_cdf",
    "DEFAULT_KDE_SAMPLES",
]

DEFAULT_KDE_SAMPLES = 10_000

# Row block size for the vectorized sampler, in matrix cells.
_SAMPLE_BLOCK_CELLS = 20_000_000


def sample_subset_sums(values, k: int, m: int, seed: int) -> np.ndarray:
    """Sums of m independent uniformly random size-k subsets.

    Each draw picks a k-subset uniformly; distinct draws are independent,
    so the same subset can recur. Two regimes, both exact and both
    deterministic for a fixed seed: when k is small relative to n,
    ordered index tuples are drawn and rows with a repeated index are
    redrawn (every ordered tuple of distinct indices is equally likely);
    otherwise the subset is the k smallest of n i.i.d. uniform keys,
    processed in fixed-size row blocks.
    """
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    n = arr.size
    if n == 0:
        raise ValueError("empty set")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite element in input set")
    if not 1 <= k <= n:
        raise ValueError(f"subset size k={k} out of range 1..{n}")
    if m < 2:
        raise ValueError(f"need at least 2 samples for a bandwidth, got m={m}")

    if k == n:
        return np.full(m, arr.sum(), dtype=np.float64)

    rng = np.random.default_rng(seed)
    if k * k * 2 <= n:
        # rejection on ordered tuples: collision chance per row is about
        # k^2/(2n) <= 25%, so redraw rounds die off geometrically
        idx = rng.integers(0, n, (m, k))
        while True:
            sorted_rows = np.sort(idx, axis=1)
            bad = np.flatnonzero((np.diff(sorted_rows, axis=1) == 0).any(axis=1))
            if bad.size == 0:
                break
            idx[bad] = rng.integers(0, n, (bad.size, k))
        return arr[idx].sum(axis=1)

    out = np.empty(m, dtype=np.float64)
    block = max(1, _SAMPLE_BLOCK_CELLS // n)
    done = 0
    while done < m:
        rows = min(block, m - done)
        keys = rng.random((rows, n))
        idx = np.argpartition(keys, k - 1, axis=1)[:, :k]
        out[done : done + rows] = arr[idx].sum(axis=1)
        done += rows
    return out


def fit_bandwidth(sums) -> float:
    """Bandwidth h: the 10% quantile (lower interpolation) of sorted consecutive gaps.

    Zero gaps are dropped first; repeated sums would otherwise force
    h = 0 and an invalid kernel. If every gap is zero the fallback is
    ``max(|mean|, 1) * 1e-6``.
    """
    arr = np.sort(np.asarray(sums, dtype=np.float64).reshape(-1))
    if arr.size < 2:
        raise ValueError(f"need at least 2 sums, got {arr.size}")
    gaps = np.diff(arr)
    gaps = gaps[gaps > 0]
    if gaps.size == 0:
        return max(abs(float(arr.mean())), 1.0) * 1e-6
    return float(np.quantile(gaps, 0.10, method="lower"))


@dataclass(eq=False)
class KdeModel:
    """Sampled subset sums plus a tophat kernel of half-width ``bandwidth``."""

    sums: np.ndarray
    bandwidth: float
    k: int
    seed: int
    kind: str = "kde"
    _sorted: np.ndarray = field(init=False, repr=False)
    _prefix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.sums = np.asarray(self.sums, dtype=np.float64).reshape(-1)
        if self.sums.size < 1:
            raise ValueError("model needs at least one sampled sum")
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be > 0, got {self.bandwidth}")
        self._sorted = np.sort(self.sums)
        self._prefix = np.concatenate([[0.0], np.cumsum(self._sorted)])

    @property
    def m(self) -> int:
        return self.sums.size

    def cdf(self, x):
        return kde_cdf(self, x)


def fit_kde(values, k: int, m: int = DEFAULT_KDE_SAMPLES, seed: int = 0) -> KdeModel:
    """Sample m subset sums and fit the tophat model with the quantile bandwidth."""
    sums = sample_subset_sums(values, k, m, seed)
    return KdeModel(sums=sums, bandwidth=fit_bandwidth(sums), k=k, seed=seed)


def kde_density(model: KdeModel, t):
    """Density (1/(m*h)) * sum_i K((t - s_i)/h) with the tophat K = 1/2 on |u| <= 1.

    Only samples within h of t contribute, each exactly 1/(2*m*h); the
    sorted-sample search makes single-point evaluation O(log m).
    """
    t = np.asarray(t, dtype=np.float64)
    h = model.bandwidth
    lo = np.searchsorted(model._sorted, t - h, side="left")
    hi = np.searchsorted(model._sorted, t + h, side="right")
    dens = (hi - lo) / (2.0 * model.m * h)
    return float(dens) if t.ndim == 0 else dens


def kde_cdf(model: KdeModel, t):
    """Exact CDF of the tophat mixture: mean of clamp((t - s_i + h)/(2h), 0, 1).

    Samples fully below t - h contribute 1; those inside (t - h, t + h)
    contribute their linear ramp, evaluated with prefix sums.
    """
    t = np.asarray(t, dtype=np.float64)
    h = model.bandwidth
    lo = np.searchsorted(model._sorted, t - h, side="left")
    hi = np.searchsorted(model._sorted, t + h, side="right")
    window_sum = model._prefix[hi] - model._prefix[lo]
    window_cnt = hi - lo
    ramp = (window_cnt * (t + h) - window_sum) / (2.0 * h)
    val = (lo + ramp) / model.m
    val = np.clip(val, 0.0, 1.0)
    return float(val) if t.ndim == 0 else val
