"""From first principles: subset-sum moments and the exact counting oracles.

A subset of size k drawn uniformly from a set behaves like a sample
without replacement, so its sum has mean k * mean(S) and a variance that
shrinks by the finite-population factor (1 - (k-1)/(n-1)). This script
checks both statements by brute force on a small set, then counts
subsets hitting a target with the two exact engines.
"""

import itertools

import numpy as np

from perfectsum import (
    dp_counts,
    enumerate_counts,
    pair_covariance,
    set_statistics,
    subset_sum_mean,
    subset_sum_variance,
)

values = [3, 1, 4, 1, 5, 9, 2, 6]
stats = set_statistics(values)
print(f"set: {values}")
print(f"n = {stats.n}, mean = {stats.mean}, population variance = {stats.variance:.4f}")

# The formulas are identities: compare against all C(n, k) subsets.
print("\nk   formula mean   brute mean   formula var   brute var")
for k in range(1, stats.n + 1):
    sums = [sum(c) for c in itertools.combinations(values, k)]
    print(
        f"{k}   {subset_sum_mean(stats, k):12.4f} {np.mean(sums):12.4f}"
        f" {subset_sum_variance(stats, k):13.4f} {np.var(sums):11.4f}"
    )

# Negative covariance is what shrinks the variance: drawing a large value
# means it is no longer available for the second draw.
print(f"\npair covariance: {pair_covariance(stats):.4f} (always <= 0)")

# Two independent exact engines: full enumeration and the
# (size, partial sum) dynamic program. They must agree to the last digit.
target = 15
for relation in ("eq", "ge", "le"):
    en = enumerate_counts(values, target, relation)
    dp = dp_counts(values, target, relation)
    assert en.counts == dp.counts
    print(f"subsets with sum {relation} {target}: total {en.total}, by size {en.counts}")
