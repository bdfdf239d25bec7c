"""Shared independent oracles for the test suite.

These deliberately avoid the library's own code paths: enumeration via
itertools, binomials via Pascal's triangle, normal masses via numeric
quadrature, i.i.d.-sum CDFs via Monte Carlo. Expected values asserted in
the tests come from these oracles, never from the code under test.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from scipy.integrate import quad


def brute_subset_sums(values, k):
    """Sums of all C(n, k) subsets, one by one."""
    return [sum(c) for c in itertools.combinations(values, k)]


def brute_counts(values, target, relation, tolerance=0.0):
    """Per-size subset counts by exhaustive iteration."""
    n = len(values)
    counts = {}
    for k in range(1, n + 1):
        cnt = 0
        for combo in itertools.combinations(values, k):
            s = sum(combo)
            if relation == "eq":
                ok = abs(s - target) <= tolerance
            elif relation == "ge":
                ok = s >= target
            else:
                ok = s <= target
            cnt += ok
        counts[k] = cnt
    return counts


def pascal_triangle(n_max):
    """Rows 0..n_max of Pascal's triangle, additive construction only."""
    rows = [[1]]
    for _ in range(n_max):
        prev = rows[-1]
        rows.append([1] + [prev[i] + prev[i + 1] for i in range(len(prev) - 1)] + [1])
    return rows


def normal_mass_quad(mean, var, a, b):
    """Normal probability mass on (a, b] by adaptive quadrature of the density."""
    sd = math.sqrt(var)

    def density(x):
        z = (x - mean) / sd
        return math.exp(-0.5 * z * z) / (sd * math.sqrt(2 * math.pi))

    val, _ = quad(density, a, b)
    return val


def normal_cdf_quad(mean, var, x):
    sd = math.sqrt(var)
    return normal_mass_quad(mean, var, mean - 12 * sd, x)


def mc_cdf(draw, x, n_draws=10_000_000, seed=2024):
    """Monte-Carlo CDF estimate; ``draw(rng, size)`` produces the samples."""
    rng = np.random.default_rng(seed)
    return float((draw(rng, n_draws) <= x).mean())


def jsd_oracle(p: dict, q: dict) -> float:
    """Independent discrete Jensen-Shannon divergence (natural log)."""
    support = sorted(set(p) | set(q))
    total = 0.0
    for x in support:
        px, qx = p.get(x, 0.0), q.get(x, 0.0)
        m = (px + qx) / 2
        if px > 0:
            total += 0.5 * px * math.log(px / m)
        if qx > 0:
            total += 0.5 * qx * math.log(qx / m)
    return total


def two_pass_stats(values):
    """Second, independent computation of population mean/variance."""
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return n, mean, var


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
