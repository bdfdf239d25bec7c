"""Parametric approximations for the distribution of size-k subset sums.

The workhorse is the normal family with the finite-population variance
correction. The Irwin-Hall and chi-square families model the sum of k
i.i.d. draws instead (no finite-population correction): they are meant
for sets that are themselves i.i.d. samples of a known continuous law.
A Berry-Esseen style diagnostic quantifies (up to an absolute constant)
how far the standardized subset sum can be from the standard normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln, ndtr

from .moments import SetStatistics, set_statistics, subset_sum_mean, subset_sum_variance

__all__ = [
    "SumDistribution",
    "NormalSum",
    "IrwinHallSum",
    "ChiSquareSum",
    "DegenerateSum",
    "BerryEsseenTerms",
    "normal_sum_approx",
    "irwin_hall_sum",
    "chi_square_sum",
    "berry_esseen_terms",
    "probability_query",
    "IRWIN_HALL_EXACT_MAX_K",
]

# The exact Irwin-Hall CDF is an alternating binomial sum; beyond ~40 terms
# the cancellation exceeds float64 precision, so larger k uses the family's
# own normal limit (matched mean and variance).
IRWIN_HALL_EXACT_MAX_K = 40


class SumDistribution:
    """A unified view of an approximating distribution for a subset sum.

    Concrete kinds expose ``cdf`` (vectorized), ``mass`` over an interval,
    plus ``mean`` and ``variance``.
    """

    kind: str
    mean: float
    variance: float

    def cdf(self, x):
        raise NotImplementedError

    def mass(self, a: float, b: float) -> float:
        """Probability mass on the interval (a, b], nonnegative for a <= b."""
        if a > b:
            raise ValueError(f"empty interval ({a}, {b}]")
        return max(float(self.cdf(b) - self.cdf(a)), 0.0)


@dataclass(frozen=True)
class NormalSum(SumDistribution):
    mean: float
    variance: float
    kind: str = "normal"

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    def cdf(self, x):
        return ndtr((np.asarray(x, dtype=np.float64) - self.mean) / self.sd)

    def pdf(self, x):
        z = (np.asarray(x, dtype=np.float64) - self.mean) / self.sd
        return np.exp(-0.5 * z * z) / (self.sd * math.sqrt(2 * math.pi))


@dataclass(frozen=True)
class DegenerateSum(SumDistribution):
    """Point mass; the k = n subset sum, or any zero-variance case."""

    atom: float
    kind: str = "degenerate"

    @property
    def mean(self) -> float:  # type: ignore[override]
        return self.atom

    @property
    def variance(self) -> float:  # type: ignore[override]
        return 0.0

    def cdf(self, x):
        return np.where(np.asarray(x, dtype=np.float64) >= self.atom, 1.0, 0.0)


@dataclass(frozen=True)
class IrwinHallSum(SumDistribution):
    """Sum of k i.i.d. uniforms on [low, high] (rescaled Irwin-Hall)."""

    k: int
    low: float
    high: float
    kind: str = "irwin_hall"

    @property
    def mean(self) -> float:  # type: ignore[override]
        return self.k * (self.low + self.high) / 2.0

    @property
    def variance(self) -> float:  # type: ignore[override]
        return self.k * (self.high - self.low) ** 2 / 12.0

    def _standardize(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.k * self.low) / (self.high - self.low)

    def cdf(self, x):
        if self.k > IRWIN_HALL_EXACT_MAX_K:
            return NormalSum(self.mean, self.variance).cdf(x)
        u = np.atleast_1d(self._standardize(x))
        out = np.empty_like(u)
        for i, ui in enumerate(u):
            out[i] = _irwin_hall_cdf_std(ui, self.k)
        return out if np.ndim(x) else float(out[0])

    def pdf(self, x):
        if self.k > IRWIN_HALL_EXACT_MAX_K:
            return NormalSum(self.mean, self.variance).pdf(x)
        u = np.atleast_1d(self._standardize(x))
        out = np.empty_like(u)
        for i, ui in enumerate(u):
            out[i] = _irwin_hall_pdf_std(ui, self.k) / (self.high - self.low)
        return out if np.ndim(x) else float(out[0])


def _irwin_hall_cdf_std(u: float, k: int) -> float:
    # F(u) = (1/k!) * sum_j (-1)^j C(k,j) (u-j)^k over j <= floor(u)
    if u <= 0.0:
        return 0.0
    if u >= k:
        return 1.0
    terms = [
        (-1.0) ** j * math.comb(k, j) * (u - j) ** k for j in range(int(math.floor(u)) + 1)
    ]
    val = math.fsum(terms) / math.factorial(k)
    return min(max(val, 0.0), 1.0)


def _irwin_hall_pdf_std(u: float, k: int) -> float:
    if u <= 0.0 or u >= k:
        return 0.0
    if k == 1:
        return 1.0
    terms = [
        (-1.0) ** j * math.comb(k, j) * (u - j) ** (k - 1)
        for j in range(int(math.floor(u)) + 1)
    ]
    return max(math.fsum(terms) / math.factorial(k - 1), 0.0)


@dataclass(frozen=True)
class ChiSquareSum(SumDistribution):
    """Sum of k i.i.d. chi-square(df) variables: chi-square with k*df dof."""

    k: int
    df: float
    kind: str = "chi_square_sum"

    @property
    def dof(self) -> float:
        return self.k * self.df

    @property
    def mean(self) -> float:  # type: ignore[override]
        return self.dof

    @property
    def variance(self) -> float:  # type: ignore[override]
        return 2.0 * self.dof

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return gammainc(self.dof / 2.0, np.maximum(x, 0.0) / 2.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        a = self.dof / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            logpdf = (a - 1) * np.log(x) - x / 2.0 - a * math.log(2.0) - gammaln(a)
        return np.where(x > 0, np.exp(logpdf), 0.0)


def normal_sum_approx(stats: SetStatistics, k: int) -> SumDistribution:
    """Normal approximation of the size-k subset sum with corrected variance.

    Mean and variance come from the exact subset-sum moment formulas; a
    zero variance (k = n, or a constant set) yields the degenerate kind.
    """
    mean = subset_sum_mean(stats, k)
    var = subset_sum_variance(stats, k)
    if var <= 0.0:
        return DegenerateSum(atom=mean)
    return NormalSum(mean=mean, variance=var)


def irwin_hall_sum(k: int, low: float, high: float) -> IrwinHallSum:
    """Distribution of the sum of k i.i.d. uniforms on [low, high]."""
    if not k >= 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not low < high:
        raise ValueError(f"need low < high, got [{low}, {high}]")
    return IrwinHallSum(k=k, low=low, high=high)


def chi_square_sum(k: int, df: float) -> ChiSquareSum:
    """Distribution of the sum of k i.i.d. chi-square(df) variables."""
    if not k >= 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not df > 0:
        raise ValueError(f"df must be > 0, got {df}")
    return ChiSquareSum(k=k, df=float(df))


@dataclass(frozen=True)
class BerryEsseenTerms:
    """Terms of the finite-population Berry-Esseen bound, sans the absolute constant.

    The observed values are treated as degenerate random variables and
    standardized to zero mean and unit second moment, after which
    ``b = q`` and the remaining terms reduce to the third-moment
    aggregate. ``bound_over_c`` is ``min(delta1, delta2 + 1/sqrt(k*q))``
    with the ``1/0 = +inf`` convention, so ``q = 0`` (k = n) yields the
    delta1 branch, which is itself infinite there.
    """

    p: float
    q: float
    b: float
    delta1: float
    delta2: float
    bound_over_c: float


def _be_terms_from_aggregates(
    m2: float, abs3: float, k: int, n: int
) -> BerryEsseenTerms:
    # After standardization m2 is 1 up to rounding, so b = 1 - p*m2 = q; the
    # standardized third moment feeds every remaining term (degenerate
    # variables make E|x - p E(x)|^3 collapse to |x|^3 q^3).
    p = k / n
    q = 1.0 - p
    b = 1.0 - p * m2
    if q == 0.0:
        return BerryEsseenTerms(
            p=p, q=q, b=max(b, 0.0), delta1=math.inf, delta2=math.inf,
            bound_over_c=math.inf,
        )
    if b <= 0.0:
        raise ValueError("bound undefined for this input: b <= 0 after standardization")
    delta1 = abs3 / (math.sqrt(k) * b**1.5)
    delta2 = abs3 / math.sqrt(n * b) + abs3 * q**3 / (math.sqrt(n) * b**1.5)
    branch = delta2 + 1.0 / math.sqrt(k * q)
    return BerryEsseenTerms(
        p=p, q=q, b=b, delta1=delta1, delta2=delta2, bound_over_c=min(delta1, branch)
    )


def _standardized_be_aggregates(values) -> tuple[int, float, float]:
    stats = set_statistics(values)
    if stats.variance <= 0.0:
        raise ValueError("bound undefined for this input: set variance is zero")
    z = (np.asarray(values, dtype=np.float64).reshape(-1) - stats.mean) / math.sqrt(
        stats.variance
    )
    return stats.n, float(np.mean(z * z)), float(np.mean(np.abs(z) ** 3))


def berry_esseen_terms(values, k: int) -> BerryEsseenTerms:
    """Evaluate the Berry-Esseen diagnostic for drawing k of the given values.

    Raises
    ------
    ValueError
        If the set has zero variance (no normal limit exists, and the
        standardization that the bound's terms assume is undefined).
    """
    n, m2, abs3 = _standardized_be_aggregates(values)
    if not 1 <= k <= n:
        raise ValueError(f"subset size k={k} out of range 1..{n}")
    return _be_terms_from_aggregates(m2, abs3, k, n)


def probability_query(
    dist,
    target: float,
    relation: str,
    granularity: float = 0.0,
) -> float:
    """P(sum {=, >=, <=} target) under an approximating distribution.

    ``granularity`` is the value spacing of the underlying discrete data
    (e.g. 1 for integer sets) and widens the query to the window
    ``(target - g/2, target + g/2]`` as a continuity correction. It is
    required for ``eq`` on continuous kinds (an exact continuous sum has
    probability 0) and ignored for the degenerate kind, whose atom is
    compared to the target directly. Works for any object with a
    ``cdf``; a kernel density model qualifies.
    """
    if relation not in ("eq", "ge", "le"):
        raise ValueError(f"relation must be one of ('eq', 'ge', 'le'), got {relation!r}")
    if granularity < 0:
        raise ValueError(f"granularity must be >= 0, got {granularity}")

    if getattr(dist, "kind", None) == "degenerate":
        atom = dist.atom
        if relation == "eq":
            return 1.0 if atom == target else 0.0
        if relation == "ge":
            return 1.0 if atom >= target else 0.0
        return 1.0 if atom <= target else 0.0

    g = granularity
    if relation == "eq":
        if g == 0.0:
            raise ValueError(
                "eq query on a continuous distribution needs granularity > 0; "
                "an exact continuous sum has probability 0"
            )
        return float(np.clip(dist.cdf(target + g / 2) - dist.cdf(target - g / 2), 0.0, 1.0))
    if relation == "ge":
        return float(np.clip(1.0 - dist.cdf(target - g / 2), 0.0, 1.0))
    return float(np.clip(dist.cdf(target + g / 2), 0.0, 1.0))
