"""The O(n) counting loop: approximate totals vs ground truth.

For each subset size k the pipeline models the sum of a random k-subset
with a corrected-variance normal, asks P(sum >= target), and converts
the probability into a count via round-half-even of p * C(n, k). Here we
compare against the exact answer on a set small enough to enumerate,
then run a set far beyond any exact engine.
"""

import numpy as np

from perfectsum import (
    ApproxConfig,
    SetSpec,
    approximate_perfect_sum,
    exact_perfect_sum,
    generate_set,
)

values = generate_set(SetSpec(family="discrete_uniform", n=24, seed=7, low=0, high=20))
target = round(values.sum() / 2)
print(f"n = {values.size} integers from U(0,20), target = {target}, relation >=")

exact = exact_perfect_sum(values, target, "ge")
approx = approximate_perfect_sum(values, target, ApproxConfig(method="normal", relation="ge"))
print(f"exact total  : {exact.total}")
print(f"approx total : {approx.total}")
print(f"relative err : {abs(approx.total - exact.total) / exact.total:.2e}")

print("\nper-size comparison (k, exact, approx):")
ec = exact.counts_by_k()
for k, c in approx.counts_by_k().items():
    if ec[k] or c:
        print(f"  k={k:2d}  exact={ec[k]:>9}  approx={c:>9}")

# Small strata are the normal family's weak spot; the hybrid mode counts
# them exactly and approximates the rest.
hybrid = approximate_perfect_sum(
    values, target, ApproxConfig(method="normal", relation="ge", exact_small_k=3)
)
print(f"\nhybrid total (exact k<=3): {hybrid.total}")

# Now a set size where 2^n is out of the question: one million values.
big = generate_set(SetSpec(family="discrete_uniform", n=1_000_000, seed=1, low=0, high=20))
big_target = float(big.sum() - 40 * big.mean())
report = approximate_perfect_sum(big, big_target, ApproxConfig(method="normal", relation="ge"))
digits = len(str(report.total))
print(f"\nn = 1e6, target just below the maximum sum:")
print(f"approximate count of qualifying subsets has {digits} digits")
print(f"first 40: {str(report.total)[:40]}...")
