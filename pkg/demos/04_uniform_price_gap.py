"""
How much a single uniform price loses
=====================================

Buyer i of n has one item of its own, valued and budgeted at n / (n - i + 1).
Envy-free pricing can charge each buyer its valuation; any single price
collects only n.  The ratio is the n-th harmonic number.
"""

from efmarket.experiments import gap_report

for n in (4, 16, 64, 256, 1024):
    rep = gap_report(n)
    print(
        f"n={n:5d}  optimum {rep['decimal']['optimal']:>14}  uniform {rep['fixed_revenue']:>5}  "
        f"ratio {rep['decimal']['ratio_optimal_to_fixed']}  auction ratio {rep['decimal']['ratio_optimal_to_auction']}"
    )

# %%
# For small n the exhaustive search agrees with the closed form.
print(gap_report(4)["oracle_optimal"], "==", gap_report(4)["optimal"])
