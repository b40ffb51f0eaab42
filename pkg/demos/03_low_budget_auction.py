"""
The low-budget auction, and a market where it sells nothing
===========================================================

When every budget is below the valuation, buyers are limited by money rather
than value.  The auction groups buyers that compete for items and, at each
critical price, either sells just above the price or gives one item each.
"""

from fractions import Fraction

from efmarket import Instance, gen_random_instance, optimal_ef_revenue, run_auction_lb, verify_outcome
from efmarket.invariants import check_ignored_buyers

market = gen_random_instance(5, 5, "LowBudget", seed=11)
outcome = run_auction_lb(market)
print("revenue:", outcome.revenue(), "| optimum:", optimal_ef_revenue(market).optimal_revenue)
print("pairwise envy-free:", verify_outcome(market, outcome, "pairwise").passed)
print("branch per buyer:", outcome.info["classes"])

# %%
# Two buyers want item 0 only, a third wants items 0 and 1.  Everyone values
# items at 3/2 and can spend 1.  At price 1 there is no way to give each buyer
# one item, and above 1 nobody can pay, so nothing is sold.
trap = Instance.build(2, [(Fraction(3, 2), 1, [0]), (Fraction(3, 2), 1, [0]), (Fraction(3, 2), 1, [0, 1])])
out = run_auction_lb(trap)
best = optimal_ef_revenue(trap)
print("\nauction revenue:", out.revenue())
print("optimal envy-free revenue:", best.optimal_revenue,
      "with allocation", [sorted(x) for x in best.witness_allocation])

# %%
# The optimum sells item 1 to the third buyer at 1: the other two cannot
# afford to envy a payment of 1 for an item they do not want.  The
# ignored-buyer check spots the buyer the auction should have served.
for msg in check_ignored_buyers(trap, out):
    print(msg)
