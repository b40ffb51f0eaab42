"""
Quickstart: build a market, run an auction, check the outcome
=============================================================

A market has items and buyers.  Each buyer values every item in a
preference set at the same per-item value and can spend at most a budget.
"""

from fractions import Fraction

from efmarket import Instance, run_auction_hb, verify_outcome

# %%
# Three items, two buyers.  The first values each of its items at 4 and can
# spend 10; the second values one shared item at 3 and can spend 3.
market = Instance.build(3, [(4, 10, [0, 1, 2]), (3, 3, [2])])
print(market.dumps())
print("regime:", market.regime.value)

# %%
# Every budget covers the valuation, so the high-budget auction applies.
outcome = run_auction_hb(market)
for i, (bundle, pay) in enumerate(zip(outcome.allocation, outcome.payments)):
    print(f"buyer {i}: items {sorted(bundle)} for {pay}")

# %%
# Payments may carry a symbolic epsilon ("+eps"): the item was sold just above
# a critical price.  Revenue is reported in the limit, or at a concrete epsilon.
print("limit revenue:", outcome.revenue())
print("revenue at eps=1/1000:", outcome.revenue_at(Fraction(1, 1000)))

# %%
# The verifiers re-check feasibility, individual rationality and envy-freeness
# with their own code.
report = verify_outcome(market, outcome)
print("verified:", report.passed, "| envy-freeness checked with", report.ef_kind, "prices")

# %%
# The trace records each critical price and what was sold there.
for event in outcome.trace:
    print(event.price, event.procedure, [(i, j, str(c)) for i, j, c in event.sales])
