"""Envy-free pricing in matching markets with budgets.

Two ascending-price auctions (one for budgets at or above valuations, one for
budgets below), independent verifiers, trace invariant checks and an
exhaustive optimal-revenue oracle for small markets.  All arithmetic is exact.
"""

from .auction_hb import run_auction_hb
from .auction_lb import run_auction_lb
from .instance import (
    Buyer,
    Instance,
    InstanceError,
    MarketState,
    Regime,
    demand,
    gen_lower_bound_instance,
    gen_random_instance,
    iter_small_instances,
)
from .invariants import check_trace
from .market import InvariantError, RegimeError
from .matching import BMatching, PrefGraph, max_bmatching, max_bmatching_min_marked
from .oracle import OracleResult, SizeCapError, best_fixed_price, optimal_ef_revenue
from .outcome import Event, Outcome
from .prices import AugPrice, parse_rational
from .verify import check_item_price_ef, check_pairwise_ef, verify_outcome

__all__ = [
    "AugPrice",
    "BMatching",
    "Buyer",
    "Event",
    "Instance",
    "InstanceError",
    "InvariantError",
    "MarketState",
    "OracleResult",
    "Outcome",
    "PrefGraph",
    "Regime",
    "RegimeError",
    "SizeCapError",
    "best_fixed_price",
    "check_item_price_ef",
    "check_pairwise_ef",
    "check_trace",
    "demand",
    "gen_lower_bound_instance",
    "gen_random_instance",
    "iter_small_instances",
    "max_bmatching",
    "max_bmatching_min_marked",
    "optimal_ef_revenue",
    "parse_rational",
    "run_auction_hb",
    "run_auction_lb",
    "verify_outcome",
]
