"""Ascending item-price auction for markets where every budget covers the valuation.

At each critical price the auction either sells at the price itself to the
buyers whose valuation equals it (plus the strictly-above buyers joined to
them by alternating paths), or sells just above the price to the buyers
whose budgets stop covering their current bundle size.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .instance import Instance, MarketState, Regime, Split, classify_buyers
from .market import (
    InvariantError,
    RegimeError,
    component_items,
    demanded_items,
    market_components,
    next_critical_price,
)
from .matching import (
    PrefGraph,
    build_graph,
    max_bmatching,
    max_bmatching_min_marked,
    reachable_buyers,
)
from .outcome import Event, Outcome, outcome_from_state
from .prices import AugPrice

ALLOCATE_AT_PRICE = "compute_allocation_I"
ALLOCATE_ABOVE_PRICE = "compute_allocation_II"


def _fail(msg: str, strict: bool, info: dict) -> None:
    if strict:
        raise InvariantError(msg)
    info.setdefault("violations", []).append(msg)


def compute_allocation_I(
    state: MarketState, p: Fraction, among: Iterable[int] | None = None, strict: bool = True
) -> Event:
    """Sell at ``p``: alternating-path buyers take their full demand, the
    items left over go to the buyers whose valuation is exactly ``p``."""
    among = tuple(range(state.instance.n)) if among is None else tuple(among)
    price = AugPrice(p)
    strict_set, boundary = classify_buyers(state.instance, price, state, Split.VALUATION, among)
    A = sorted(strict_set & set(among))
    Q = sorted(boundary & set(among))
    J_Q = set().union(*(state.available(i) for i in Q)) if Q else set()
    items = demanded_items(state, price, among)

    # Seeding with a maximum matching of the full graph keeps the items the
    # strict buyers leave over assignable to the boundary buyers; any
    # maximum matching with the fewest marked items does not guarantee that.
    full = max_bmatching(build_graph(state, price, "I", among=among))
    gbar = build_graph(state, price, "A", Split.VALUATION, among=among)
    mbar = max_bmatching_min_marked(gbar, J_Q, start=full.restricted_to(A))
    jbar = items - mbar.matched_items()
    nbuyers = reachable_buyers(gbar, mbar, jbar)
    kept = mbar.restricted_to(nbuyers)

    info: dict = {
        "A": A,
        "Q": Q,
        "J_Q": J_Q,
        "Jbar": jbar,
        "N": nbuyers,
        "demand": {i: state.demand(i, price) for i in sorted(nbuyers | set(Q))},
        "budget_before": {i: state.budgets[i] for i in sorted(nbuyers | set(Q))},
    }
    for i in sorted(nbuyers):
        got = len(kept.items_of(i))
        if got != info["demand"][i]:
            _fail(f"alternating-path buyer {i} matched {got} of demand {info['demand'][i]} at {p}", strict, info)

    qgraph = PrefGraph.from_edges(
        {i: state.demand(i, price) for i in Q},
        [(i, j) for i in Q for j in sorted(state.available(i) & jbar)],
        items=jbar,
        price=price,
    )
    qmatch = max_bmatching(qgraph)
    if qmatch.matched_items() != jbar:
        _fail(f"left-over items {sorted(jbar - qmatch.matched_items())} cannot go to boundary buyers at {p}", strict, info)

    sales = sorted(
        [(i, j, price) for j, i in kept.owner.items()] + [(i, j, price) for j, i in qmatch.owner.items()],
        key=lambda t: (t[0], t[1]),
    )
    for i, j, c in sales:
        state.sell(i, j, c)
    info["assigned_to_Q"] = sorted((i, j) for j, i in qmatch.owner.items())
    return Event(p, ALLOCATE_AT_PRICE, sales, [], None, info)


def compute_allocation_II(
    state: MarketState, p: Fraction, among: Iterable[int] | None = None, strict: bool = True
) -> Event:
    """Sell at ``p + eps`` to the buyers joined by alternating paths to the
    items a maximum matching just above ``p`` leaves unmatched; withdraw those items."""
    among = tuple(range(state.instance.n)) if among is None else tuple(among)
    above = AugPrice.right_of(p)
    items = demanded_items(state, AugPrice(p), among)

    g = build_graph(state, above, "I", among=among)
    mg = max_bmatching(g)
    jbar = items - mg.matched_items()
    nbuyers = reachable_buyers(g, mg, jbar)
    kept = mg.restricted_to(nbuyers)

    info: dict = {
        "Jbar": jbar,
        "N": nbuyers,
        "demand": {i: state.demand(i, above) for i in sorted(nbuyers)},
        "budget_before": {i: state.budgets[i] for i in sorted(nbuyers)},
    }
    for i in sorted(nbuyers):
        got = len(kept.items_of(i))
        if got != info["demand"][i]:
            _fail(f"buyer {i} matched {got} of demand {info['demand'][i]} just above {p}", strict, info)
        if state.instance.buyers[i].valuation <= p:
            _fail(f"buyer {i} sold above {p} but values items at {state.instance.buyers[i].valuation}", strict, info)
    if len(jbar) > len(nbuyers):
        _fail(f"{len(jbar)} unassigned items exceed {len(nbuyers)} alternating-path buyers at {p}", strict, info)

    sales = sorted(((i, j, above) for j, i in kept.owner.items()), key=lambda t: (t[0], t[1]))
    for i, j, c in sales:
        state.sell(i, j, c)
    for j in sorted(jbar):
        state.remove(j, above)
    # withdraw whatever nobody demands any more
    stale = component_items(state, among) - demanded_items(state, above, among)
    for j in sorted(stale):
        state.remove(j, above)
    info["pruned"] = stale
    return Event(p, ALLOCATE_ABOVE_PRICE, sales, sorted(jbar | stale), above, info)


def _run_component(state: MarketState, among: tuple[int, ...], trace: list[Event], strict: bool) -> None:
    start: Fraction | None = None
    inclusive = False
    while True:
        p = next_critical_price(state, start, inclusive, among)
        if p is None:
            return
        price = AugPrice(p)
        g = build_graph(state, price, "I", among=among)
        gbar = build_graph(state, price, "A", Split.VALUATION, among=among)
        size_g, size_gbar = max_bmatching(g).size, max_bmatching(gbar).size
        if size_g > size_gbar:
            event = compute_allocation_I(state, p, among, strict)
        else:
            event = compute_allocation_II(state, p, among, strict)
        event.info["component"] = list(among)
        event.info["matching_sizes"] = [size_g, size_gbar]
        trace.append(event)
        progressed = bool(event.sales or event.removed)
        if not progressed:
            _fail(f"no progress at critical price {p}", strict, event.info)
        start, inclusive = p, progressed


def check_high_budget(instance: Instance) -> None:
    bad = [b.id for b in instance.buyers if b.b < b.v]
    if bad:
        raise RegimeError(f"buyers {bad} have budget below valuation; high-budget auction needs b >= v")


def run_auction_hb(instance: Instance, strict: bool = True) -> Outcome:
    """Run the high-budget auction; returns an outcome with per-item prices.

    With ``strict=False`` invariant failures are recorded in the trace
    instead of raising :class:`InvariantError`.
    """
    check_high_budget(instance)
    state = MarketState(instance)
    trace: list[Event] = []
    for comp in market_components(instance):
        _run_component(state, comp, trace, strict)
    trace.sort(key=lambda e: e.price)
    return outcome_from_state(state, trace, "hb", item_prices=True)


__all__ = [
    "compute_allocation_I",
    "compute_allocation_II",
    "run_auction_hb",
    "check_high_budget",
    "Regime",
]
