"""Ascending bundle-price auction for markets where every budget is below the valuation.

Buyers are split by budget: strictly above the current price, or exactly
at it.  At a critical price the buyers joined by alternating paths to the
items left unmatched just above the price, together with the boundary
buyers, are grouped into item-disjoint components; each component is
served by comparing the budget mass of its fresh boundary buyers with that
of its alternating-path buyers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .instance import Instance, MarketState, Split, classify_buyers
from .market import (
    InvariantError,
    RegimeError,
    component_items,
    demanded_items,
    market_components,
    next_critical_price,
)
from .matching import BMatching, PrefGraph, build_graph, max_bmatching, reachable_buyers
from .outcome import Event, Outcome, outcome_from_state
from .prices import AugPrice

MASS_LIGHT = "I1"  # boundary mass below alternating-path mass: sell above the price
ONE_EACH = "I2"  # one item each to every fresh buyer of the component, at the price
ONE_EACH_FAILED = "I3"  # no such matching: sell above the price


def partition_components(buyers: Iterable[int], state: MarketState) -> list[list[int]]:
    """Connected components of ``buyers`` linked by shared unsold preferred items."""
    buyers = sorted(set(buyers))
    parent = {i: i for i in buyers}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    holder: dict[int, int] = {}
    for i in buyers:
        for j in sorted(state.available(i)):
            if j in holder:
                a, b = find(holder[j]), find(i)
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                holder[j] = i
    groups: dict[int, list[int]] = {}
    for i in buyers:
        groups.setdefault(find(i), []).append(i)
    return [g for _, g in sorted(groups.items())]


def one_item_each_matching(
    buyers: Iterable[int],
    state: MarketState,
    price: Fraction | AugPrice,
    pool: set[int] | None = None,
) -> BMatching | None:
    """A matching giving every buyer exactly one unsold preferred item, if one exists.

    ``pool`` optionally restricts the items that may be used.
    """
    buyers = sorted(set(buyers))
    g = PrefGraph.from_edges(
        {i: 1 for i in buyers},
        [(i, j) for i in buyers for j in sorted(state.available(i)) if pool is None or j in pool],
        price=AugPrice.of(price),
    )
    m = max_bmatching(g)
    return m if m.size == len(buyers) else None


def _mass(state: MarketState, buyers: Iterable[int]) -> AugPrice:
    return sum((state.budgets[i] for i in buyers), AugPrice(Fraction(0)))


def _event(state: MarketState, p: Fraction, among: tuple[int, ...], served: set[int],
           classes: dict[int, str]) -> list[Event]:
    price, above = AugPrice(p), AugPrice.right_of(p)
    strict, boundary = classify_buyers(state.instance, price, state, Split.BUDGET, among)
    Q = boundary & set(among)
    items = demanded_items(state, price, among)

    g = build_graph(state, above, "I", among=among)
    mg = max_bmatching(g)
    jbar = items - mg.matched_items()
    nbuyers = reachable_buyers(g, mg, jbar)
    demand_at = {i: (state.demand(i, price), state.demand(i, above)) for i in among}

    events = []
    for t, group in enumerate(partition_components(nbuyers | Q, state)):
        ys = set(group)
        fresh_q = (ys & Q) - served
        ys_n = ys & nbuyers
        q_mass, n_mass = _mass(state, fresh_q), _mass(state, ys_n)
        group_items = component_items(state, ys)
        info = {
            "component": t,
            "Y": sorted(ys),
            "Q": sorted(ys & Q),
            "N": sorted(ys_n),
            "served_before": sorted(ys & served),
            "items": sorted(group_items),
            "Jbar": sorted(jbar & group_items),
            "q_mass": q_mass,
            "n_mass": n_mass,
            "budget_before": {i: state.budgets[i] for i in sorted(ys)},
            "demand": {i: list(demand_at[i]) for i in sorted(among)},
        }
        one_each = None
        if q_mass < n_mass:
            branch = MASS_LIGHT
        else:
            # items held just above the price by buyers outside the group stay with them
            held = {j for j, i in mg.owner.items() if i not in ys}
            one_each = one_item_each_matching(ys - served, state, price, group_items - held)
            branch = ONE_EACH if one_each is not None else ONE_EACH_FAILED
        fresh = sorted(i for i in (ys & (Q | nbuyers)) - served if i not in classes)
        for i in fresh:
            classes[i] = branch
        info["classified"] = fresh
        if branch == ONE_EACH:
            sales = sorted((i, j, price) for j, i in one_each.owner.items())  # type: ignore[union-attr]
            removed: list[int] = []
        else:
            sales = sorted((i, j, above) for j, i in mg.restricted_to(ys_n).owner.items())
            removed = sorted(jbar & group_items)
        for i, j, c in sales:
            state.sell(i, j, c)
            served.add(i)
        for j in removed:
            state.remove(j, above)
        events.append(Event(p, branch, sales, removed, above if removed else None, info))

    stale = component_items(state, among) - demanded_items(state, above, among)
    if stale:
        for j in sorted(stale):
            state.remove(j, above)
        events.append(Event(p, "withdraw", [], sorted(stale), above, {}))
    return events


def check_low_budget(instance: Instance) -> None:
    bad = [b.id for b in instance.buyers if not b.b < b.v]
    if bad:
        raise RegimeError(f"buyers {bad} have budget at or above valuation; low-budget auction needs b < v")


def run_auction_lb(instance: Instance) -> Outcome:
    """Run the low-budget auction; payments are bundle prices (no item price map)."""
    check_low_budget(instance)
    state = MarketState(instance)
    trace: list[Event] = []
    served: set[int] = set()
    classes: dict[int, str] = {}
    for comp in market_components(instance):
        start: Fraction | None = None
        inclusive = False
        while True:
            p = next_critical_price(state, start, inclusive, comp)
            if p is None:
                break
            events = _event(state, p, comp, served, classes)
            trace.extend(events)
            progressed = any(e.sales or e.removed for e in events)
            if not progressed:
                trace.append(Event(p, "stall", [], [], None, {}))
            start, inclusive = p, progressed
    trace.sort(key=lambda e: e.price)
    out = outcome_from_state(state, trace, "lb", item_prices=False)
    out.info["classes"] = dict(sorted(classes.items()))
    return out


__all__ = [
    "run_auction_lb",
    "partition_components",
    "one_item_each_matching",
    "check_low_budget",
    "InvariantError",
    "MASS_LIGHT",
    "ONE_EACH",
    "ONE_EACH_FAILED",
]
