"""Price-scan machinery shared by both ascending auctions."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .instance import Instance, MarketState, breakpoints
from .matching import build_graph, max_bmatching
from .prices import AugPrice, Number


class InvariantError(RuntimeError):
    """A property the algorithm guarantees did not hold: an implementation bug."""


class RegimeError(ValueError):
    """The instance is outside the regime an auction is defined for."""


def market_components(instance: Instance) -> list[tuple[int, ...]]:
    """Buyer groups connected through shared preferred items, ordered by smallest id."""
    parent = list(range(instance.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first_owner: dict[int, int] = {}
    for b in instance.buyers:
        for j in b.preference_set:
            if j in first_owner:
                ra, rb = find(first_owner[j]), find(b.id)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
            else:
                first_owner[j] = b.id
    groups: dict[int, list[int]] = {}
    for i in range(instance.n):
        groups.setdefault(find(i), []).append(i)
    return [tuple(g) for _, g in sorted(groups.items())]


def matching_size(state: MarketState, price: AugPrice | Number, among: Iterable[int] | None = None) -> int:
    return max_bmatching(build_graph(state, price, "I", among=among)).size


def is_critical(state: MarketState, q: Fraction, among: Iterable[int] | None = None) -> bool:
    among = None if among is None else tuple(among)
    return matching_size(state, q, among) > matching_size(state, AugPrice.right_of(q), among)


def next_critical_price(
    state: MarketState,
    start: Fraction | None = None,
    inclusive: bool = True,
    among: Iterable[int] | None = None,
) -> Fraction | None:
    """Smallest breakpoint ``q >= start`` (``> start`` unless inclusive) that is critical.

    ``start=None`` means the scan begins just above zero.
    """
    among = None if among is None else tuple(among)
    sub = state.instance if among is None else _SubInstance(state.instance, among)
    for q in breakpoints(sub, state):  # type: ignore[arg-type]
        if q <= 0:
            continue
        if start is not None and (q < start or (q == start and not inclusive)):
            continue
        if is_critical(state, q, among):
            return q
    return None


class _SubInstance:
    """View of an instance exposing only some buyers (for breakpoint scans)."""

    def __init__(self, instance: Instance, among: tuple[int, ...]):
        self.buyers = [instance.buyers[i] for i in among]


def demanded_items(state: MarketState, price: AugPrice | Number, among: Iterable[int]) -> set[int]:
    """Unsold items preferred by some buyer of ``among`` with positive demand at ``price``."""
    out: set[int] = set()
    for i in among:
        if state.demand(i, price) > 0:
            out |= state.available(i)
    return out


def component_items(state: MarketState, among: Iterable[int]) -> set[int]:
    out: set[int] = set()
    for i in among:
        out |= state.available(i)
    return out
