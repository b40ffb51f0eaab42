"""Preference graphs, maximum B-matchings and alternating-path reachability.

A B-matching lets buyer ``i`` take up to ``capacity[i]`` items and each item
go to at most one buyer.  All routines are deterministic: buyers are
processed by ascending id and their neighbours by ascending item id.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .instance import MarketState, Split, classify_buyers
from .prices import AugPrice, Number


@dataclass(frozen=True)
class PrefGraph:
    capacity: Mapping[int, int]
    adjacency: Mapping[int, tuple[int, ...]]
    items: tuple[int, ...]
    price: AugPrice | None = None

    @classmethod
    def from_edges(
        cls,
        capacity: Mapping[int, int],
        edges: Iterable[tuple[int, int]],
        items: Iterable[int] | None = None,
        price: AugPrice | None = None,
    ) -> "PrefGraph":
        adj: dict[int, set[int]] = {i: set() for i in capacity}
        all_items = set(items) if items is not None else set()
        for i, j in edges:
            if i not in adj:
                raise ValueError(f"edge {(i, j)} has unknown buyer")
            adj[i].add(j)
            all_items.add(j)
        return cls(
            dict(sorted(capacity.items())),
            {i: tuple(sorted(js)) for i, js in sorted(adj.items())},
            tuple(sorted(all_items)),
            price,
        )

    @property
    def buyers(self) -> tuple[int, ...]:
        return tuple(self.capacity)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, js in self.adjacency.items() for j in js]

    def neighbours(self, item: int) -> list[int]:
        return [i for i, js in self.adjacency.items() if item in js]


@dataclass
class BMatching:
    owner: dict[int, int] = field(default_factory=dict)  # item -> buyer

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(i, j) for j, i in self.owner.items()}

    @property
    def size(self) -> int:
        return len(self.owner)

    def __len__(self) -> int:
        return len(self.owner)

    def items_of(self, buyer: int) -> set[int]:
        return {j for j, i in self.owner.items() if i == buyer}

    def per_buyer_count(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for i in self.owner.values():
            out[i] = out.get(i, 0) + 1
        return out

    def matched_items(self) -> set[int]:
        return set(self.owner)

    def restricted_to(self, buyers: Iterable[int]) -> "BMatching":
        keep = set(buyers)
        return BMatching({j: i for j, i in self.owner.items() if i in keep})

    def is_valid(self, g: PrefGraph) -> bool:
        counts = self.per_buyer_count()
        for j, i in self.owner.items():
            if i not in g.capacity or j not in g.adjacency[i]:
                return False
        return all(c <= g.capacity[i] for i, c in counts.items())


def build_graph(
    state: MarketState,
    price: AugPrice | Number,
    buyer_filter: str = "I",
    mode: Split = Split.VALUATION,
    among: Iterable[int] | None = None,
) -> PrefGraph:
    """Preference graph over unsold items at ``price``.

    ``buyer_filter="I"`` keeps every buyer with positive demand, ``"A"``
    only those strictly above the price (valuation or budget per ``mode``).
    """
    price = AugPrice.of(price)
    if price <= 0:
        raise ValueError("price must be positive")
    inst = state.instance
    pool = range(inst.n) if among is None else sorted(set(among))
    if buyer_filter == "I":
        selected = [i for i in pool if state.demand(i, price) > 0]
    elif buyer_filter == "A":
        strict, _ = classify_buyers(inst, price, state, mode, among=pool)
        selected = sorted(strict)
    else:
        raise ValueError(f"unknown buyer filter {buyer_filter!r}")
    capacity = {i: state.demand(i, price) for i in selected}
    adjacency = {i: tuple(sorted(state.available(i))) for i in selected}
    if among is None:
        items = tuple(sorted(state.remaining_items))
    else:
        items = tuple(sorted(set().union(*(state.available(i) for i in pool))))
    return PrefGraph(capacity, adjacency, items, price)


def _augment(root: int, g: PrefGraph, owner: dict[int, int], allowed: set[int] | None) -> bool:
    """BFS for an alternating path from ``root`` to a free item; flip it if found."""
    reached_item: dict[int, int] = {}  # item -> buyer that reached it by a non-matching edge
    reached_via: dict[int, int | None] = {root: None}  # buyer -> matched item it was reached through
    queue = deque([root])
    while queue:
        y = queue.popleft()
        for x in g.adjacency[y]:
            if allowed is not None and x not in allowed:
                continue
            if x in reached_item or owner.get(x) == y:
                continue
            reached_item[x] = y
            z = owner.get(x)
            if z is None:
                item = x
                while True:
                    buyer = reached_item[item]
                    prev = reached_via[buyer]
                    owner[item] = buyer
                    if prev is None:
                        return True
                    item = prev
            if z not in reached_via:
                reached_via[z] = x
                queue.append(z)
    return False


def _fill(g: PrefGraph, owner: dict[int, int], allowed: set[int] | None = None) -> None:
    counts: dict[int, int] = {}
    for i in owner.values():
        counts[i] = counts.get(i, 0) + 1
    progress = True
    while progress:
        progress = False
        for i in g.capacity:
            while counts.get(i, 0) < g.capacity[i] and _augment(i, g, owner, allowed):
                counts[i] = counts.get(i, 0) + 1
                progress = True


def _seed(g: PrefGraph, start: BMatching | None) -> dict[int, int]:
    if start is None:
        return {}
    owner: dict[int, int] = {}
    counts: dict[int, int] = {}
    for j, i in sorted(start.owner.items()):
        if i in g.capacity and j in g.adjacency[i] and counts.get(i, 0) < g.capacity[i]:
            owner[j] = i
            counts[i] = counts.get(i, 0) + 1
    return owner


def max_bmatching(g: PrefGraph, start: BMatching | None = None) -> BMatching:
    """Maximum-cardinality B-matching by repeated augmenting paths.

    ``start`` seeds the search; the edges of it valid in ``g`` stay matched
    items (augmenting never unmatches an item).
    """
    owner = _seed(g, start)
    _fill(g, owner)
    return BMatching(owner)


def max_bmatching_min_marked(
    g: PrefGraph, marked_items: Iterable[int], start: BMatching | None = None
) -> BMatching:
    """Maximum B-matching using as few ``marked_items`` as possible.

    First saturate the unmarked items, then augment on the full graph.
    Augmenting paths never unmatch an item, so the unmarked count stays at
    its maximum while the cardinality becomes maximum; the number of
    matched marked items is then the minimum possible.  A ``start`` matching
    should already cover every unmarked item it can; the seeded edges are
    kept matched.
    """
    marked = set(marked_items)
    owner = _seed(g, start)
    _fill(g, owner, allowed=set(g.items) - marked)
    _fill(g, owner)
    return BMatching(owner)


def reachable_buyers(g: PrefGraph, m: BMatching, targets: Iterable[int]) -> set[int]:
    """Buyers joined to some target item by an alternating path.

    The path runs buyer -> (non-matching edge) -> item -> (matching edge)
    -> buyer ... and ends at a target; we search it backwards from the
    targets.
    """
    targets = set(targets)
    for t in targets:
        if t in m.owner:
            raise ValueError(f"target item {t} is matched")
    by_item: dict[int, list[int]] = {}
    for i, js in g.adjacency.items():
        for j in js:
            by_item.setdefault(j, []).append(i)
    matched: dict[int, list[int]] = {}
    for j, i in sorted(m.owner.items()):
        matched.setdefault(i, []).append(j)

    seen_items = set(targets)
    found: set[int] = set()
    queue = deque(sorted(targets))
    while queue:
        x = queue.popleft()
        for y in by_item.get(x, ()):
            if m.owner.get(x) == y or y in found:
                continue
            found.add(y)
            for z in matched.get(y, ()):
                if z not in seen_items:
                    seen_items.add(z)
                    queue.append(z)
    return found


def alternating_path(
    g: PrefGraph, m: BMatching, buyer: int, targets: Iterable[int]
) -> list[int] | None:
    """An alternating path ``[y1, z1, ..., yh, zh]`` from ``buyer`` to a target item."""
    targets = set(targets)
    parent: dict[tuple[str, int], tuple[str, int] | None] = {("b", buyer): None}
    queue = deque([buyer])
    while queue:
        y = queue.popleft()
        for x in g.adjacency.get(y, ()):
            if m.owner.get(x) == y or ("i", x) in parent:
                continue
            parent[("i", x)] = ("b", y)
            if x in targets and x not in m.owner:
                path: list[int] = []
                node: tuple[str, int] | None = ("i", x)
                while node is not None:
                    path.append(node[1])
                    node = parent[node]
                return path[::-1]
            z = m.owner.get(x)
            if z is not None and ("b", z) not in parent:
                parent[("b", z)] = ("i", x)
                queue.append(z)
    return None


def flip_path(m: BMatching, path: list[int]) -> BMatching:
    """Matching obtained by augmenting ``m`` along ``path``."""
    owner = dict(m.owner)
    for k in range(0, len(path), 2):
        owner[path[k + 1]] = path[k]
    return BMatching(owner)
