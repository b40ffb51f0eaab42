"""Market instances, demand functions, market state and instance generators."""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .prices import AugPrice, Number, parse_rational


class Regime(str, enum.Enum):
    HIGH_BUDGET = "HighBudget"  # every b_i >= v_i
    LOW_BUDGET = "LowBudget"  # every b_i < v_i
    MIXED = "Mixed"


class Split(str, enum.Enum):
    """Which buyer attribute separates the strict set from the boundary set."""

    VALUATION = "valuation"
    BUDGET = "budget"


class InstanceError(ValueError):
    """Malformed instance data."""


@dataclass(frozen=True)
class Buyer:
    id: int
    valuation: Fraction
    budget: AugPrice
    preference_set: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "valuation", Fraction(self.valuation))
        object.__setattr__(self, "budget", AugPrice.of(self.budget))
        object.__setattr__(self, "preference_set", frozenset(self.preference_set))
        if self.valuation <= 0:
            raise InstanceError(f"buyer {self.id}: valuation must be positive")
        if self.budget.eps != 0 or self.budget.base < 0:
            raise InstanceError(f"buyer {self.id}: budget must be a nonnegative rational")
        if not self.preference_set:
            raise InstanceError(f"buyer {self.id}: empty preference set")

    @property
    def b(self) -> Fraction:
        return self.budget.base

    @property
    def v(self) -> Fraction:
        return self.valuation


def detect_regime(buyers: Sequence[Buyer]) -> Regime:
    if all(b.b >= b.v for b in buyers):
        return Regime.HIGH_BUDGET
    if all(b.b < b.v for b in buyers):
        return Regime.LOW_BUDGET
    return Regime.MIXED


@dataclass(frozen=True)
class Instance:
    buyers: tuple[Buyer, ...]
    item_count: int
    regime: Regime = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        buyers = tuple(self.buyers)
        object.__setattr__(self, "buyers", buyers)
        if self.item_count < 0:
            raise InstanceError("item_count must be nonnegative")
        for k, b in enumerate(buyers):
            if b.id != k:
                raise InstanceError(f"buyer ids must be 0..n-1, got {b.id} at position {k}")
            bad = [j for j in b.preference_set if not 0 <= j < self.item_count]
            if bad:
                raise InstanceError(f"buyer {k}: items {sorted(bad)} out of range")
        actual = detect_regime(buyers)
        if self.regime is None:
            object.__setattr__(self, "regime", actual)
        elif Regime(self.regime) != actual:
            raise InstanceError(f"declared regime {Regime(self.regime).value} but data is {actual.value}")
        else:
            object.__setattr__(self, "regime", Regime(self.regime))

    @classmethod
    def build(
        cls,
        m: int,
        buyers: Iterable[tuple[Number | str, Number | str, Iterable[int]]],
        regime: Regime | str | None = None,
    ) -> "Instance":
        """Build from ``(v, b, S)`` triples; numbers may be rational strings."""
        bs = []
        for k, (v, b, s) in enumerate(buyers):
            v = parse_rational(v) if isinstance(v, str) else Fraction(v)
            b = parse_rational(b) if isinstance(b, str) else Fraction(b)
            bs.append(Buyer(k, v, AugPrice(b), frozenset(s)))
        return cls(tuple(bs), m, Regime(regime) if regime is not None else None)

    @property
    def n(self) -> int:
        return len(self.buyers)

    @property
    def m(self) -> int:
        return self.item_count

    @property
    def items(self) -> range:
        return range(self.item_count)

    def to_json(self) -> dict:
        return {
            "m": self.item_count,
            "buyers": [
                {"v": str(b.v), "b": str(b.b), "S": sorted(b.preference_set)} for b in self.buyers
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: Mapping) -> "Instance":
        try:
            m = obj["m"]
            if not isinstance(m, int) or isinstance(m, bool):
                raise InstanceError("'m' must be an integer")
            triples = []
            for rec in obj["buyers"]:
                s = rec["S"]
                if not all(isinstance(j, int) and not isinstance(j, bool) for j in s):
                    raise InstanceError("preference sets must contain integers")
                triples.append((_num(rec["v"]), _num(rec["b"]), s))
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed instance: {exc}") from exc
        try:
            return cls.build(m, triples)
        except ValueError as exc:
            raise InstanceError(str(exc)) from exc

    @classmethod
    def loads(cls, text: str) -> "Instance":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid JSON: {exc}") from exc
        return cls.from_json(obj)


def _num(x) -> Fraction:
    if isinstance(x, float):
        raise InstanceError(f"floats are not accepted: {x!r}")
    try:
        return parse_rational(x)
    except ValueError as exc:
        raise InstanceError(str(exc)) from exc


def restrict_instance(instance: Instance, drop_buyers: Iterable[int] = (), drop_items: Iterable[int] = ()) -> Instance:
    """Sub-market without some buyers and items; ids are renumbered densely.

    Buyers left with no wanted item are dropped as well.
    """
    gone_b, gone_j = set(drop_buyers), set(drop_items)
    keep = [j for j in instance.items if j not in gone_j]
    relabel = {j: k for k, j in enumerate(keep)}
    triples = []
    for b in instance.buyers:
        if b.id in gone_b:
            continue
        s = sorted(relabel[j] for j in b.preference_set if j in relabel)
        if s:
            triples.append((b.valuation, b.b, s))
    return Instance.build(len(keep), triples)


# --------------------------------------------------------------------------
# market state


class MarketState:
    """Mutable state of one auction run: unsold items, remaining budgets, sales."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.remaining_items: set[int] = set(instance.items)
        self.budgets: list[AugPrice] = [b.budget for b in instance.buyers]
        self.allocation: list[set[int]] = [set() for _ in instance.buyers]
        self.payments: list[AugPrice] = [AugPrice(Fraction(0)) for _ in instance.buyers]
        self.charges: dict[int, AugPrice] = {}
        self.removed: dict[int, AugPrice] = {}

    def available(self, i: int) -> frozenset[int]:
        return self.instance.buyers[i].preference_set & self.remaining_items

    def demand(self, i: int, price: AugPrice | Number) -> int:
        return demand(self.instance.buyers[i], price, self.remaining_items, self.budgets[i])

    def sell(self, i: int, item: int, charge: AugPrice) -> None:
        if item not in self.remaining_items:
            raise RuntimeError(f"item {item} is not for sale")
        self.remaining_items.discard(item)
        self.allocation[i].add(item)
        self.payments[i] = self.payments[i] + charge
        self.budgets[i] = self.budgets[i] - charge
        self.charges[item] = charge

    def remove(self, item: int, price: AugPrice) -> None:
        self.remaining_items.discard(item)
        self.removed[item] = price


# --------------------------------------------------------------------------
# demand and buyer classes


def demand(
    buyer: Buyer,
    price: AugPrice | Number,
    remaining_prefs: Iterable[int] | None = None,
    budget: AugPrice | Number | None = None,
) -> int:
    """Utility-maximising item count for ``buyer`` at uniform ``price``.

    ``remaining_prefs`` restricts the preference cap to unsold items and
    ``budget`` overrides the buyer's initial budget with a remaining one.
    """
    price = AugPrice.of(price)
    if price <= 0:
        raise ValueError("demand is defined for positive prices only")
    if price > buyer.valuation:
        return 0
    if remaining_prefs is None:
        cap = len(buyer.preference_set)
    else:
        cap = len(buyer.preference_set & set(remaining_prefs))
    b = buyer.budget if budget is None else AugPrice.of(budget)
    if b < 0:
        return 0
    return max(0, min(b // price, cap))


def classify_buyers(
    instance: Instance,
    price: AugPrice | Number,
    state: MarketState | None = None,
    mode: Split = Split.VALUATION,
    among: Iterable[int] | None = None,
) -> tuple[set[int], set[int]]:
    """Split positive-demand buyers into strictly-above and exactly-at ``price``.

    ``among`` limits the buyers considered.
    """
    price = AugPrice.of(price)
    if price <= 0:
        raise ValueError("price must be positive")
    strict: set[int] = set()
    boundary: set[int] = set()
    buyers = instance.buyers if among is None else [instance.buyers[i] for i in sorted(set(among))]
    for b in buyers:
        if state is None:
            d = demand(b, price)
            budget = b.budget
        else:
            d = state.demand(b.id, price)
            budget = state.budgets[b.id]
        if d <= 0:
            continue
        key = AugPrice.of(b.valuation) if mode is Split.VALUATION else budget
        if key > price:
            strict.add(b.id)
        elif key == price:
            boundary.add(b.id)
    return strict, boundary


def breakpoints(instance: Instance, state: MarketState | None = None) -> list[Fraction]:
    """Prices at which some buyer's demand can change value.

    For each buyer with something left to buy: her valuation and every
    ``budget / k`` (k up to the number of preferred unsold items) not above
    the valuation.  Demands, hence matching sizes, are constant strictly
    between consecutive breakpoints.
    """
    points: set[Fraction] = set()
    for b in instance.buyers:
        if state is None:
            cap = len(b.preference_set)
            budget = b.budget.base
        else:
            cap = len(state.available(b.id))
            budget = state.budgets[b.id].base
        if cap == 0:
            continue
        points.add(b.valuation)
        if budget <= 0:
            continue
        for k in range(1, cap + 1):
            q = budget / k
            if q <= b.valuation:
                points.add(q)
    return sorted(points)


# --------------------------------------------------------------------------
# generators


def gen_lower_bound_instance(n: int) -> Instance:
    """Disjoint singleton markets with ``v_i = b_i = n / (n - i + 1)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    triples = []
    for i in range(1, n + 1):
        x = Fraction(n, n - i + 1)
        triples.append((x, x, [i - 1]))
    return Instance.build(n, triples, Regime.HIGH_BUDGET)


def iter_small_instances(
    n: int,
    m: int,
    regime: Regime | str,
    grid: Sequence[Number],
    up_to_items: bool = False,
) -> Iterator[Instance]:
    """Every instance with ``n`` buyers and ``m`` items whose valuations and
    budgets lie on ``grid``, up to relabelling of buyers.

    Buyers are listed in a canonical order, so each multiset of buyer types
    appears exactly once.  With ``up_to_items`` the enumeration is also taken
    up to relabelling of items, and markets with an item nobody wants are
    skipped (they behave like the market without that item).
    """
    regime = Regime(regime)
    values = sorted({_num(x) for x in grid})
    pairs = [
        (v, b)
        for v in values
        for b in values
        if regime is Regime.MIXED
        or (regime is Regime.HIGH_BUDGET and b >= v)
        or (regime is Regime.LOW_BUDGET and b < v)
    ]
    subsets = [s for k in range(1, m + 1) for s in itertools.combinations(range(m), k)]
    kinds = [(v, b, s) for v, b in pairs for s in subsets]
    perms = list(itertools.permutations(range(m)))
    seen: set[tuple] = set()
    for combo in itertools.combinations_with_replacement(kinds, n):
        if up_to_items:
            if len(set().union(*(s for _, _, s in combo))) < m:
                continue
            key = min(
                tuple(sorted((v, b, tuple(sorted(pi[j] for j in s))) for v, b, s in combo)) for pi in perms
            )
            if key in seen:
                continue
            seen.add(key)
        inst = Instance.build(m, [(v, b, list(s)) for v, b, s in combo])
        if regime is Regime.MIXED or inst.regime is regime:
            yield inst


DEFAULT_NUMERATORS = tuple(range(1, 21))
DEFAULT_DENOMINATORS = (1, 2, 3, 4)


def gen_random_instance(
    n: int,
    m: int,
    regime: Regime | str,
    seed: int,
    numerators: Sequence[int] = DEFAULT_NUMERATORS,
    denominators: Sequence[int] = DEFAULT_DENOMINATORS,
) -> Instance:
    """Seeded random instance over the rational grid ``numerators / denominators``."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be at least 1")
    regime = Regime(regime)
    rng = np.random.default_rng(seed)

    def draw() -> Fraction:
        return Fraction(int(rng.choice(numerators)), int(rng.choice(denominators)))

    triples = []
    for _ in range(n):
        x, y = draw(), draw()
        if regime is Regime.HIGH_BUDGET:
            v, b = min(x, y), max(x, y)
        elif regime is Regime.LOW_BUDGET:
            while x == y:
                y = draw()
            v, b = max(x, y), min(x, y)
        else:
            v, b = x, y
        size = int(rng.integers(1, m + 1))
        s = sorted(int(j) for j in rng.choice(m, size=size, replace=False))
        triples.append((v, b, s))
    inst = Instance.build(m, triples)
    if regime is not Regime.MIXED and inst.regime is not regime:
        raise AssertionError("generator produced the wrong regime")
    return inst
