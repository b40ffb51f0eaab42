"""Auction outcomes and their event traces."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .prices import AugPrice, Number


@dataclass
class Event:
    """One selling step at a critical price.

    ``sales`` holds ``(buyer, item, charge)`` triples; ``removed`` the items
    withdrawn from the market at ``removal_price``.  ``info`` carries the
    sets the step was computed from, for invariant checking.
    """

    price: Fraction
    procedure: str
    sales: list[tuple[int, int, AugPrice]] = field(default_factory=list)
    removed: list[int] = field(default_factory=list)
    removal_price: AugPrice | None = None
    info: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "price": str(self.price),
            "procedure": self.procedure,
            "sales": [[i, j, c.to_json()] for i, j, c in self.sales],
            "removed": sorted(self.removed),
            "removal_price": None if self.removal_price is None else self.removal_price.to_json(),
            "info": _jsonable(self.info),
        }


def _jsonable(x: Any) -> Any:
    if isinstance(x, AugPrice):
        return x.to_json()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass
class Outcome:
    allocation: list[frozenset[int]]
    payments: list[AugPrice]
    item_prices: dict[int, AugPrice] | None
    removed: dict[int, AugPrice]
    trace: list[Event]
    algorithm: str = ""
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.allocation)

    def revenue(self) -> Fraction:
        """Revenue in the limit of a vanishing infinitesimal."""
        return sum((p.base for p in self.payments), Fraction(0))

    def revenue_aug(self) -> AugPrice:
        return sum(self.payments, AugPrice(Fraction(0)))

    def revenue_at(self, epsilon: Number) -> Fraction:
        return self.revenue_aug().value(epsilon)

    def mean_price(self, i: int) -> AugPrice | None:
        """Per-item price ``p_i / |X_i|``; only the base is divided exactly."""
        if not self.allocation[i]:
            return None
        k = len(self.allocation[i])
        p = self.payments[i]
        if p.eps % k:
            raise ValueError("per-item price is not a whole multiple of eps")
        return AugPrice(p.base / k, p.eps // k)

    def at_epsilon(self, epsilon: Number) -> "Outcome":
        """The same outcome with the infinitesimal replaced by ``epsilon``."""

        def fix(p: AugPrice) -> AugPrice:
            return AugPrice(p.value(epsilon))

        return Outcome(
            list(self.allocation),
            [fix(p) for p in self.payments],
            None if self.item_prices is None else {j: fix(p) for j, p in self.item_prices.items()},
            {j: fix(p) for j, p in self.removed.items()},
            self.trace,
            self.algorithm,
            dict(self.info),
        )

    def sold_items(self) -> dict[int, int]:
        return {j: i for i, xs in enumerate(self.allocation) for j in xs}

    def to_json(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "revenue": str(self.revenue()),
            "revenue_with_eps": self.revenue_aug().to_json(),
            "allocation": [sorted(x) for x in self.allocation],
            "payments": [p.to_json() for p in self.payments],
            "item_prices": None
            if self.item_prices is None
            else {str(j): p.to_json() for j, p in sorted(self.item_prices.items())},
            "removed": {str(j): p.to_json() for j, p in sorted(self.removed.items())},
            "trace": [e.to_json() for e in self.trace],
            "info": _jsonable(self.info),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, obj: dict) -> "Outcome":
        prices = obj.get("item_prices")
        trace = []
        for e in obj.get("trace", []):
            rp = e.get("removal_price")
            trace.append(
                Event(
                    Fraction(e["price"]),
                    e["procedure"],
                    [(int(i), int(j), AugPrice.from_json(c)) for i, j, c in e.get("sales", [])],
                    list(e.get("removed", [])),
                    None if rp is None else AugPrice.from_json(rp),
                    e.get("info", {}),
                )
            )
        return cls(
            [frozenset(int(j) for j in x) for x in obj["allocation"]],
            [AugPrice.from_json(p) for p in obj["payments"]],
            None if prices is None else {int(j): AugPrice.from_json(p) for j, p in prices.items()},
            {int(j): AugPrice.from_json(p) for j, p in obj.get("removed", {}).items()},
            trace,
            obj.get("algorithm", ""),
            obj.get("info", {}),
        )


def outcome_from_state(state, trace: list[Event], algorithm: str, item_prices: bool) -> Outcome:
    return Outcome(
        [frozenset(x) for x in state.allocation],
        list(state.payments),
        dict(state.charges) if item_prices else None,
        dict(state.removed),
        trace,
        algorithm,
    )
