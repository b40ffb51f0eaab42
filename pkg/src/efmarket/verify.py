"""Outcome verifiers: feasibility, individual rationality, envy-freeness, revenue.

These checks only read the instance and the outcome; they share no code
with the auctions.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Union

from .instance import Buyer, Instance
from .outcome import Outcome
from .prices import AugPrice


@functools.total_ordering
class _NegInf:
    """Utility of a bundle whose payment exceeds the budget; below every price."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other: object) -> bool:
        return other is self

    def __lt__(self, other: object) -> bool:
        return other is not self

    def __hash__(self) -> int:
        return hash("-inf")

    def __repr__(self) -> str:
        return "NEG_INF"

    __str__ = __repr__


NEG_INF = _NegInf()
Utility = Union[AugPrice, _NegInf]


class MalformedOutcome(ValueError):
    pass


def _cmp_ge(a: Utility, b: Utility) -> bool:
    if b is NEG_INF:
        return True
    if a is NEG_INF:
        return False
    return a >= b  # type: ignore[operator]


def utility(buyer: Buyer, bundle: Iterable[int], payment: AugPrice | Fraction | int) -> Utility:
    """``v * |bundle & S| - payment`` if affordable, else ``NEG_INF``."""
    payment = AugPrice.of(payment)
    if payment > buyer.budget:
        return NEG_INF
    k = len(buyer.preference_set & set(bundle))
    return AugPrice(buyer.valuation * k) - payment


@dataclass
class Check:
    passed: bool
    witness: dict[str, Any] | None = None

    def to_json(self) -> dict:
        return {"passed": self.passed, "witness": _plain(self.witness)}


def _plain(x: Any) -> Any:
    if isinstance(x, AugPrice):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if x is NEG_INF:
        return "-inf"
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        seq = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_plain(v) for v in seq]
    return x


def check_feasibility(instance: Instance, outcome: Outcome) -> Check:
    if outcome.n != instance.n or len(outcome.payments) != instance.n:
        return Check(False, {"reason": "outcome size does not match instance"})
    owner: dict[int, int] = {}
    for i, xs in enumerate(outcome.allocation):
        for j in xs:
            if not 0 <= j < instance.m:
                return Check(False, {"reason": "unknown item", "buyer": i, "item": j})
            if j in owner:
                return Check(False, {"reason": "item sold twice", "item": j, "buyers": [owner[j], i]})
            owner[j] = i
    for i, p in enumerate(outcome.payments):
        if p < 0:
            return Check(False, {"reason": "negative payment", "buyer": i, "payment": p})
    return Check(True)


def check_ir(instance: Instance, outcome: Outcome) -> Check:
    for b in instance.buyers:
        u = utility(b, outcome.allocation[b.id], outcome.payments[b.id])
        if not _cmp_ge(u, AugPrice(Fraction(0))):
            return Check(False, {"buyer": b.id, "utility": u})
    return Check(True)


def item_price_map(instance: Instance, outcome: Outcome) -> dict[int, AugPrice | None]:
    """Price of every item: sale price, withdrawal price, or ``None`` for never priced."""
    if outcome.item_prices is None:
        raise MalformedOutcome("outcome carries no item prices")
    prices: dict[int, AugPrice | None] = {j: None for j in range(instance.m)}
    for j, p in outcome.removed.items():
        prices[j] = p
    for i, xs in enumerate(outcome.allocation):
        for j in xs:
            if j not in outcome.item_prices:
                raise MalformedOutcome(f"sold item {j} has no price")
            prices[j] = outcome.item_prices[j]
    return prices


def best_bundle(buyer: Buyer, prices: dict[int, AugPrice | None]) -> tuple[Utility, list[int]]:
    """Utility-maximising affordable bundle under item prices (count sweep)."""
    priced = sorted(
        (p, j) for j, p in prices.items() if p is not None and j in buyer.preference_set
    )
    best: Utility = AugPrice(Fraction(0))
    best_k = 0
    total = AugPrice(Fraction(0))
    for k, (p, _) in enumerate(priced, start=1):
        total = total + p
        if total > buyer.budget:
            break
        u = AugPrice(buyer.valuation * k) - total
        if u > best:
            best, best_k = u, k
    return best, [j for _, j in priced[:best_k]]


def check_item_price_ef(instance: Instance, outcome: Outcome) -> Check:
    prices = item_price_map(instance, outcome)
    for b in instance.buyers:
        xs = outcome.allocation[b.id]
        total = sum((prices[j] for j in xs), AugPrice(Fraction(0)))  # type: ignore[misc]
        if total != outcome.payments[b.id]:
            return Check(False, {"buyer": b.id, "reason": "payment differs from sum of item prices",
                                 "payment": outcome.payments[b.id], "sum": total})
        own = utility(b, xs, outcome.payments[b.id])
        best, bundle = best_bundle(b, prices)
        if not _cmp_ge(own, best):
            gap = None if own is NEG_INF else best - own  # type: ignore[operator]
            return Check(False, {"buyer": b.id, "better_bundle": bundle, "own_utility": own,
                                 "better_utility": best, "gap": gap})
    return Check(True)


def check_pairwise_ef(instance: Instance, outcome: Outcome) -> Check:
    for b in instance.buyers:
        own = utility(b, outcome.allocation[b.id], outcome.payments[b.id])
        for k in range(instance.n):
            if k == b.id:
                continue
            other = utility(b, outcome.allocation[k], outcome.payments[k])
            if not _cmp_ge(own, other):
                gap = None if own is NEG_INF else other - own  # type: ignore[operator]
                return Check(False, {"envier": b.id, "envied": k, "own_utility": own,
                                     "envied_utility": other, "gap": gap})
    return Check(True)


def revenue(outcome: Outcome) -> tuple[Fraction, AugPrice]:
    with_eps = sum(outcome.payments, AugPrice(Fraction(0)))
    return with_eps.base, with_eps


@dataclass
class VerifierReport:
    feasibility: Check
    ir: Check
    ef: Check
    ef_kind: str
    revenue_limit: Fraction
    revenue_with_eps: AugPrice
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.feasibility.passed and self.ir.passed and self.ef.passed

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "feasibility": self.feasibility.to_json(),
            "ir": self.ir.to_json(),
            "ef": {"kind": self.ef_kind, **self.ef.to_json()},
            "revenue_limit": str(self.revenue_limit),
            "revenue_with_eps": self.revenue_with_eps.to_json(),
            **_plain(self.extra),
        }


def verify_outcome(instance: Instance, outcome: Outcome, ef_kind: str | None = None) -> VerifierReport:
    """Run the verifier suite; ``ef_kind`` is ``"item"`` or ``"pairwise"``.

    By default outcomes with item prices get the item-price check.
    """
    if ef_kind is None:
        ef_kind = "item" if outcome.item_prices is not None else "pairwise"
    feas = check_feasibility(instance, outcome)
    ir = check_ir(instance, outcome) if feas.passed else Check(False, {"reason": "infeasible"})
    if ef_kind == "item":
        ef = check_item_price_ef(instance, outcome) if feas.passed else Check(False, {"reason": "infeasible"})
    elif ef_kind == "pairwise":
        ef = check_pairwise_ef(instance, outcome) if feas.passed else Check(False, {"reason": "infeasible"})
    else:
        raise ValueError(f"unknown envy-freeness kind {ef_kind!r}")
    lim, aug = revenue(outcome)
    return VerifierReport(feas, ir, ef, ef_kind, lim, aug)
