"""Ground truth for small markets: optimal pairwise envy-free revenue and the
best single uniform price.

The optimum is found by enumerating allocations.  For a fixed allocation the
pairwise envy-free payments form a union of regions cut out by difference
constraints; the componentwise greatest payment vector is reached by a
monotone descent that drops a buyer's payment whenever an affordable
envied bundle forces it down.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .instance import Instance
from .market import market_components
from .matching import PrefGraph, max_bmatching

DEFAULT_CAP = (5, 5)


class SizeCapError(ValueError):
    """The instance is too large for exhaustive search."""


@dataclass
class OracleResult:
    optimal_revenue: Fraction
    witness_allocation: list[frozenset[int]]
    witness_payments: list[Fraction]
    # (envier, envied) pairs whose envy is excused because the envied payment exceeds the envier's budget
    guard_pattern: list[tuple[int, int]]
    stats: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "optimal_revenue": str(self.optimal_revenue),
            "witness": {
                "allocation": [sorted(x) for x in self.witness_allocation],
                "payments": [str(p) for p in self.witness_payments],
            },
            "guard_pattern": [list(p) for p in self.guard_pattern],
            "stats": dict(self.stats),
        }

    def as_outcome(self):
        """The witness as an :class:`Outcome` so the verifiers can audit it."""
        from .outcome import Outcome
        from .prices import AugPrice

        return Outcome(
            list(self.witness_allocation),
            [AugPrice(p) for p in self.witness_payments],
            None,
            {},
            [],
            "oracle",
        )


def greatest_payments(
    values: Sequence[Fraction],
    budgets: Sequence[Fraction],
    counts: Sequence[Sequence[int]],
) -> list[Fraction] | None:
    """Greatest pairwise envy-free payment vector for a fixed allocation.

    ``counts[i][j]`` is how many items of buyer ``j``'s bundle buyer ``i``
    wants (``counts[i][i]`` is the buyer's own useful count).  Returns None
    when no payment vector makes the allocation envy-free.
    """
    n = len(values)
    p = [min(budgets[i], values[i] * counts[i][i]) for i in range(n)]
    pairs = [
        (i, j, values[i] * (counts[i][i] - counts[i][j]))
        for i in range(n)
        for j in range(n)
        if i != j and counts[i][j] > 0
    ]
    changed = True
    while changed:
        changed = False
        for i, j, slack in pairs:
            # envy of i towards j is excused only if j pays more than i can afford
            if p[j] <= budgets[i] and p[i] > p[j] + slack:
                p[i] = p[j] + slack
                if p[i] < 0:
                    return None
                changed = True
    return p


def _excused(p: Sequence[Fraction], budgets: Sequence[Fraction], counts) -> list[tuple[int, int]]:
    n = len(p)
    return [(i, j) for i in range(n) for j in range(n) if i != j and counts[i][j] > 0 and p[j] > budgets[i]]


def _check_cap(instance: Instance, cap: tuple[int, int]) -> None:
    if instance.n > cap[0] or instance.m > cap[1]:
        raise SizeCapError(
            f"instance has n={instance.n}, m={instance.m}; exhaustive search is capped at n<={cap[0]}, m<={cap[1]}"
        )


def optimal_ef_revenue(instance: Instance, cap: tuple[int, int] = DEFAULT_CAP) -> OracleResult:
    """Maximum revenue over all allocations and pairwise envy-free payments.

    Items may stay unsold.  An item is only ever given to a buyer who wants
    it: handing out an unwanted item adds no value and can only create envy.
    """
    _check_cap(instance, cap)
    n = instance.n
    values = [b.valuation for b in instance.buyers]
    budgets = [b.budget.base for b in instance.buyers]
    prefs = [b.preference_set for b in instance.buyers]
    choices = [[None] + [i for i in range(n) if j in prefs[i]] for j in instance.items]

    best = Fraction(-1)
    best_alloc: list[frozenset[int]] = [frozenset()] * n
    best_pay: list[Fraction] = [Fraction(0)] * n
    best_counts = [[0] * n for _ in range(n)]
    stats = {"allocations": 0, "pruned": 0, "infeasible": 0}

    for owners in itertools.product(*choices):
        stats["allocations"] += 1
        bundles: list[set[int]] = [set() for _ in range(n)]
        for j, i in enumerate(owners):
            if i is not None:
                bundles[i].add(j)
        bound = sum(min(budgets[i], values[i] * len(bundles[i])) for i in range(n))
        if bound <= best:
            stats["pruned"] += 1
            continue
        counts = [[len(bundles[k] & prefs[i]) for k in range(n)] for i in range(n)]
        p = greatest_payments(values, budgets, counts)
        if p is None:
            stats["infeasible"] += 1
            continue
        total = sum(p, Fraction(0))
        if total > best:
            best, best_alloc, best_pay, best_counts = total, [frozenset(x) for x in bundles], p, counts

    return OracleResult(best, best_alloc, best_pay, _excused(best_pay, budgets, best_counts), stats)


def grid_optimal_revenue(instance: Instance, step: Fraction, cap: tuple[int, int] = (3, 3)) -> Fraction:
    """Independent brute force: every allocation, every payment vector on the
    lattice ``step * Z`` within individual rationality, checked by the verifier."""
    from .prices import AugPrice
    from .outcome import Outcome
    from .verify import check_ir, check_pairwise_ef

    _check_cap(instance, cap)
    n = instance.n
    # any buyer may receive any item here, wanted or not
    choices = [[None, *range(n)] for _ in instance.items]
    best = Fraction(0)
    for owners in itertools.product(*choices):
        bundles: list[set[int]] = [set() for _ in range(n)]
        for j, i in enumerate(owners):
            if i is not None:
                bundles[i].add(j)
        tops = [min(b.budget.base, b.valuation * len(bundles[b.id])) for b in instance.buyers]
        ranges = [[step * k for k in range(int(t / step) + 1)] for t in tops]
        for pay in itertools.product(*ranges):
            total = sum(pay, Fraction(0))
            if total <= best:
                continue
            out = Outcome([frozenset(x) for x in bundles], [AugPrice(x) for x in pay], None, {}, [], "grid")
            if check_ir(instance, out).passed and check_pairwise_ef(instance, out).passed:
                best = total
    return best


# --------------------------------------------------------------------------
# uniform price


def _full_demand_ok(instance: Instance, comp: Sequence[int], price: Fraction) -> bool:
    caps = {}
    for i in comp:
        b = instance.buyers[i]
        if price <= b.valuation:
            d = min(int(b.budget.base // price), len(b.preference_set))
            if d > 0:
                caps[i] = d
    if len(caps) <= 1:
        return True
    g = PrefGraph.from_edges(caps, [(i, j) for i in sorted(caps) for j in sorted(instance.buyers[i].preference_set)])
    return max_bmatching(g).size == sum(caps.values())


def best_fixed_price(instance: Instance) -> tuple[Fraction, Fraction]:
    """Best revenue from one uniform price at which every buyer with positive
    demand can receive their full demand.  Returns ``(price, revenue)``.

    Demand is constant on each interval between consecutive candidate prices
    and right-closed, so revenue is maximised at a candidate: some buyer's
    valuation, or some budget divided by a bundle size.
    """
    # buyer i demands at least k items exactly up to price min(b_i / k, v_i)
    thresholds = sorted(
        min(b.budget.base / k, b.valuation) for b in instance.buyers for k in range(1, len(b.preference_set) + 1)
    )
    shared = [c for c in market_components(instance) if len(c) > 1]
    best_price, best_rev = Fraction(0), Fraction(0)
    for q in sorted(set(thresholds)):
        units = len(thresholds) - bisect_left(thresholds, q)
        rev = q * units
        if rev <= best_rev:
            continue
        if all(_full_demand_ok(instance, c, q) for c in shared):
            best_price, best_rev = q, rev
    return best_price, best_rev


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def lower_bound_optimum(n: int) -> Fraction:
    """Optimal revenue of the disjoint-singleton family: every buyer pays their valuation."""
    return n * harmonic(n)


def is_within_factor(revenue: Fraction, optimum: Fraction, factor: int = 4) -> bool:
    return revenue * factor >= optimum


__all__: Iterable[str] = [
    "OracleResult",
    "SizeCapError",
    "optimal_ef_revenue",
    "greatest_payments",
    "grid_optimal_revenue",
    "best_fixed_price",
    "harmonic",
    "lower_bound_optimum",
    "is_within_factor",
    "DEFAULT_CAP",
]
