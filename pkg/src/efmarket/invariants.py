"""Invariant checks over auction traces.

Each checker returns a list of human-readable violation messages; an empty
list means the trace satisfies every property.  They read only the instance,
the final outcome and the per-event annotations, never the auction code.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

from .instance import Instance
from .outcome import Event, Outcome
from .prices import AugPrice

HB_PROCEDURES = ("compute_allocation_I", "compute_allocation_II")
LB_BRANCHES = ("I1", "I2", "I3")


def _ids(xs) -> set[int]:
    return {int(x) for x in xs}


def _keyed(d: dict) -> dict[int, object]:
    return {int(k): v for k, v in d.items()}


def _aug(x) -> AugPrice:
    # annotations read back from JSON hold prices as plain dicts or strings
    return x if isinstance(x, AugPrice) else AugPrice.from_json(x)


def _sale_counts(e: Event) -> dict[int, int]:
    got: dict[int, int] = defaultdict(int)
    for i, _, _ in e.sales:
        got[i] += 1
    return got


def _sale_charges(outcome: Outcome) -> dict[int, AugPrice]:
    return {j: c for e in outcome.trace for _, j, c in e.sales}


def _progress(outcome: Outcome) -> list[str]:
    return [
        f"no sale or removal at critical price {e.price} ({e.procedure})"
        for e in outcome.trace
        if not (e.sales or e.removed)
    ]


def check_hb_trace(instance: Instance, outcome: Outcome) -> list[str]:
    out: list[str] = []
    charge = _sale_charges(outcome)
    removal = dict(outcome.removed)

    for e in outcome.trace:
        out.extend(f"recorded at {e.price}: {v}" for v in e.info.get("violations", []))
        got = _sale_counts(e)
        demand = _keyed(e.info.get("demand", {}))
        for i in sorted(_ids(e.info.get("N", []))):
            if got.get(i, 0) != demand.get(i):
                out.append(f"buyer {i} on an alternating path got {got.get(i, 0)} items, demand {demand.get(i)} at {e.price}")
        if e.procedure == "compute_allocation_I":
            assigned = {j for _, j in e.info.get("assigned_to_Q", [])}
            missing = _ids(e.info.get("Jbar", [])) - assigned
            if missing:
                out.append(f"left-over items {sorted(missing)} not assigned at {e.price}")
        elif e.procedure == "compute_allocation_II":
            jbar, nb = _ids(e.info.get("Jbar", [])), _ids(e.info.get("N", []))
            if len(jbar) > len(nb):
                out.append(f"{len(jbar)} unassigned items but {len(nb)} alternating-path buyers at {e.price}")
        else:
            out.append(f"unknown procedure {e.procedure!r}")
    out.extend(_progress(outcome))

    for b in instance.buyers:
        xs = outcome.allocation[b.id]
        if xs:
            prices = {charge[j] for j in xs}
            if len(prices) != 1:
                out.append(f"buyer {b.id} pays several per-item prices {sorted(map(str, prices))}")
            own = min(prices)
            cheaper = sorted(j for j in b.preference_set if j in charge and charge[j] < own)
            if cheaper:
                out.append(f"items {cheaper} preferred by buyer {b.id} sold below the buyer's price {own}")
        else:
            low = sorted(j for j in b.preference_set if j in charge and charge[j] < b.valuation)
            low += sorted(j for j in b.preference_set if j in removal and removal[j] < b.valuation)
            if low:
                out.append(f"unallocated buyer {b.id}: items {low} sold or withdrawn below the valuation")
    return out


def check_lb_trace(instance: Instance, outcome: Outcome) -> list[str]:
    # a single group may legitimately do nothing; the auction marks a whole
    # critical price without progress as a stall
    out = [f"no sale or removal at critical price {e.price}" for e in outcome.trace if e.procedure == "stall"]
    charge = _sale_charges(outcome)
    classes = _keyed(outcome.info.get("classes", {}))

    # items each buyer received at each critical price
    received: dict[tuple[Fraction, int], int] = defaultdict(int)
    for e in outcome.trace:
        for i, _, _ in e.sales:
            received[(e.price, i)] += 1

    seen: dict[int, str] = {}
    for e in outcome.trace:
        if e.procedure == "stall":
            continue
        if e.procedure == "withdraw":
            if e.sales:
                out.append(f"withdrawal at {e.price} sells items")
            continue
        if e.procedure not in LB_BRANCHES:
            out.append(f"unknown procedure {e.procedure!r}")
            continue
        for i in map(int, e.info.get("classified", [])):
            if i in seen:
                out.append(f"buyer {i} classified twice ({seen[i]}, {e.procedure})")
            seen[i] = e.procedure
        q_mass, n_mass = _aug(e.info["q_mass"]), _aug(e.info["n_mass"])
        if e.procedure == "I1" and not q_mass < n_mass:
            out.append(f"mass-light branch taken at {e.price} with boundary mass {q_mass}")
        if e.procedure != "I1" and q_mass < n_mass:
            out.append(f"branch {e.procedure} taken at {e.price} although boundary mass is lighter")
        if e.procedure == "I2":
            fresh = _ids(e.info["Y"]) - _ids(e.info["served_before"])
            got = _sale_counts(e)
            if set(got) != fresh or any(k != 1 for k in got.values()):
                out.append(f"one-item-each event at {e.price} did not give every fresh buyer exactly one item")

        demand = _keyed(e.info.get("demand", {}))
        budget = {i: _aug(x) for i, x in _keyed(e.info.get("budget_before", {})).items()}
        above = AugPrice.right_of(e.price)
        # positive demand at the sale charge means the buyer must also be served at this price
        for seller, j, c in e.sales:
            for b in instance.buyers:
                if b.id == seller or j not in b.preference_set or b.id not in demand:
                    continue
                d_at, d_above = demand[b.id]
                if (d_above if c == above else d_at) > 0 and received[(e.price, b.id)] == 0:
                    out.append(f"item {j} wanted by buyer {b.id} sold at {c} but the buyer gets nothing at {e.price}")

        # no buyer prefers an affordable bundle sold in the same event
        bundles: dict[int, list[AugPrice]] = defaultdict(list)
        items_of: dict[int, set[int]] = defaultdict(set)
        for i, j, c in e.sales:
            bundles[i].append(c)
            items_of[i].add(j)
        for i in bundles:
            b = instance.buyers[i]
            ci = bundles[i][0]
            for k in bundles:
                if k == i:
                    continue
                overlap = len(items_of[k] & b.preference_set)
                cost = sum(bundles[k], AugPrice(Fraction(0)))
                if overlap and i in budget and cost <= budget[i]:
                    if (b.valuation - ci.base) * len(bundles[i]) < (b.valuation - bundles[k][0].base) * overlap:
                        out.append(f"buyer {i} at {e.price} prefers the bundle of buyer {k}")

    if seen != classes:
        out.append("summary classification disagrees with per-event classification")
    for b in instance.buyers:
        if outcome.allocation[b.id] and b.id not in classes:
            out.append(f"served buyer {b.id} never classified")
        if not outcome.allocation[b.id]:
            low = sorted(j for j in b.preference_set if j in charge and not charge[j] > b.budget)
            if low:
                out.append(f"unallocated buyer {b.id}: items {low} sold at or below the budget")
    return out


def check_ignored_buyers(instance: Instance, outcome: Outcome, cap: tuple[int, int] = (5, 5)) -> list[str]:
    """Buyers left with nothing by a failed one-item-each branch should get
    nothing in an optimal envy-free outcome of the market they faced then.

    That market is rebuilt from the event annotations (the fresh buyers of
    the group with their remaining budgets, and the group's unsold items)
    and solved exactly, so this only runs on small groups.
    """
    from .oracle import optimal_ef_revenue

    out: list[str] = []
    for e in outcome.trace:
        if e.procedure != "I3":
            continue
        fresh = sorted(_ids(e.info["Y"]) - _ids(e.info["served_before"]))
        ignored = [int(i) for i in e.info["classified"] if not outcome.allocation[int(i)]]
        if not ignored:
            continue
        items = [int(j) for j in e.info["items"]]
        if len(fresh) > cap[0] or len(items) > cap[1]:
            continue
        relabel = {j: k for k, j in enumerate(items)}
        budget = {i: _aug(x) for i, x in _keyed(e.info["budget_before"]).items()}
        triples = []
        for i in fresh:
            b = instance.buyers[i]
            triples.append((b.valuation, budget[i].base, sorted(relabel[j] for j in b.preference_set if j in relabel)))
        sub = Instance.build(len(items), [t for t in triples])
        opt = optimal_ef_revenue(sub, cap)
        served = [fresh[k] for k, x in enumerate(opt.witness_allocation) if x and fresh[k] in ignored]
        if served:
            out.append(
                f"at {e.price} buyers {served} are ignored, but an optimal outcome of the remaining market "
                f"serves them (optimal revenue {opt.optimal_revenue})"
            )
    return out


def check_trace(instance: Instance, outcome: Outcome) -> list[str]:
    if outcome.algorithm == "hb":
        return check_hb_trace(instance, outcome)
    if outcome.algorithm == "lb":
        return check_lb_trace(instance, outcome)
    raise ValueError(f"no trace checks for algorithm {outcome.algorithm!r}")
