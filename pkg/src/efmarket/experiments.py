"""Batch experiments: seeded fuzzing against the verifiers and the oracle, and
the uniform-price gap on the disjoint-singleton family."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable

import numpy as np

from .auction_hb import run_auction_hb
from .auction_lb import run_auction_lb
from .instance import Instance, Regime, gen_lower_bound_instance, gen_random_instance, restrict_instance
from .invariants import check_trace
from .oracle import DEFAULT_CAP, best_fixed_price, harmonic, lower_bound_optimum, optimal_ef_revenue
from .outcome import Outcome
from .verify import verify_outcome

AUCTIONS: dict[Regime, tuple[str, Callable[[Instance], Outcome]]] = {
    Regime.HIGH_BUDGET: ("hb", run_auction_hb),
    Regime.LOW_BUDGET: ("lb", run_auction_lb),
}


def decimal(x: Fraction, places: int = 6) -> str:
    """Display rendering of an exact rational."""
    with localcontext() as ctx:
        ctx.prec = 50
        q = Decimal(x.numerator) / Decimal(x.denominator)
        return str(q.quantize(Decimal(1).scaleb(-places)))


def run_for_regime(instance: Instance) -> Outcome:
    if instance.regime not in AUCTIONS:
        raise ValueError(f"no auction for regime {instance.regime.value}")
    return AUCTIONS[instance.regime][1](instance)


def failure_class(instance: Instance, cap: tuple[int, int] | None = None) -> str | None:
    """First property the auction violates on ``instance``, or None.

    Classes: ``feasibility``, ``ir``, ``ef``, ``trace`` and, when the instance
    is within ``cap``, ``approximation`` (revenue below a quarter of the optimum).
    """
    outcome = run_for_regime(instance)
    rep = verify_outcome(instance, outcome)
    for name, check in (("feasibility", rep.feasibility), ("ir", rep.ir), ("ef", rep.ef)):
        if not check.passed:
            return name
    if check_trace(instance, outcome):
        return "trace"
    if cap is not None and instance.n <= cap[0] and instance.m <= cap[1]:
        if 4 * outcome.revenue() < optimal_ef_revenue(instance, cap).optimal_revenue:
            return "approximation"
    return None


def minimize(instance: Instance, still_fails: Callable[[Instance], bool]) -> Instance:
    """Greedily delete buyers, then items, while the failure persists."""
    current = instance
    changed = True
    while changed:
        changed = False
        for i in range(current.n):
            if current.n == 1:
                break
            smaller = restrict_instance(current, drop_buyers=[i])
            if smaller.n and still_fails(smaller):
                current, changed = smaller, True
                break
        if changed:
            continue
        for j in current.items:
            smaller = restrict_instance(current, drop_items=[j])
            if smaller.n and still_fails(smaller):
                current, changed = smaller, True
                break
    return current


@dataclass
class BenchConfig:
    seed: int = 0
    count: int = 100
    n: int = 8
    m: int = 8
    regimes: tuple[Regime, ...] = (Regime.HIGH_BUDGET, Regime.LOW_BUDGET)
    oracle_cap: tuple[int, int] = (4, 4)


def bench_instances(cfg: BenchConfig, regime: Regime):
    """The seeded instance stream; sizes are drawn uniformly from 1..n and 1..m."""
    tag = list(Regime).index(regime)
    for k in range(cfg.count):
        rng = np.random.default_rng([cfg.seed, tag, k])
        n = int(rng.integers(1, cfg.n + 1))
        m = int(rng.integers(1, cfg.m + 1))
        yield k, gen_random_instance(n, m, regime, int(rng.integers(2**32)))


def bench(cfg: BenchConfig) -> tuple[dict, bool]:
    """Fuzz each regime; returns the report and whether everything held.

    The first violation stops the run and the report carries a minimised
    counterexample.  No timing goes into the report so that it is
    reproducible byte for byte.
    """
    report: dict = {"seed": cfg.seed, "count": cfg.count, "n_max": cfg.n, "m_max": cfg.m,
                    "oracle_cap": list(cfg.oracle_cap), "regimes": {}}
    for regime in cfg.regimes:
        algo, _ = AUCTIONS[regime]
        ratios: list[Fraction] = []
        revenue = Fraction(0)
        done = 0
        for k, inst in bench_instances(cfg, regime):
            outcome = run_for_regime(inst)
            revenue += outcome.revenue()
            cls = failure_class(inst, cfg.oracle_cap)
            if cls is None and inst.n <= cfg.oracle_cap[0] and inst.m <= cfg.oracle_cap[1]:
                opt = optimal_ef_revenue(inst, cfg.oracle_cap).optimal_revenue
                ratios.append(outcome.revenue() / opt if opt else Fraction(1))
            if cls is not None:
                small = minimize(inst, lambda x: failure_class(x, cfg.oracle_cap) == cls)
                report["regimes"][regime.value] = {"algorithm": algo, "instances": done}
                report["failure"] = {
                    "regime": regime.value,
                    "index": k,
                    "class": cls,
                    "instance": inst.to_json(),
                    "minimized": small.to_json(),
                }
                return report, False
            done += 1
        entry: dict = {
            "algorithm": algo,
            "instances": done,
            "violations": 0,
            "total_revenue": str(revenue),
            "oracle_compared": len(ratios),
        }
        if ratios:
            lo = min(ratios)
            mean = sum(ratios, Fraction(0)) / len(ratios)
            entry.update(
                min_ratio=str(lo),
                min_ratio_decimal=decimal(lo),
                mean_ratio=str(mean),
                mean_ratio_decimal=decimal(mean),
                below_quarter=sum(1 for r in ratios if 4 * r < 1),
            )
        report["regimes"][regime.value] = entry
    return report, True


def gap_report(n: int, oracle_cap: tuple[int, int] = DEFAULT_CAP) -> dict:
    """Optimal envy-free revenue, best uniform price and the auction on the
    disjoint-singleton family with values ``n / (n - i + 1)``."""
    inst = gen_lower_bound_instance(n)
    opt = lower_bound_optimum(n)
    price, fixed = best_fixed_price(inst)
    auction = run_auction_hb(inst).revenue()
    out = {
        "n": n,
        "harmonic": str(harmonic(n)),
        "optimal": str(opt),
        "fixed_price": str(price),
        "fixed_revenue": str(fixed),
        "auction_revenue": str(auction),
        "ratio_optimal_to_fixed": str(opt / fixed),
        "ratio_optimal_to_auction": str(opt / auction),
        "decimal": {
            "optimal": decimal(opt),
            "ratio_optimal_to_fixed": decimal(opt / fixed),
            "ratio_optimal_to_auction": decimal(opt / auction),
        },
    }
    if n <= oracle_cap[0] and n <= oracle_cap[1]:
        out["oracle_optimal"] = str(optimal_ef_revenue(inst, oracle_cap).optimal_revenue)
    return out
