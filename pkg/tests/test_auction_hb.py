from fractions import Fraction as F

import numpy as np
import pytest

from efmarket.auction_hb import compute_allocation_II, compute_allocation_I, run_auction_hb
from efmarket.instance import Instance, MarketState, gen_lower_bound_instance, gen_random_instance
from efmarket.invariants import check_hb_trace
from efmarket.market import RegimeError, next_critical_price
from efmarket.prices import AugPrice
from efmarket.verify import verify_outcome


def run(m, triples):
    inst = Instance.build(m, triples)
    return inst, run_auction_hb(inst)


def test_single_buyer_pays_valuation():
    inst, out = run(1, [(1, 1, [0])])
    assert out.revenue() == 1
    assert out.item_prices == {0: AugPrice(1)}
    assert [e.procedure for e in out.trace] == ["compute_allocation_I"]


def test_higher_valuation_wins_shared_item():
    _, out = run(1, [(1, 1, [0]), (2, 2, [0])])
    assert out.allocation == [frozenset(), frozenset({0})]
    assert out.payments[1] == AugPrice(2) and out.revenue() == 2


def test_empty_market():
    _, out = run(0, [])
    assert out.revenue() == 0 and out.trace == []


def test_budget_limited_buyer_takes_two_of_three():
    inst, out = run(3, [(4, 10, [0, 1, 2])])
    assert out.revenue() == F(20, 3)
    assert out.payments[0] == AugPrice(F(20, 3), 2)
    assert out.allocation[0] == {0, 1}
    assert out.removed == {2: AugPrice.right_of(F(10, 3))}
    assert out.trace[0].procedure == "compute_allocation_II"


def test_disjoint_copies_are_independent():
    _, out = run(6, [(4, 10, [0, 1, 2]), (4, 10, [3, 4, 5])])
    assert out.revenue() == F(40, 3)


def test_budget_drop_makes_the_first_price_critical():
    # at 1 the first buyer can afford two items, just above 1 only one
    _, out = run(2, [(2, 2, [0, 1]), (1, 1, [1])])
    assert [(e.price, e.procedure) for e in out.trace] == [(F(1), "compute_allocation_II")]
    assert out.allocation == [frozenset({0}), frozenset()]
    assert out.payments[0] == AugPrice.right_of(1)
    assert out.removed == {1: AugPrice.right_of(1)}
    assert out.revenue() == 1


def test_strong_buyer_outbids_weak_one():
    _, out = run(1, [(3, 3, [0]), (1, 1, [0])])
    assert out.revenue() == 3 and out.allocation[0] == {0}


def test_next_critical_price_examples():
    assert next_critical_price(MarketState(Instance.build(1, [(1, 1, [0])]))) == 1
    assert next_critical_price(MarketState(gen_lower_bound_instance(2))) == 1
    assert next_critical_price(MarketState(Instance.build(3, [(4, 10, [0, 1, 2])]))) == F(10, 3)


def test_selling_procedures_directly():
    st = MarketState(Instance.build(1, [(1, 1, [0])]))
    ev = compute_allocation_I(st, F(1))
    assert ev.sales == [(0, 0, AugPrice(1))] and ev.info["Jbar"] == {0}
    st = MarketState(Instance.build(3, [(4, 10, [0, 1, 2])]))
    ev = compute_allocation_II(st, F(10, 3))
    assert len(ev.sales) == 2 and ev.removed == [2]


def test_low_budget_instance_is_rejected():
    with pytest.raises(RegimeError):
        run_auction_hb(Instance.build(1, [(2, 1, [0])]))


def test_lower_bound_family_is_sold_at_valuations():
    out = run_auction_hb(gen_lower_bound_instance(6))
    assert out.revenue() == sum(F(6, 6 - i) for i in range(6))


@pytest.mark.parametrize("seed", range(60))
def test_random_runs_are_envy_free_and_clean(seed):
    rng = np.random.default_rng([1, seed])
    inst = gen_random_instance(int(rng.integers(1, 8)), int(rng.integers(1, 8)), "HighBudget", seed)
    out = run_auction_hb(inst)
    assert verify_outcome(inst, out, "item").passed
    assert check_hb_trace(inst, out) == []
    assert run_auction_hb(inst).dumps() == out.dumps()


def test_left_over_items_empty_when_strong_buyers_cover_everything():
    st = MarketState(Instance.build(2, [(2, 2, [0, 1]), (1, 1, [1])]))
    ev = compute_allocation_I(st, F(1))
    assert ev.sales == [] and ev.info["Jbar"] == set()
    st = MarketState(Instance.build(1, [(3, 3, [0]), (1, 1, [0])]))
    assert compute_allocation_I(st, F(1)).sales == []
