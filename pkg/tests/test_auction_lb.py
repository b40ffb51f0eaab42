from fractions import Fraction as F

import numpy as np
import pytest

from efmarket.auction_lb import one_item_each_matching, partition_components, run_auction_lb
from efmarket.instance import Instance, MarketState, gen_random_instance
from efmarket.invariants import check_ignored_buyers, check_lb_trace
from efmarket.market import RegimeError
from efmarket.oracle import optimal_ef_revenue
from efmarket.prices import AugPrice
from efmarket.verify import verify_outcome


def run(m, triples):
    inst = Instance.build(m, triples)
    return inst, run_auction_lb(inst)


def test_single_buyer_spends_budget_on_one_item():
    _, out = run(1, [(2, 1, [0])])
    assert out.revenue() == 1
    assert [(e.price, e.procedure) for e in out.trace] == [(F(1), "I2")]
    assert out.item_prices is None


def test_budget_spread_over_two_items():
    _, out = run(3, [(11, 10, [0, 1, 2])])
    assert out.revenue() == F(20, 3)
    assert out.payments[0] == AugPrice(F(20, 3), 2)
    assert out.trace[0].procedure == "I1"


def test_disjoint_buyers():
    _, out = run(2, [(2, 1, [0]), (2, 1, [1])])
    assert out.revenue() == 2
    assert out.allocation == [frozenset({0}), frozenset({1})]


def test_partition_follows_shared_items():
    st = MarketState(Instance.build(4, [(2, 1, [0, 1]), (2, 1, [1, 2]), (2, 1, [2, 3]), (2, 1, [0])]))
    assert partition_components([0, 1, 2], st) == [[0, 1, 2]]
    assert partition_components([0, 3], st) == [[0, 3]]
    st = MarketState(Instance.build(2, [(2, 1, [0]), (2, 1, [1])]))
    assert sorted(partition_components([0, 1], st)) == [[0], [1]]


def test_one_item_each_matching():
    st = MarketState(Instance.build(2, [(2, 1, [0]), (2, 1, [0, 1]), (2, 1, [0])]))
    assert one_item_each_matching([], st, F(1)).owner == {}
    assert one_item_each_matching([0, 2], st, F(1)) is None
    assert one_item_each_matching([0, 1], st, F(1)).owner == {0: 0, 1: 1}


def test_one_item_each_leaves_items_held_outside_the_group():
    # without restricting the pool, the middle buyer envied the outcome
    inst, out = run(4, [(4, 3, [0]), (F(15, 2), F(9, 4), [0, 1, 2, 3]), (9, 2, [0, 1])])
    assert verify_outcome(inst, out, "pairwise").passed
    assert out.revenue() == F(49, 8)
    assert check_lb_trace(inst, out) == []


def test_failed_one_item_each_branch_can_forfeit_all_revenue():
    # two buyers compete for item 0, the third also wants item 1; at price 1
    # nobody can afford more and no one-item-each matching exists, so the
    # group is sold above the price and nothing is sold at all
    inst, out = run(2, [(F(3, 2), 1, [0]), (F(3, 2), 1, [0]), (F(3, 2), 1, [0, 1])])
    assert out.revenue() == 0
    assert [e.procedure for e in out.trace] == ["I3"]
    assert verify_outcome(inst, out, "pairwise").passed
    assert optimal_ef_revenue(inst).optimal_revenue == 1
    flagged = check_ignored_buyers(inst, out)
    assert len(flagged) == 1 and "[2]" in flagged[0]


def test_high_budget_instance_is_rejected():
    with pytest.raises(RegimeError):
        run_auction_lb(Instance.build(1, [(1, 1, [0])]))


@pytest.mark.parametrize("seed", range(60))
def test_random_runs_are_envy_free_and_clean(seed):
    rng = np.random.default_rng([2, seed])
    inst = gen_random_instance(int(rng.integers(1, 8)), int(rng.integers(1, 8)), "LowBudget", seed)
    out = run_auction_lb(inst)
    assert verify_outcome(inst, out, "pairwise").passed
    assert check_lb_trace(inst, out) == []
    assert run_auction_lb(inst).dumps() == out.dumps()
