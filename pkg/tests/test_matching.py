from fractions import Fraction as F

import numpy as np
import pytest

from bruteforce import alternating_reachable, max_size, min_marked_among_maximum, random_graph
from efmarket.instance import Instance, MarketState, Split
from efmarket.matching import (
    BMatching,
    PrefGraph,
    alternating_path,
    build_graph,
    flip_path,
    max_bmatching,
    max_bmatching_min_marked,
    reachable_buyers,
)
from efmarket.prices import AugPrice


def test_empty_graph():
    g = PrefGraph.from_edges({}, [])
    assert max_bmatching(g).size == 0


def test_two_unit_buyers_share_one_item():
    g = PrefGraph.from_edges({0: 1, 1: 1}, [(0, 0), (1, 0)])
    m = max_bmatching(g)
    assert m.size == 1 and m.owner == {0: 0}


def test_one_buyer_with_capacity_two():
    g = PrefGraph.from_edges({0: 2}, [(0, 0), (0, 1)])
    assert max_bmatching(g).items_of(0) == {0, 1}


def test_min_marked_prefers_the_unmarked_item():
    g = PrefGraph.from_edges({0: 1}, [(0, 0), (0, 1)])
    m = max_bmatching_min_marked(g, {0})
    assert m.owner == {1: 0}


def test_min_marked_when_marks_are_forced():
    # buyer 1 can only use marked item 0, so one marked item is unavoidable
    g = PrefGraph.from_edges({0: 1, 1: 1}, [(0, 0), (0, 1), (1, 0)])
    m = max_bmatching_min_marked(g, {0})
    assert m.size == 2 and sum(1 for j in m.owner if j == 0) == 1


def test_build_graph_filters():
    inst = Instance.build(1, [(1, 1, [0])])
    st = MarketState(inst)
    g = build_graph(st, F(1), "I")
    assert g.edges == [(0, 0)] and g.capacity == {0: 1}
    assert build_graph(st, F(1), "A", Split.VALUATION).edges == []
    assert build_graph(st, AugPrice.right_of(1), "I").edges == []
    with pytest.raises(ValueError):
        build_graph(st, 0, "I")


def test_reachable_buyers_examples():
    g = PrefGraph.from_edges({1: 1}, [(1, 0), (1, 9)])
    m = BMatching({0: 1})
    assert reachable_buyers(g, m, set()) == set()
    assert reachable_buyers(g, m, {9}) == {1}
    # the target is wanted by buyer 1 only; buyer 2 wants the item buyer 1 holds
    chain = PrefGraph.from_edges({1: 1, 2: 1}, [(1, 0), (1, 9), (2, 0)])
    assert reachable_buyers(chain, BMatching({0: 1}), {9}) == {1, 2}
    # buyer 2 holding an unrelated item is not on any path
    apart = PrefGraph.from_edges({1: 1, 2: 1}, [(1, 0), (1, 9), (2, 5)])
    assert reachable_buyers(apart, BMatching({0: 1, 5: 2}), {9}) == {1}


def test_reachable_rejects_matched_targets():
    g = PrefGraph.from_edges({0: 1}, [(0, 0)])
    with pytest.raises(ValueError):
        reachable_buyers(g, BMatching({0: 0}), {0})


def test_matching_is_deterministic():
    rng = np.random.default_rng(3)
    for _ in range(50):
        g, marked = random_graph(rng)
        assert max_bmatching(g).owner == max_bmatching(g).owner
        assert max_bmatching_min_marked(g, marked).owner == max_bmatching_min_marked(g, marked).owner


def test_against_brute_force_sample():
    rng = np.random.default_rng(20)
    for _ in range(120):
        g, marked = random_graph(rng, max_product=9)
        m = max_bmatching(g)
        mm = max_bmatching_min_marked(g, marked)
        assert m.is_valid(g) and mm.is_valid(g)
        assert m.size == mm.size == max_size(g)
        assert len(mm.matched_items() & marked) == min_marked_among_maximum(g, marked)


def test_reachable_against_forward_search_and_paths():
    rng = np.random.default_rng(21)
    for _ in range(150):
        g, _ = random_graph(rng)
        m = max_bmatching(g)
        free = set(g.items) - m.matched_items()
        found = reachable_buyers(g, m, free)
        assert found == alternating_reachable(g, m.owner, free)
        for i in found:
            path = alternating_path(g, m, i, free)
            assert path is not None and path[0] == i and path[-1] in free
            flipped = flip_path(m, path)
            assert flipped.size == m.size + 1
            # the matching is maximum, so every buyer with a path is saturated
            assert len(m.items_of(i)) == g.capacity[i] and not flipped.is_valid(g)


def test_matching_size_shrinks_as_price_rises():
    inst = Instance.build(3, [(3, 6, [0, 1, 2]), (2, 2, [0, 1]), (4, 4, [2])])
    st = MarketState(inst)
    sizes = [max_bmatching(build_graph(st, F(k, 2), "I")).size for k in range(1, 9)]
    assert sizes == sorted(sizes, reverse=True)
