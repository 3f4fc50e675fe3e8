from itertools import permutations

import pytest

from isospectral.partitions import (
    Chain,
    OrderedPartition,
    chain_partition,
    coarsenings_by_one,
    enumerate_ordered_partitions,
    is_refinement,
    refinements_by_one,
    subsets_in_order,
)

P = OrderedPartition.of


def _refines_oracle(fine, coarse):
    # each fine block sits inside one coarse block, and the order is monotone
    where = []
    for b in fine.blocks:
        hits = [k for k, c in enumerate(coarse.blocks) if b <= c]
        if len(hits) != 1:
            return False
        where.append(hits[0])
    return where == sorted(where)


@pytest.mark.parametrize("d, count", [(1, 1), (2, 3), (3, 13), (4, 75), (5, 541)])
def test_enumeration_counts(d, count):
    parts = list(enumerate_ordered_partitions(d))
    assert len(parts) == count
    assert len(set(parts)) == count


def test_enumeration_is_lazy_and_guarded():
    gen = enumerate_ordered_partitions(10)
    assert next(gen).d == 10
    with pytest.raises(ValueError):
        next(enumerate_ordered_partitions(11))
    with pytest.raises(ValueError):
        next(enumerate_ordered_partitions(0))


def test_validation():
    with pytest.raises(ValueError):
        P({0}, {0, 1})
    with pytest.raises(ValueError):
        P({0}, set())
    with pytest.raises(ValueError):
        P({0}, {2})
    with pytest.raises(ValueError):
        OrderedPartition(())


def test_labels_and_str():
    p = P({0}, {1, 2})
    assert str(p) == "({1},{2,3})"
    assert p.to_labels() == [[1], [2, 3]]
    assert OrderedPartition.from_labels([[1], [2, 3]]) == p
    assert p.dim == 1 and p.r == 2 and p.d == 3
    assert [list(r) for r in p.row_blocks()] == [[0], [1, 2]]


def test_refinement_examples():
    p = P({0, 1})
    assert is_refinement(p, p)
    assert is_refinement(P({0}, {1}), p)
    assert is_refinement(P({1}, {0}), p)
    assert not is_refinement(P({0}, {1}), P({1}, {0}))
    assert not is_refinement(p, P({0}, {1}))


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_refinement_matches_oracle(d):
    parts = list(enumerate_ordered_partitions(d))
    for a in parts:
        for b in parts:
            assert is_refinement(a, b) == _refines_oracle(a, b)


def test_chain_examples():
    assert P({0, 1}).chain() == Chain((frozenset({0, 1}),))
    assert P({0}, {1}).chain() == Chain((frozenset({0, 1}), frozenset({1})))
    with pytest.raises(ValueError):
        Chain((frozenset({0, 1}), frozenset({0, 1})))
    with pytest.raises(ValueError):
        Chain((frozenset({1}),))


@pytest.mark.parametrize("d", range(1, 6))
def test_chain_round_trip(d):
    for p in enumerate_ordered_partitions(d):
        c = chain_partition(p)
        assert isinstance(c, Chain)
        assert chain_partition(c) == p


def test_smallest_containing():
    c = P({0}, {1}, {2}).chain()
    assert c.smallest_containing(frozenset({2})) == 2
    assert c.smallest_containing(frozenset({1, 2})) == 1
    assert c.smallest_containing(frozenset({0, 2})) == 0


def test_covers_change_rank_by_one():
    for p in enumerate_ordered_partitions(4):
        for q in coarsenings_by_one(p):
            assert is_refinement(p, q) and q.r == p.r - 1
        for q in refinements_by_one(p):
            assert is_refinement(q, p) and q.r == p.r + 1


def test_refinements_are_all_covers():
    parts = list(enumerate_ordered_partitions(4))
    for p in parts:
        covers = {q for q in parts if q.r == p.r + 1 and is_refinement(q, p)}
        assert covers == set(refinements_by_one(p))


def test_subset_order():
    subs = subsets_in_order(range(3))
    assert [sorted(s) for s in subs] == [[0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2]]


def test_discrete_partitions_are_permutations():
    got = {p for p in enumerate_ordered_partitions(3) if p.r == 3}
    assert got == {OrderedPartition.discrete(s) for s in permutations(range(3))}
