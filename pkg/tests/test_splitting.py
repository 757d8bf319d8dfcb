import itertools
import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from virialtrees.graphcore import CapExceededError, LabeledTree, enumerate_trees, tree_from_prufer
from virialtrees.series import t1_series
from virialtrees.splitting import (
    candidate_splittings,
    classify_trees,
    count_faithful_mergings,
    count_splittable,
    faithful_merging_formula,
    faithful_splittings,
    finest_splitting,
    is_faithful,
    max_splittability,
    merge_trees,
    merging_graph,
    splittable_rows,
)

import oracles


def T(n, *edges, root=0):
    return LabeledTree.from_edges(n, edges, root)


# ---------------------------------------------------------------- merging

def test_merge_examples():
    assert merge_trees([T(3, (1, 2)), T(3, (2, 3))]).proper
    assert merge_trees([T(3, (1, 2)), T(3, (2, 3))]).tree() == T(3, (1, 2), (2, 3))
    disjoint = merge_trees([T(4, (1, 2)), T(4, (3, 4))])
    assert not disjoint.connected and not disjoint.proper
    doubled = merge_trees([T(5, (1, 2), (2, 3)), T(5, (1, 2)), T(5, (4, 5))])
    assert not doubled.simple and not doubled.connected and not doubled.proper
    with pytest.raises(ValueError):
        doubled.tree()


def test_merging_graph_examples():
    assert merging_graph([{1, 2}, {2, 3}]).is_tree()
    cyc = merging_graph([{1, 2}, {2, 3}, {3, 1}])
    assert len(cyc.edges) == 6 and not cyc.is_tree()
    assert merging_graph([{1, 2, 3}]).is_tree()
    with pytest.raises(ValueError):
        merging_graph([{1, 2, 3}, {2, 3, 4}])


def _small_parts(n):
    for r in (1, 2):
        for es in itertools.combinations(itertools.combinations(range(1, n + 1), 2), r):
            vs = {v for e in es for v in e}
            if len(vs) == r + 1 and oracles.connected(vs, es):
                yield LabeledTree.from_edges(n, es)


def _check_properness(parts):
    merged = merge_trees(parts)
    try:
        mg = merging_graph([p.labels for p in parts])
    except ValueError:
        assert not merged.proper
        return
    assert merged.proper == mg.is_tree()


def test_properness_iff_merging_tree_single_edges():
    # every collection of up to four distinct single-edge parts over [6]
    edges = [T(6, e) for e in itertools.combinations(range(1, 7), 2)]
    for k in range(1, 5):
        for parts in itertools.combinations(edges, k):
            _check_properness(parts)


def test_properness_iff_merging_tree_small_pool():
    pool = list(_small_parts(5))
    for k in range(1, 4):
        for parts in itertools.combinations(pool, k):
            _check_properness(parts)


# ------------------------------------------------------------ faithfulness

def test_is_faithful_examples():
    path = T(3, (1, 2), (2, 3))
    assert is_faithful(path, [T(3, (1, 2)), T(3, (2, 3))])
    star = T(3, (1, 2), (1, 3))
    assert not is_faithful(star, [T(3, (1, 2)), T(3, (1, 3))])
    for tree in enumerate_trees(4):
        assert is_faithful(tree, [tree])


def test_is_faithful_rejects_improper():
    path = T(3, (1, 2), (2, 3))
    with pytest.raises(ValueError):
        is_faithful(path, [T(3, (1, 2))])
    with pytest.raises(ValueError):
        is_faithful(path, [T(3, (1, 2)), T(3, (1, 3))])


def test_parts_rooted_at_attachment_vertex():
    # 1-2-3-4 cut at 3: the lower part {3-4} hangs from 3
    tree = T(4, (1, 2), (2, 3), (3, 4))
    d = finest_splitting(tree)
    assert len(d) == 3
    assert sorted(p.root for p in d.parts) == [1, 2, 3]
    assert d.merging.is_tree() and d.faithful


def test_max_splittability_examples():
    assert max_splittability(T(2, (1, 2))) == 1
    assert max_splittability(T(3, (1, 2), (2, 3))) == 2
    assert max_splittability(T(3, (1, 2), (1, 3))) == 1


@pytest.mark.parametrize("n", range(2, 7))
def test_max_splittability_matches_brute_force(n):
    for tree in enumerate_trees(n):
        assert max_splittability(tree) == oracles.brute_max_splittability(tree.edges), tree.edges


@given(st.lists(st.integers(1, 7), min_size=5, max_size=5))
@settings(max_examples=40, deadline=None)
def test_max_splittability_brute_force_n7_sample(seq):
    tree = tree_from_prufer(seq)
    assert max_splittability(tree) == oracles.brute_max_splittability(tree.edges)


@pytest.mark.parametrize("n", range(2, 7))
def test_pruning_is_exact(n):
    for tree in enumerate_trees(n):
        assert max_splittability(tree, prune=True) == max_splittability(tree, prune=False)


def test_candidate_splittings_are_edge_partitions_into_subtrees():
    tree = T(5, (1, 2), (2, 3), (2, 4), (4, 5))
    seen = set()
    for d in candidate_splittings(tree, prune=False):
        bits = [p.bits for p in d.parts]
        assert sum(bits) == tree.bits and all(a & b == 0 for a, b in itertools.combinations(bits, 2))
        assert all(p.check() for p in d.parts)
        assert d.merging.is_tree()
        seen.add(tuple(sorted(bits)))
    # 4 edges; partitions into connected classes, counted independently
    brute = sum(1 for blocks in oracles.edge_partitions(tree.edges)
                if all(oracles.connected({v for e in b for v in e}, b) for b in blocks))
    assert len(seen) == brute


def test_faithful_splittings_subset():
    tree = T(5, (1, 2), (2, 3), (2, 4), (4, 5))
    faithful = list(faithful_splittings(tree))
    assert faithful and all(d.faithful for d in faithful)
    assert max(len(d) for d in faithful) == max_splittability(tree)


# ---------------------------------------------------------- classification

@pytest.mark.parametrize("n", range(2, 8))
def test_classification_counts(n):
    table = classify_trees(n)
    assert table[1] == (n - 2) ** (n - 2)
    assert sum(table.values()) == n ** (n - 2)
    t1 = t1_series(n - 1)
    for l in range(1, n):
        assert table.get(l, 0) == math.factorial(n - 1) * (t1 ** l)[n - 1]


def test_small_count_examples():
    assert count_splittable(3, 1) == 1 and count_splittable(3, 2) == 2
    assert [count_splittable(4, l) for l in (1, 2, 3)] == [4, 6, 6]
    assert splittable_rows(4) == [(4, 1, 4), (4, 2, 6), (4, 3, 6)]
    with pytest.raises(ValueError):
        count_splittable(4, 0)
    with pytest.raises(CapExceededError):
        classify_trees(10)


def test_classification_parallel_matches_serial():
    assert classify_trees(6, workers=2, prune=False) == classify_trees(6)


# ---------------------------------------------------------- merging counts

def _refined_formula(parts):
    # k! n! / prod over distinct rooted shapes (multiplicity)! * prod (i!)^k_i
    sizes = [p.n - 1 for p in parts]
    k, n = len(parts), sum(sizes)
    denom = 1
    for m in Counter(p.bits for p in parts).values():
        denom *= math.factorial(m)
    for i in sizes:
        denom *= math.factorial(i)
    return math.factorial(k) * math.factorial(n) // denom


E1 = T(2, (1, 2))
STAR = T(3, (1, 2), (1, 3))
P2 = T(3, (1, 2), (2, 3))
P3 = T(3, (1, 3), (2, 3))


def test_merging_count_examples():
    assert count_faithful_mergings([E1, E1]) == 2 == faithful_merging_formula([1, 1])
    assert count_faithful_mergings([E1]) == 1
    for shape in (STAR, P2, P3):
        assert count_faithful_mergings([shape, E1]) == 6 == faithful_merging_formula([2, 1])


@pytest.mark.parametrize("parts", [
    [E1, E1, E1], [STAR, STAR], [P2, P2], [STAR, P2], [P2, P3], [STAR, P3], [E1, E1, STAR],
    [T(4, (1, 2), (2, 3), (3, 4)), E1],
])
def test_merging_counts_shape_refined(parts):
    got = count_faithful_mergings(parts)
    assert got == _refined_formula(parts)
    if len({p.bits for p in parts if p.n == parts[0].n}) == 1 or len({p.n for p in parts}) == len(parts):
        assert got == faithful_merging_formula([p.n - 1 for p in parts])


def test_merging_count_size_only_formula_undercounts_mixed_shapes():
    assert count_faithful_mergings([STAR, P2]) == 2 * faithful_merging_formula([2, 2])


def test_merging_count_input_checks():
    with pytest.raises(ValueError):
        count_faithful_mergings([])
    with pytest.raises(ValueError):
        count_faithful_mergings([E1, E1], n=3)
    with pytest.raises(ValueError):
        count_faithful_mergings([T(3, (1, 2), (2, 3), root=2)])
