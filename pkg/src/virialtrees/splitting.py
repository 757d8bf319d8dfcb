"""Mergings and splittings of labeled trees under the Penrose scheme.

A splitting of a tree is a partition of its edges into subtrees that meet
only at single shared vertices.  It is *faithful* when the Penrose
completion of the whole tree adds exactly the union of the edges added by
the completions of the parts.  Each part is completed with generations
measured from its attachment vertex, i.e. the part's vertex closest to the
whole tree's root; the completion rules never compare the root's own label,
so this makes the verdict invariant under order-preserving relabelings.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from ._parallel import parallel_map
from .graphcore import (
    MAX_TREE_N,
    CapExceededError,
    LabeledTree,
    bfs,
    edge_bits,
    edge_pairs,
    pair_table,
    enumerate_trees,
    tree_from_prufer,
)
from .penrose import completion_bits, penrose_completion


# ---------------------------------------------------------------- mergings

@dataclass(frozen=True)
class MergeResult:
    n: int
    labels: frozenset
    multiplicity: tuple  # ((i, j), m) pairs in lexicographic order

    @property
    def simple(self) -> bool:
        return all(m == 1 for _, m in self.multiplicity)

    @property
    def connected(self) -> bool:
        adj: dict[int, list[int]] = {}
        for (i, j), _ in self.multiplicity:
            adj.setdefault(i, []).append(j)
            adj.setdefault(j, []).append(i)
        dist, _ = bfs(adj, min(self.labels))
        return len(dist) == len(self.labels)

    @property
    def acyclic(self) -> bool:
        parent = {v: v for v in self.labels}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for (i, j), m in self.multiplicity:
            if m > 1:
                return False
            ri, rj = find(i), find(j)
            if ri == rj:
                return False
            parent[ri] = rj
        return True

    @property
    def proper(self) -> bool:
        return self.simple and self.connected and self.acyclic

    def tree(self) -> LabeledTree:
        if not self.proper:
            raise ValueError("merging is not a tree")
        return LabeledTree.from_edges(self.n, [e for e, _ in self.multiplicity])


def merge_trees(parts: Sequence[LabeledTree]) -> MergeResult:
    """Edge-multiset union of trees on (possibly overlapping) label subsets."""
    if not parts:
        raise ValueError("need at least one tree")
    n = max(p.n for p in parts)
    mult: Counter = Counter()
    labels: set[int] = set()
    for p in parts:
        labels |= p.labels
        mult.update(p.edges)
    return MergeResult(n, frozenset(labels), tuple(sorted(mult.items())))


@dataclass(frozen=True)
class MergingGraph:
    """Bipartite graph between parts ``0..k-1`` and shared labels (junctions)."""

    parts: int
    junctions: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]  # (part index, junction label)

    def is_tree(self) -> bool:
        nodes = [("p", i) for i in range(self.parts)] + [("j", v) for v in self.junctions]
        if len(self.edges) != len(nodes) - 1:
            return False
        adj: dict = {}
        for i, v in self.edges:
            adj.setdefault(("p", i), []).append(("j", v))
            adj.setdefault(("j", v), []).append(("p", i))
        dist, _ = bfs(adj, nodes[0])
        return len(dist) == len(nodes)


def merging_graph(vertex_sets: Sequence[frozenset | set]) -> MergingGraph:
    sets = [frozenset(s) for s in vertex_sets]
    edges = set()
    for a, b in itertools.combinations(range(len(sets)), 2):
        common = sets[a] & sets[b]
        if len(common) >= 2:
            raise ValueError(
                f"parts {a} and {b} share {len(common)} labels; a proper merging needs at most one")
        for v in common:
            edges.add((a, v))
            edges.add((b, v))
    junctions = tuple(sorted({v for _, v in edges}))
    return MergingGraph(len(sets), junctions, tuple(sorted(edges)))


# ---------------------------------------------------------- faithfulness

def attachment_roots(whole: LabeledTree, vertex_sets) -> list[int]:
    """For each part, its vertex nearest the whole tree's root."""
    dist, _ = bfs(whole.adjacency(), whole.root)
    return [min(vs, key=lambda v: (dist[v], v)) for vs in vertex_sets]


def _part_extra(n: int, part_bits: int, root: int) -> int:
    labels = {v for e in edge_pairs(n, part_bits) for v in e}
    adj: dict[int, list[int]] = {}
    for i, j in edge_pairs(n, part_bits):
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    dist, pred = bfs(adj, root)
    return completion_bits(n, part_bits, labels, dist, pred)


def _faithful_bits(whole: LabeledTree, whole_extra: int, part_bits: Sequence[int]) -> bool:
    sets = [{v for e in edge_pairs(whole.n, b) for v in e} for b in part_bits]
    roots = attachment_roots(whole, sets)
    union = 0
    for b, r in zip(part_bits, roots):
        union |= _part_extra(whole.n, b, r)
    return union == whole_extra


def is_faithful(whole: LabeledTree, parts: Sequence[LabeledTree]) -> bool:
    """Whether ``parts`` is a faithful splitting of ``whole``.

    Condition (i), edge union, is a precondition: the parts must merge
    properly into exactly ``whole``.  Condition (ii) compares completions,
    with each part re-rooted at its attachment vertex.
    """
    merged = merge_trees(parts)
    if not merged.proper or merged.labels != whole.labels:
        raise ValueError("parts do not merge properly")
    if edge_bits(whole.n, [e for e, _ in merged.multiplicity]) != whole.bits:
        raise ValueError("parts do not merge into the given tree")
    return _faithful_bits(whole, penrose_completion(whole).extra, [p.bits for p in parts])


# ------------------------------------------------------------- splittings

@dataclass(frozen=True)
class SplitDecomposition:
    whole: LabeledTree
    parts: tuple[LabeledTree, ...]
    merging: MergingGraph
    faithful: bool

    def __len__(self) -> int:
        return len(self.parts)


def _set_partitions(items: list) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in _set_partitions(rest):
        for k in range(len(p)):
            yield p[:k] + [[first] + p[k]] + p[k + 1:]
        yield [[first]] + p


class _Splitter:
    """Candidate splittings of one tree, grouped by part count.

    At every vertex the incident edges are grouped; parts are the connected
    classes of edges under "same group at a shared vertex".  With ``prune``
    the incident edges along the tree path of every extra edge of R(tau) are
    forced into one group: a part's completion only adds pairs inside the
    part, so an extra edge whose ends end up in different parts can never be
    reproduced.  Pruning therefore discards only unfaithful candidates.
    """

    def __init__(self, tree: LabeledTree, prune: bool = True):
        self.tree = tree
        n = tree.n
        index = pair_table(n)[1]
        adj = tree.adjacency()
        self.dist, self.pred = bfs(adj, tree.root)
        self.extra = completion_bits(n, tree.bits, tree.labels, self.dist, self.pred)
        self.edge_list = [1 << index[e] for e in tree.edges]
        pos = {b: k for k, b in enumerate(self.edge_list)}

        def ebit(a, b):
            return 1 << index[(a, b) if a < b else (b, a)]

        # per-vertex union-find over incident edges
        owner = {(v, ebit(v, w)): (v, ebit(v, w)) for v in adj for w in adj[v]}

        def find(x):
            while owner[x] != x:
                owner[x] = owner[owner[x]]
                x = owner[x]
            return x

        if prune:
            for x, y in edge_pairs(n, self.extra):
                path = self._path(x, y)
                for a, w, b in zip(path, path[1:], path[2:]):
                    owner[find((w, ebit(w, a)))] = find((w, ebit(w, b)))
        self.options = []  # per vertex: list of groupings, each a list of edge-index lists
        self.fixed = []  # vertices whose incident edges all share one group
        for v in sorted(adj):
            classes: dict = {}
            for w in adj[v]:
                classes.setdefault(find((v, ebit(v, w))), []).append(pos[ebit(v, w)])
            cls = sorted(sorted(c) for c in classes.values())
            if len(cls) > 1:
                groupings = [[sorted(i for c in g for i in c) for g in p] for p in _set_partitions(cls)]
                groupings.sort(key=len, reverse=True)
                self.options.append(groupings)
            else:
                self.fixed.append(cls[0])
        self.max_parts = 1 + sum(len(opts[0]) - 1 for opts in self.options)

    def _path(self, x: int, y: int) -> list[int]:
        up_x, up_y = [x], [y]
        while up_x[-1] != up_y[-1]:
            if self.dist[up_x[-1]] >= self.dist[up_y[-1]]:
                up_x.append(self.pred[up_x[-1]])
            else:
                up_y.append(self.pred[up_y[-1]])
        return up_x + up_y[-2::-1]

    def candidates(self, parts: int) -> Iterator[list[int]]:
        """Edge-bit lists of every candidate splitting with exactly ``parts`` parts."""
        opts = self.options
        slack = [0] * (len(opts) + 1)  # most extra parts the remaining vertices can add
        for k in range(len(opts) - 1, -1, -1):
            slack[k] = slack[k + 1] + len(opts[k][0]) - 1

        def walk(k, need, chosen):
            if need < 0 or need > slack[k]:
                return
            if k == len(opts):
                if need == 0:
                    yield list(chosen)
                return
            for grouping in opts[k]:
                chosen.append(grouping)
                yield from walk(k + 1, need - (len(grouping) - 1), chosen)
                chosen.pop()

        m = len(self.edge_list)
        for choice in walk(0, parts - 1, []):
            parent = list(range(m))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            for g in self.fixed:
                for i in g[1:]:
                    parent[find(i)] = find(g[0])
            for grouping in choice:
                for g in grouping:
                    for i in g[1:]:
                        parent[find(i)] = find(g[0])
            comp: dict[int, int] = {}
            for i, b in enumerate(self.edge_list):
                r = find(i)
                comp[r] = comp.get(r, 0) | b
            yield sorted(comp.values())

    def faithful(self, part_bits: Sequence[int]) -> bool:
        return _faithful_bits(self.tree, self.extra, part_bits)


def _decomposition(tree: LabeledTree, part_bits: Sequence[int], faithful: bool) -> SplitDecomposition:
    sets = [frozenset(v for e in edge_pairs(tree.n, b) for v in e) for b in part_bits]
    roots = attachment_roots(tree, sets)
    parts = tuple(LabeledTree(tree.n, b, r) for b, r in zip(part_bits, roots))
    return SplitDecomposition(tree, parts, merging_graph(sets), faithful)


def candidate_splittings(tree: LabeledTree, prune: bool = True) -> Iterator[SplitDecomposition]:
    """All candidate splittings (edge partitions into subtrees), faithful or not."""
    sp = _Splitter(tree, prune)
    for k in range(sp.max_parts, 0, -1):
        for bits in sp.candidates(k):
            yield _decomposition(tree, bits, sp.faithful(bits))


def faithful_splittings(tree: LabeledTree, prune: bool = True) -> Iterator[SplitDecomposition]:
    for d in candidate_splittings(tree, prune):
        if d.faithful:
            yield d


def _max_splittability(tree: LabeledTree, prune: bool) -> tuple[int, list[int]]:
    sp = _Splitter(tree, prune)
    for k in range(sp.max_parts, 1, -1):
        for bits in sp.candidates(k):
            if sp.faithful(bits):
                return k, bits
    return 1, [tree.bits]


def max_splittability(tree: LabeledTree, prune: bool = True) -> int:
    """Largest number of parts over all faithful splittings (1 = non-splittable)."""
    return _max_splittability(tree, prune)[0]


def finest_splitting(tree: LabeledTree) -> SplitDecomposition:
    k, bits = _max_splittability(tree, True)
    return _decomposition(tree, bits, True)


# ---------------------------------------------------------- classification

def _classify_chunk(args) -> dict[int, int]:
    n, first, prune = args
    tally: Counter[int] = Counter()
    for rest in itertools.product(range(1, n + 1), repeat=n - 3):
        tally[max_splittability(tree_from_prufer((first,) + rest), prune)] += 1
    return dict(tally)


_classified: dict[int, dict[int, int]] = {}


def classify_trees(n: int, workers: int | None = None, prune: bool = True) -> dict[int, int]:
    """Map l -> number of l-splittable trees on [n]."""
    if not 2 <= n <= MAX_TREE_N:
        raise CapExceededError(f"classification supports 2 <= n <= {MAX_TREE_N}, got n={n}")
    if prune and n in _classified:
        return dict(_classified[n])
    if n == 2:
        result = {1: 1}
    else:
        chunks = [(n, first, prune) for first in range(1, n + 1)]
        tally: Counter[int] = Counter()
        for part in parallel_map(_classify_chunk, chunks, workers):
            tally.update(part)
        result = dict(sorted(tally.items()))
    if prune:
        _classified[n] = result
    return dict(result)


def count_splittable(n: int, l: int, workers: int | None = None) -> int:
    """Number of l-splittable trees on [n] under the Penrose scheme."""
    if l < 1:
        raise ValueError("l must be positive")
    return classify_trees(n, workers).get(l, 0)


def splittable_rows(n: int, workers: int | None = None) -> list[tuple[int, int, int]]:
    """(n, l, count) rows for l = 1 .. n-1."""
    table = classify_trees(n, workers)
    return [(n, l, table.get(l, 0)) for l in range(1, max(n, 2))]


# ------------------------------------------------------- merging counts

def faithful_merging_formula(sizes: Sequence[int]) -> int:
    """k! n! / prod_i k_i! (i!)^k_i for parts with ``sizes`` edges each."""
    k, n = len(sizes), sum(sizes)
    denom = 1
    for i, ki in Counter(sizes).items():
        denom *= math.factorial(ki) * math.factorial(i) ** ki
    return math.factorial(k) * math.factorial(n) // denom


def count_faithful_mergings(parts: Sequence[LabeledTree], n: int | None = None) -> int:
    """Brute-force count of Penrose-faithful mergings of ``parts``.

    Each part is a tree on [i+1] rooted at 1.  A labeling sends the part's
    root to its attachment vertex and its labels 2..i+1 order-preservingly
    onto i labels of [n+1]; it counts when the merged graph is a tree on
    [n+1] that the relabeled parts split faithfully.  Labelings producing
    the same collection of relabeled parts are counted once.
    """
    if not parts:
        raise ValueError("need at least one part")
    for p in parts:
        if not p.spanning or p.root != 1 or p.n < 2:
            raise ValueError("each part must be a tree on [i+1] (i >= 1) rooted at 1")
    sizes = [p.n - 1 for p in parts]
    total = sum(sizes)
    if n is not None and n != total:
        raise ValueError(f"parts have {total} edges in total; expected n = {n} (vertex budget n + k)")
    n = total
    if n + 1 > MAX_TREE_N:
        raise CapExceededError(f"merging counts support n + 1 <= {MAX_TREE_N}")
    labels = range(1, n + 2)

    def images(p):
        for r in labels:
            for block in itertools.combinations([v for v in labels if v != r], p.n - 1):
                relabel = {1: r, **{old: new for old, new in zip(range(2, p.n + 1), block)}}
                yield r, edge_bits(n + 1, [(relabel[a], relabel[b]) for a, b in p.edges])

    seen = set()
    full = frozenset(labels)
    for combo in itertools.product(*[list(images(p)) for p in parts]):
        bits = [b for _, b in combo]
        union = 0
        for b in bits:
            if union & b:
                break
            union |= b
        else:
            if union.bit_count() != n:
                continue
            merged = merge_trees([LabeledTree(n + 1, b, r) for r, b in combo])
            if not merged.proper or merged.labels != full:
                continue
            whole = LabeledTree(n + 1, union)
            sets = [{v for e in edge_pairs(n + 1, b) for v in e} for b in bits]
            if [r for r, _ in combo] != attachment_roots(whole, sets):
                continue
            if _faithful_bits(whole, penrose_completion(whole).extra, bits):
                seen.add(tuple(sorted(bits)))
    return len(seen)


@lru_cache(maxsize=None)
def tree_splittabilities(n: int) -> tuple[tuple[LabeledTree, int], ...]:
    """Every tree on [n] paired with its maximal splittability (memoized)."""
    return tuple((t, max_splittability(t)) for t in enumerate_trees(n))
