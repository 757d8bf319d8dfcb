"""Penrose partition scheme: tree completion R(tau) and the partition check.

Generations are tree distances from the tree's root (label 1 for trees on
[n]).  A non-tree pair {i, j} is added to R(tau) when

* both ends are in the same generation, or
* ``d(j) = d(i) - 1`` and the predecessor of ``i`` has a smaller label than ``j``.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._parallel import parallel_map
from .graphcore import (
    CapExceededError,
    LabeledGraph,
    LabeledTree,
    bfs,
    connected_masks,
    edge_pairs,
    enumerate_trees,
    pair_table,
)

MAX_PARTITION_N = 7
# per-graph interval scans cost |C[n]| * n**(n-2); above this size only the
# interval-enumeration tally runs
MAX_SCAN_N = 6


class PartitionSchemeError(RuntimeError):
    """A connected graph did not land in exactly one Penrose interval."""


@dataclass(frozen=True)
class PenroseCompletion:
    tree: LabeledTree
    extra: int  # edge bits of E(R(tau)) \ E(tau)

    @property
    def full(self) -> int:
        return self.tree.bits | self.extra

    @property
    def extra_edges(self) -> list[tuple[int, int]]:
        return edge_pairs(self.tree.n, self.extra)

    def graph(self) -> LabeledGraph:
        return LabeledGraph(self.tree.n, self.full)

    def interval_size(self) -> int:
        return 1 << self.extra.bit_count()


def completion_bits(n: int, tree_bits: int, labels, dist: dict[int, int], pred: dict[int, int]) -> int:
    """Extra-edge bits for a tree given its generations and predecessors."""
    index = pair_table(n)[1]
    verts = sorted(labels)
    extra = 0
    for a, x in enumerate(verts):
        dx = dist[x]
        for y in verts[a + 1:]:
            dy = dist[y]
            if dx == dy:
                extra |= 1 << index[(x, y)]
            elif dx == dy + 1:
                if pred[x] < y:
                    extra |= 1 << index[(x, y)]
            elif dy == dx + 1:
                if pred[y] < x:
                    extra |= 1 << index[(x, y)]
    # pairs at adjacent generations that are tree edges satisfy neither rule
    # (the predecessor is the partner itself), and same-generation pairs are
    # never tree edges, so no masking is needed
    return extra & ~tree_bits


def penrose_completion(tree: LabeledTree) -> PenroseCompletion:
    """R(tau) for a tree, with generations measured from ``tree.root``."""
    dist, pred = bfs(tree.adjacency(), tree.root)
    return PenroseCompletion(tree, completion_bits(tree.n, tree.bits, tree.labels, dist, pred))


@lru_cache(maxsize=None)
def _completion_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    trees, fulls = [], []
    for tree in enumerate_trees(n):
        trees.append(tree.bits)
        fulls.append(penrose_completion(tree).full)
    t = np.array(trees, dtype=np.uint64)
    f = np.array(fulls, dtype=np.uint64)
    t.setflags(write=False)
    f.setflags(write=False)
    return t, f


def _interval_hits(n: int, graphs: np.ndarray) -> list[np.ndarray]:
    """For each graph, indices of trees tau with E(tau) <= E(G) <= E(R(tau))."""
    t, f = _completion_table(n)
    out = []
    for g in graphs.astype(np.uint64):
        inside = ((t & ~g) == 0) & ((g & ~f) == 0)
        out.append(np.flatnonzero(inside))
    return out


def penrose_tree_of_graph(graph: LabeledGraph) -> LabeledTree:
    """The unique tree whose Penrose interval contains ``graph``."""
    if graph.n > MAX_PARTITION_N:
        raise CapExceededError(f"interval search supports n <= {MAX_PARTITION_N}, got n={graph.n}")
    if not graph.is_connected():
        raise ValueError("graph is not connected")
    (hits,) = _interval_hits(graph.n, np.array([graph.bits], dtype=np.uint64))
    if len(hits) != 1:
        raise PartitionSchemeError(f"graph {graph.hex()} lies in {len(hits)} Penrose intervals")
    t, _ = _completion_table(graph.n)
    return LabeledTree(graph.n, int(t[hits[0]]))


@dataclass
class PartitionReport:
    n: int
    trees: int
    connected_graphs: int
    interval_total: int
    interval_sizes: dict[int, int]  # interval size -> number of trees
    covered: int  # connected graphs hit by exactly one interval
    assigned_by_scan: bool
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        return f"{self.covered}/{self.connected_graphs} covered, {len(self.violations)} violations"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trees": self.trees,
            "connected_graphs": self.connected_graphs,
            "interval_total": self.interval_total,
            "interval_sizes": {str(k): v for k, v in sorted(self.interval_sizes.items())},
            "covered": self.covered,
            "assigned_by_scan": self.assigned_by_scan,
            "violations": list(self.violations),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"n = {self.n}", f"trees = {self.trees}", f"connected graphs = {self.connected_graphs}",
                 f"sum of interval sizes = {self.interval_total}", "interval size histogram:"]
        lines += [f"  {size}: {count}" for size, count in sorted(self.interval_sizes.items())]
        lines += [f"violation: {v}" for v in self.violations]
        lines.append(self.summary())
        return "\n".join(lines)


def _scan_chunk(args):
    n, chunk = args
    return [len(h) for h in _interval_hits(n, chunk)]


def verify_partition(n: int, scan: bool | None = None, workers: int | None = None,
                     perturb: bool = False) -> PartitionReport:
    """Check that Penrose intervals partition the connected graphs on [n].

    Two independent tallies are made: every interval [tau, R(tau)] is
    expanded into its graphs and hit counts are accumulated per edge set; and
    (for ``n <= MAX_SCAN_N`` unless ``scan`` says otherwise) every connected
    graph is assigned by scanning all trees for interval membership.
    ``perturb`` drops one extra edge from the first tree that has one, as a
    negative control.
    """
    if not 1 <= n <= MAX_PARTITION_N:
        raise CapExceededError(f"verify_partition supports 1 <= n <= {MAX_PARTITION_N}, got n={n}")
    scan = n <= MAX_SCAN_N if scan is None else scan
    num_pairs = len(pair_table(n)[0])
    hits = np.zeros(1 << num_pairs, dtype=np.uint8)
    sizes: Counter[int] = Counter()
    total = trees = 0
    perturbed = False
    for tree in enumerate_trees(n):
        trees += 1
        extra = penrose_completion(tree).extra
        if perturb and not perturbed and extra:
            extra &= extra - 1
            perturbed = True
        size = 1 << extra.bit_count()
        sizes[size] += 1
        total += size
        sub = extra
        while True:
            g = tree.bits | sub
            hits[g] = min(hits[g] + 1, 255)
            if sub == 0:
                break
            sub = (sub - 1) & extra

    graphs = connected_masks(n)
    violations = []
    if total != len(graphs):
        violations.append(f"sum of interval sizes {total} != |C[{n}]| = {len(graphs)}")
    connected_hits = hits[graphs]
    for g in graphs[connected_hits != 1].tolist():
        violations.append(f"connected graph {g:#x} lies in {int(hits[g])} intervals")
    stray = int(hits.sum(dtype=np.int64) - connected_hits.sum(dtype=np.int64))
    if stray:
        violations.append(f"{stray} interval members are not connected graphs")
    covered = int(np.count_nonzero(connected_hits == 1))

    if scan:
        chunks = [(n, c) for c in np.array_split(graphs, max(1, len(graphs) // 4096))]
        counts = [k for part in parallel_map(_scan_chunk, chunks, workers) for k in part]
        for g, k in zip(graphs.tolist(), counts):
            if k != 1:
                violations.append(f"scan: connected graph {g:#x} matches {k} trees")
    return PartitionReport(n, trees, len(graphs), total, dict(sizes), covered, scan, violations)
