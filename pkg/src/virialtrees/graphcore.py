"""Labeled graphs and trees on [n] with bit-field edge sets.

Edge ``{i, j}`` (``1 <= i < j <= n``) lives at bit ``pair_index(n, i, j)``,
the position of ``(i, j)`` in the lexicographic list
``(1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n)``.  The mapping depends on
``n`` and is fixed, so serialized edge sets are stable across runs.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

MAX_CONNECTED_N = 8
MAX_TREE_N = 9

# connected-graph masks are materialized (and cached) up to this size
_CACHED_MASK_N = 7
_MASK_CHUNK = 1 << 20


class CapExceededError(ValueError):
    """Requested size is outside the supported enumeration range."""


@lru_cache(maxsize=None)
def pair_table(n: int) -> tuple[tuple[tuple[int, int], ...], dict[tuple[int, int], int]]:
    pairs = tuple(itertools.combinations(range(1, n + 1), 2))
    return pairs, {p: k for k, p in enumerate(pairs)}


def pair_index(n: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    if not 1 <= i < j <= n:
        raise ValueError(f"({i}, {j}) is not a pair of distinct labels in [1, {n}]")
    return pair_table(n)[1][(i, j)]


def edge_bits(n: int, pairs) -> int:
    bits = 0
    for i, j in pairs:
        bits |= 1 << pair_index(n, i, j)
    return bits


def edge_pairs(n: int, bits: int) -> list[tuple[int, int]]:
    """Pairs set in ``bits``, in ascending bit order (= lexicographic)."""
    pairs = pair_table(n)[0]
    if bits >> len(pairs):
        raise ValueError(f"bit field {bits:#x} has bits beyond the {len(pairs)} pairs of [{n}]")
    out = []
    while bits:
        low = bits & -bits
        out.append(pairs[low.bit_length() - 1])
        bits ^= low
    return out


def edges_to_hex(n: int, bits: int) -> str:
    width = max(1, -(-len(pair_table(n)[0]) // 4))
    return format(bits, f"0{width}x")


def edges_from_hex(n: int, text: str) -> int:
    bits = int(text, 16)
    edge_pairs(n, bits)  # range check
    return bits


def _adjacency(n: int, bits: int) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {}
    for i, j in edge_pairs(n, bits):
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    return adj


def bfs(adj: dict[int, list[int]], root: int) -> tuple[dict[int, int], dict[int, int]]:
    """Distances and BFS predecessors from ``root``; the root has no predecessor entry."""
    dist = {root: 0}
    pred: dict[int, int] = {}
    queue = [root]
    for v in queue:
        for w in adj.get(v, ()):
            if w not in dist:
                dist[w] = dist[v] + 1
                pred[w] = v
                queue.append(w)
    return dist, pred


@dataclass(frozen=True)
class LabeledGraph:
    """A simple graph on the vertex set [n]."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.bits < 0 or self.bits >> len(pair_table(self.n)[0]):
            raise ValueError(f"edge bits {self.bits:#x} invalid for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, pairs) -> "LabeledGraph":
        return cls(n, edge_bits(n, pairs))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return edge_pairs(self.n, self.bits)

    @property
    def num_edges(self) -> int:
        return self.bits.bit_count()

    def adjacency(self) -> dict[int, list[int]]:
        return _adjacency(self.n, self.bits)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.bits >> pair_index(self.n, i, j) & 1)

    def is_connected(self) -> bool:
        dist, _ = bfs(self.adjacency(), 1)
        return len(dist) == self.n

    def hex(self) -> str:
        return edges_to_hex(self.n, self.bits)


@dataclass(frozen=True)
class LabeledTree(LabeledGraph):
    """A tree whose vertices are the endpoints of its edges, inside ambient [n].

    Whole trees span [n]; parts of a splitting live on label subsets.  ``root``
    is the vertex generations are measured from: label 1 when present,
    otherwise it must be given (0 selects the minimum label).
    """

    root: int = 0
    labels: frozenset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        super().__post_init__()
        pairs = edge_pairs(self.n, self.bits)
        if pairs:
            labels = frozenset(v for e in pairs for v in e)
        else:
            labels = frozenset({self.root or 1})
        object.__setattr__(self, "labels", labels)
        if not self.root:
            object.__setattr__(self, "root", 1 if 1 in labels else min(labels))
        if self.root not in labels:
            raise ValueError(f"root {self.root} is not a vertex of the tree")
        if len(pairs) != len(labels) - 1:
            raise ValueError("edge count is not |V| - 1; not a tree")
        dist, _ = bfs(_adjacency(self.n, self.bits), self.root)
        if len(dist) != len(labels):
            raise ValueError("edge set is not connected; not a tree")

    @classmethod
    def from_edges(cls, n: int, pairs, root: int = 0) -> "LabeledTree":
        return cls(n, edge_bits(n, pairs), root)

    @property
    def spanning(self) -> bool:
        return len(self.labels) == self.n

    def check(self) -> bool:
        """Independently re-verify edge count, connectivity and acyclicity."""
        pairs = self.edges
        parent = {v: v for v in self.labels}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for i, j in pairs:
            ri, rj = find(i), find(j)
            if ri == rj:
                return False
            parent[ri] = rj
        roots = {find(v) for v in self.labels}
        return len(pairs) == len(self.labels) - 1 and len(roots) == 1

    def rerooted(self, root: int) -> "LabeledTree":
        return LabeledTree(self.n, self.bits, root)


def _check_range(n: int, lo: int, hi: int, what: str) -> None:
    if not lo <= n <= hi:
        raise CapExceededError(f"{what} supports {lo} <= n <= {hi}, got n={n}")


def _connected_filter(n: int, masks: np.ndarray) -> np.ndarray:
    pairs = pair_table(n)[0]
    reach = np.ones(masks.shape, dtype=np.uint32)  # bit v-1 set when vertex v reached
    for _ in range(n - 1):
        before = reach
        for b, (i, j) in enumerate(pairs):
            present = (masks >> np.uint32(b)) & np.uint32(1)
            ri = (reach >> np.uint32(i - 1)) & np.uint32(1)
            rj = (reach >> np.uint32(j - 1)) & np.uint32(1)
            reach = reach | ((present & ri) << np.uint32(j - 1)) | ((present & rj) << np.uint32(i - 1))
        if np.array_equal(before, reach):
            break
    return masks[reach == np.uint32((1 << n) - 1)]


def _connected_mask_chunks(n: int) -> Iterator[np.ndarray]:
    total = 1 << len(pair_table(n)[0])
    for start in range(0, total, _MASK_CHUNK):
        masks = np.arange(start, min(total, start + _MASK_CHUNK), dtype=np.uint32)
        yield _connected_filter(n, masks)


@lru_cache(maxsize=None)
def _cached_connected_masks(n: int) -> np.ndarray:
    out = np.concatenate(list(_connected_mask_chunks(n)))
    out.setflags(write=False)
    return out


def connected_masks(n: int) -> np.ndarray:
    """Ascending array of edge bit fields of all connected graphs on [n]."""
    _check_range(n, 1, MAX_CONNECTED_N, "connected-graph enumeration")
    if n <= _CACHED_MASK_N:
        return _cached_connected_masks(n)
    return np.concatenate(list(_connected_mask_chunks(n)))


def enumerate_connected(n: int) -> Iterator[LabeledGraph]:
    """Each connected labeled graph on [n] once, in ascending edge-bit order."""
    _check_range(n, 1, MAX_CONNECTED_N, "connected-graph enumeration")
    chunks = [_cached_connected_masks(n)] if n <= _CACHED_MASK_N else _connected_mask_chunks(n)
    for chunk in chunks:
        for m in chunk.tolist():
            yield LabeledGraph(n, m)


def tree_from_prufer(seq: Sequence[int], n: int | None = None) -> LabeledTree:
    """Decode a Prüfer sequence into the labeled tree on [len(seq) + 2]."""
    size = len(seq) + 2
    if n is not None and n != size:
        raise ValueError(f"a Prüfer sequence of length {len(seq)} encodes a tree on {size} vertices, not {n}")
    for s in seq:
        if not 1 <= s <= size:
            raise ValueError(f"Prüfer entry {s} outside [1, {size}]")
    degree = [1] * (size + 1)
    for s in seq:
        degree[s] += 1
    leaves = [v for v in range(1, size + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    pairs = []
    for s in seq:
        leaf = heapq.heappop(leaves)
        pairs.append((leaf, s))
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(leaves, s)
    pairs.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return LabeledTree.from_edges(size, pairs)


def prufer_from_tree(tree: LabeledTree) -> tuple[int, ...]:
    if not tree.spanning:
        raise ValueError("Prüfer encoding needs a tree spanning [n]")
    adj = {v: set(ws) for v, ws in tree.adjacency().items()}
    leaves = [v for v, ws in adj.items() if len(ws) == 1]
    heapq.heapify(leaves)
    seq = []
    for _ in range(tree.n - 2):
        leaf = heapq.heappop(leaves)
        (nb,) = adj.pop(leaf)
        adj[nb].discard(leaf)
        seq.append(nb)
        if len(adj[nb]) == 1:
            heapq.heappush(leaves, nb)
    return tuple(seq)


def enumerate_trees(n: int) -> Iterator[LabeledTree]:
    """All n**(n-2) labeled trees on [n], in lexicographic Prüfer order."""
    _check_range(n, 1, MAX_TREE_N, "tree enumeration")
    if n == 1:
        yield LabeledTree(1, 0)
        return
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        yield tree_from_prufer(seq)


def tree_distances(tree: LabeledTree, root: int | None = None) -> list[int | None]:
    """Entry ``i-1`` is the edge distance from label ``i`` to ``root``.

    Labels that are not vertices of the tree (parts on label subsets) get ``None``.
    """
    root = tree.root if root is None else root
    if root not in tree.labels:
        raise ValueError(f"root {root} is not a vertex of the tree")
    dist, _ = bfs(tree.adjacency(), root)
    return [dist.get(v) for v in range(1, tree.n + 1)]
