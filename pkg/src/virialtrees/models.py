"""Repulsive weight models and exact graph/tree weight sums.

Two models are supported:

* ``onepoint``: every particle sits on the single site 0, ``f = -1``.
* ``lattice:a=<int>``: sites in Z, hard core ``f(x, y) = -1`` when
  ``|x - y| < a`` and 0 otherwise.

Weights are integrals over positions with one vertex pinned at the origin
(translation invariance makes the choice of vertex irrelevant).  For the
lattice only configurations where every edge has a nonzero f matter, so
positions are generated from displacements along a BFS spanning tree, each
displacement in ``-(a-1) .. a-1``.  That is an exact bijection onto the
support of the product of f over the edges.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graphcore import LabeledGraph, LabeledTree, bfs, edge_pairs, pair_index
from .penrose import penrose_completion

# largest n for which cluster/virial coefficients are computed per model
ONEPOINT_MAX_N = 7
LATTICE_MAX_N = 6

_LATTICE_RE = re.compile(r"lattice:a=(\d+)")


@dataclass(frozen=True)
class WeightModel:
    kind: str
    a: int = 1

    def __post_init__(self):
        if self.kind not in ("onepoint", "lattice"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.a < 1:
            raise ValueError("lattice exclusion range a must be >= 1")
        if self.kind == "onepoint" and self.a != 1:
            raise ValueError("onepoint has no range parameter")

    @property
    def name(self) -> str:
        return "onepoint" if self.kind == "onepoint" else f"lattice:a={self.a}"

    @property
    def temperedness(self) -> Fraction:
        """C = sum over x of |f(0, x)|."""
        return Fraction(1 if self.kind == "onepoint" else 2 * self.a - 1)

    @property
    def u(self) -> Fraction:
        """Repulsion strength sup |f|; both models are hard core."""
        return Fraction(1)

    @property
    def max_n(self) -> int:
        return ONEPOINT_MAX_N if self.kind == "onepoint" else LATTICE_MAX_N

    def displacements(self) -> tuple[int, ...]:
        """Differences x_j - x_i with f(x_i, x_j) != 0."""
        if self.kind == "onepoint":
            return (0,)
        return tuple(range(-(self.a - 1), self.a))

    def __str__(self) -> str:
        return self.name


ONEPOINT = WeightModel("onepoint")


def parse_model(text: str) -> WeightModel:
    text = text.strip()
    if text == "onepoint":
        return ONEPOINT
    m = _LATTICE_RE.fullmatch(text)
    if m:
        return WeightModel("lattice", int(m.group(1)))
    raise ValueError(f"model must be 'onepoint' or 'lattice:a=<int>', got {text!r}")


def mayer_f(model: WeightModel, x: int, y: int) -> int:
    if model.kind == "onepoint":
        if x != 0 or y != 0:
            raise ValueError("onepoint has only the site 0")
        return -1
    return -1 if abs(x - y) < model.a else 0


@lru_cache(maxsize=64)
def _displacement_grid(model: WeightModel, k: int) -> np.ndarray:
    d = np.array(model.displacements(), dtype=np.int64)
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.stack(np.meshgrid(*([d] * k), indexing="ij"), axis=-1).reshape(-1, k)
    grid.setflags(write=False)
    return grid


def _positions(model: WeightModel, n: int, spanning_bits: int, root: int, labels) -> np.ndarray:
    """Array (configs, n+1) of positions; column v holds label v, pinned root at 0."""
    dist, pred = bfs(_adj(n, spanning_bits), root)
    order = sorted((v for v in labels if v != root), key=lambda v: dist[v])
    grid = _displacement_grid(model, len(order))
    pos = np.zeros((grid.shape[0], n + 1), dtype=np.int64)
    for col, v in enumerate(order):
        pos[:, v] = pos[:, pred[v]] + grid[:, col]
    return pos


def _adj(n: int, bits: int) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {}
    for i, j in edge_pairs(n, bits):
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    return adj


def _f_array(model: WeightModel, pos: np.ndarray, i: int, j: int) -> np.ndarray:
    return np.where(np.abs(pos[:, i] - pos[:, j]) < model.a, -1, 0)


def _bfs_tree_bits(graph: LabeledGraph, root: int = 1) -> int:
    dist, pred = bfs(graph.adjacency(), root)
    if len(dist) != graph.n:
        raise ValueError("graph is not connected")
    bits = 0
    for v, p in pred.items():
        bits |= 1 << pair_index(graph.n, v, p)
    return bits


def graph_weight_sum(model: WeightModel, graph: LabeledGraph, pin: int = 1) -> Fraction:
    """Sum over positions (vertex ``pin`` at 0) of the product of f over the edges."""
    if graph.n == 1:
        return Fraction(1)
    if model.kind == "onepoint":
        if not graph.is_connected():
            raise ValueError("graph is not connected")
        return Fraction((-1) ** graph.num_edges)
    span = _bfs_tree_bits(graph, pin)
    pos = _positions(model, graph.n, span, pin, range(1, graph.n + 1))
    prod = np.ones(pos.shape[0], dtype=np.int64)
    for i, j in graph.edges:
        prod *= _f_array(model, pos, i, j)
    return Fraction(int(prod.sum()))


def tree_weight(model: WeightModel, tree: LabeledTree, extra: int | None = None) -> Fraction:
    """Penrose tree weight: product of f over tree edges times (1 + f) over
    the completion's extra edges, root pinned at 0."""
    if extra is None:
        extra = penrose_completion(tree).extra
    if len(tree.labels) == 1:
        return Fraction(1)
    if model.kind == "onepoint":
        # 1 + f vanishes at the single site
        return Fraction(0 if extra else (-1) ** tree.num_edges)
    pos = _positions(model, tree.n, tree.bits, tree.root, tree.labels)
    prod = np.ones(pos.shape[0], dtype=np.int64)
    for i, j in tree.edges:
        prod *= _f_array(model, pos, i, j)
    for i, j in edge_pairs(tree.n, extra):
        prod *= 1 + _f_array(model, pos, i, j)
    return Fraction(int(prod.sum()))
