"""Slow, independent reference implementations used only by the tests.

Nothing here imports package internals beyond the basic data types, so a bug
in the package cannot silently agree with itself.
"""
from __future__ import annotations

import itertools
from collections import deque


def connected(vertices, edges) -> bool:
    vertices = list(vertices)
    if not vertices:
        return True
    adj = {v: set() for v in vertices}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        v = stack.pop()
        for w in adj[v] - seen:
            seen.add(w)
            stack.append(w)
    return len(seen) == len(vertices)


def connected_graph_edge_sets(n: int):
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for r in range(n - 1, len(pairs) + 1):
        for es in itertools.combinations(pairs, r):
            if connected(range(1, n + 1), es):
                yield frozenset(es)


def all_trees(n: int):
    """Spanning trees of K_n as frozensets of pairs, by brute force over edge subsets."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for es in itertools.combinations(pairs, n - 1):
        if connected(range(1, n + 1), es):
            yield frozenset(es)


def generations(edges, root):
    adj = {}
    for i, j in edges:
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    dist, pred = {root: 0}, {}
    q = deque([root])
    while q:
        v = q.popleft()
        for w in adj.get(v, []):
            if w not in dist:
                dist[w] = dist[v] + 1
                pred[w] = v
                q.append(w)
    return dist, pred


def penrose_extra(edges, root):
    """Pairs added by the completion rules, straight from their statement."""
    verts = {v for e in edges for v in e} or {root}
    dist, pred = generations(edges, root)
    tree = {tuple(sorted(e)) for e in edges}
    out = set()
    for i, j in itertools.permutations(sorted(verts), 2):
        if i > j and dist[i] == dist[j]:
            continue
        pair = tuple(sorted((i, j)))
        if pair in tree:
            continue
        if dist[i] == dist[j]:
            out.add(pair)
        elif dist[j] == dist[i] - 1 and pred[i] < j:
            out.add(pair)
    return out


def edge_partitions(edges):
    edges = list(edges)
    if not edges:
        yield []
        return
    first, rest = edges[0], edges[1:]
    for p in edge_partitions(rest):
        for k in range(len(p)):
            yield p[:k] + [[first] + p[k]] + p[k + 1:]
        yield [[first]] + p


def brute_max_splittability(edges, root=1) -> int:
    """Largest faithful edge partition into subtrees, over all set partitions."""
    whole = penrose_extra(edges, root)
    dist, _ = generations(edges, root)
    best = 1
    for blocks in edge_partitions(sorted(edges)):
        if len(blocks) <= best:
            continue
        ok = True
        union = set()
        for block in blocks:
            vs = {v for e in block for v in e}
            if not connected(vs, block):
                ok = False
                break
            attach = min(vs, key=lambda v: (dist[v], v))
            union |= penrose_extra(block, attach)
        if ok and union == whole:
            best = len(blocks)
    return best


def box_weight(model_a: int | None, n: int, f_edges, one_plus_edges=(), pin: int = 1, half_width=None):
    """Literal lattice sum over a box of positions (``model_a=None`` is the one-point model)."""
    def f(x, y):
        if model_a is None:
            return -1
        return -1 if abs(x - y) < model_a else 0

    if model_a is None:
        sites = [0]
    else:
        w = (n - 1) * (model_a - 1) if half_width is None else half_width
        sites = range(-w, w + 1)
    free = [v for v in range(1, n + 1) if v != pin]
    total = 0
    for xs in itertools.product(sites, repeat=len(free)):
        pos = dict(zip(free, xs))
        pos[pin] = 0
        val = 1
        for i, j in f_edges:
            val *= f(pos[i], pos[j])
            if val == 0:
                break
        if val:
            for i, j in one_plus_edges:
                val *= 1 + f(pos[i], pos[j])
        total += val
    return total
