"""Shared generators and drivers for the test suite."""

from __future__ import annotations

import math
import random

from dynamatch.estree import INF, EsTree, ResidualGraph, dijkstra_to_sink
from dynamatch.harness.instances import gap_instance


def random_residual(rng: random.Random, size: int, p: float = 0.15) -> ResidualGraph:
    t = size - 1
    g = ResidualGraph(size, t)
    for u in range(size - 1):
        for v in range(size):
            if u != v and rng.random() < p:
                w = rng.randint(1, 4) if v == t else 1
                g.add_edge(u, v, w)
    return g


def es_random_ops(tr: EsTree, rng: random.Random, steps: int, check=None) -> int:
    """Apply a random mix of deletions, distance-preserving insertions and
    vertex removals; call ``check(tr, before)`` after each operation.
    Returns the number of operations applied."""
    g = tr.g
    t = g.sink
    done = 0
    for _ in range(steps):
        before = list(tr.dist)
        r = rng.random()
        live = [x for x in range(g.size) if x != t and not tr.removed[x]]
        if not live:
            break
        if r < 0.05:
            tr.remove_vertex(rng.choice(live))
        elif r < 0.65:
            edges = [(u, v) for u in live for v in g.out[u]]
            if not edges:
                continue
            u, v = rng.choice(edges)
            tr.delete(u, v)
        else:
            u = rng.choice(live)
            v = rng.choice(live + [t])
            if u == v or g.has_edge(u, v):
                continue
            if v == t:
                if tr.dist[u] == INF:
                    continue
                w = int(tr.dist[u]) + rng.randint(0, 2)
            else:
                w = 1
                if w + tr.dist[v] < tr.dist[u]:
                    continue
            tr.insert(u, v, w)
        done += 1
        if check is not None:
            check(tr, before)
    return done


def es_exact(tr: EsTree, before) -> None:
    ref = dijkstra_to_sink(tr.g)
    for x in range(tr.g.size):
        if tr.removed[x]:
            continue
        assert tr.dist[x] == ref[x], (x, tr.dist[x], ref[x])
        assert tr.dist[x] >= before[x]
        if x != tr.t and tr.dist[x] < INF:
            path = tr.path_to_sink(x)
            assert not any(tr.removed[y] for y in path)
            assert sum(tr.g.weight(a, b) for a, b in zip(path, path[1:])) == tr.dist[x]


def gap_driver(lpm, gg, rng: random.Random, rounds: int, adversarial: bool = True):
    """Delete edges while respecting the right-side cap, augmenting every live
    left vertex that becomes free.  Yields after each Delete+Augment round."""
    g = gg.g
    for _ in range(rounds):
        live = [u for u in gg.live_left() if g.degree(u) > 0]
        if not live:
            return
        if adversarial and rng.random() < 0.7:
            matched = [u for u in live if lpm.M.mate[u] is not None]
            u = rng.choice(matched or live)
            v = lpm.M.mate[u] if lpm.M.mate[u] is not None else rng.choice(list(g.adj[u]))
        else:
            u = rng.choice(live)
            v = rng.choice(list(g.adj[u]))
        lpm.delete(u, v)
        for x in lpm.unmatched_live_left():
            lpm.augment(x)
        yield u, v


def small_gap_instance(rng: random.Random, n_left: int, X: int, gamma: float, extra: int = 2):
    return gap_instance(n_left, X, gamma, rng, extra_degree=extra)


def ln(x: float) -> float:
    return math.log(max(x, 2))
