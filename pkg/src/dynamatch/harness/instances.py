"""Random instance generators for degree-gap and near-regular graphs."""

from __future__ import annotations

import math
import random

from ..core import DynGraph
from ..lpm import DegreeGapGraph


def gap_instance(n_left: int, X: int, gamma: float, rng: random.Random,
                 extra_degree: int = 2, right_fill: float = 1.0) -> DegreeGapGraph:
    """Bipartite graph whose left side has degree ``X + extra_degree`` and whose
    right side has degree at most ``floor((1 - gamma) X)``.

    Left vertices are ``0..n_left-1``; right vertices follow.  ``right_fill``
    below 1 leaves spare right capacity (more free right vertices).
    """
    cap = math.floor((1 - gamma) * X + 1e-9)
    if cap < 1:
        raise ValueError("right capacity below 1")
    d_left = X + extra_degree
    n_right = math.ceil(n_left * d_left / (cap * right_fill))
    n_right = max(n_right, d_left)
    for _ in range(100):
        load = [0] * n_right
        open_right = list(range(n_right))
        edges = []
        ok = True
        for u in range(n_left):
            pool = [r for r in open_right if load[r] < cap]
            if len(pool) < d_left:
                ok = False
                break
            # prefer lightly loaded right vertices so nobody runs out early
            rng.shuffle(pool)
            pool.sort(key=lambda r: load[r])
            for r in pool[:d_left]:
                load[r] += 1
                edges.append((u, n_left + r))
            open_right = [r for r in open_right if load[r] < cap]
        if ok:
            n = n_left + n_right
            g = DynGraph(n, edges)
            return DegreeGapGraph(g, range(n_left), range(n_left, n), X, gamma)
    raise RuntimeError("could not build a gap instance")


def near_regular_graph(n: int, Delta: int, rng: random.Random, low_fraction: float = 0.1) -> DynGraph:
    """Random simple graph with max degree ``Delta``; most vertices near ``Delta``."""
    target = [Delta] * n
    for v in rng.sample(range(n), int(low_fraction * n)):
        target[v] = rng.randint(0, Delta)
    g = DynGraph(n)
    stubs = [v for v in range(n) for _ in range(target[v])]
    rng.shuffle(stubs)
    for i in range(0, len(stubs) - 1, 2):
        a, b = stubs[i], stubs[i + 1]
        if a != b and not g.has_edge(a, b):
            g.add_edge(a, b)
    # top up with random pairs that still have room
    room = [v for v in range(n) if g.degree(v) < target[v]]
    for _ in range(4 * n):
        if len(room) < 2:
            break
        a, b = rng.sample(room, 2)
        if not g.has_edge(a, b) and g.degree(a) < target[a] and g.degree(b) < target[b]:
            g.add_edge(a, b)
        room = [v for v in room if g.degree(v) < target[v]]
    return g
