"""Checks of the structural facts behind the LPM structure.

``contract`` builds the directed multigraph ``G_M``: each matched pair
becomes one vertex, all free vertices merge into a sink ``t``, and each
unmatched edge ``(l, r)`` becomes an arc from the pair of ``l`` to the pair
of ``r``.  Random alternating walks in ``G`` are random walks in ``G_M``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .core import Matching
from .lpm import DegreeGapGraph


class TooLarge(ValueError):
    pass


class NotLeftPerfect(ValueError):
    pass


@dataclass
class ContractedGraph:
    k: int  # non-sink vertices are 0..k-1; the sink is k
    mult: Counter = field(default_factory=Counter)
    pairs: list = field(default_factory=list)

    @property
    def sink(self) -> int:
        return self.k

    @property
    def size(self) -> int:
        return self.k + 1

    def out_deg(self) -> list[int]:
        d = [0] * self.size
        for (a, _), c in self.mult.items():
            d[a] += c
        return d

    def in_deg(self) -> list[int]:
        d = [0] * self.size
        for (_, b), c in self.mult.items():
            d[b] += c
        return d

    def is_eulerian(self) -> bool:
        return self.out_deg() == self.in_deg()

    def copy(self) -> "ContractedGraph":
        return ContractedGraph(self.k, Counter(self.mult), list(self.pairs))


@dataclass
class ConductanceReport:
    phi: Fraction
    cut: list[int]

    def to_json(self) -> dict:
        return {"phi_num": self.phi.numerator, "phi_den": self.phi.denominator, "cut": self.cut}


@dataclass
class HitStats:
    hits: int
    trials: int
    rate: float
    lo: float
    hi: float

    def to_json(self) -> dict:
        return {"hits": self.hits, "trials": self.trials, "rate": self.rate, "lo": self.lo, "hi": self.hi}


def wilson_interval(hits: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = hits / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def contract(gg: DegreeGapGraph, m: Matching) -> ContractedGraph:
    g = gg.g
    pairs = sorted((l, m.mate[l]) for l in gg.left if m.mate[l] is not None)
    node = {}
    for i, (l, r) in enumerate(pairs):
        node[l] = i
        node[r] = i
    k = len(pairs)
    cg = ContractedGraph(k, Counter(), pairs)
    for l in sorted(gg.left):
        if gg.removed[l]:
            continue
        a = node.get(l, k)
        for r in g.adj[l]:
            if m.mate[l] == r:
                continue
            b = node.get(r, k)
            if a != b:
                cg.mult[(a, b)] += 1
    return cg


def eulerianize(gm: ContractedGraph) -> ContractedGraph:
    """Add arcs between the sink and each vertex until in-degree equals out-degree."""
    out = gm.copy()
    od, idg = gm.out_deg(), gm.in_deg()
    t = gm.sink
    for u in range(gm.k):
        diff = od[u] - idg[u]
        if diff > 0:
            out.mult[(t, u)] += diff
        elif diff < 0:
            out.mult[(u, t)] += -diff
    return out


def conductance_bruteforce(gm: ContractedGraph, max_vertices: int = 20) -> ConductanceReport:
    V = gm.size
    if V > max_vertices:
        raise TooLarge(f"{V} vertices; exhaustive enumeration capped at {max_vertices}")
    if V < 2:
        raise ValueError("conductance needs at least two vertices")
    W = np.zeros((V, V), dtype=np.int64)
    for (a, b), c in gm.mult.items():
        W[a, b] += c
    deg = W.sum(axis=1)
    total = int(deg.sum())
    masks = np.arange(1, (1 << V) - 1, dtype=np.int64)
    S = ((masks[:, None] >> np.arange(V)) & 1).astype(np.int64)
    cut = ((S @ W) * (1 - S)).sum(axis=1)
    vol = S @ deg
    den = np.minimum(vol, total - vol)
    ok = den > 0
    if not ok.any():
        raise ValueError("every cut has an empty side by volume")
    ratio = np.full(len(masks), np.inf)
    ratio[ok] = cut[ok] / den[ok]
    best = float(ratio.min())
    cand = np.nonzero(ratio <= best * (1 + 1e-9) + 1e-15)[0]
    phi, arg = None, None
    for i in cand:
        f = Fraction(int(cut[i]), int(den[i]))
        if phi is None or f < phi:
            phi, arg = f, int(masks[i])
    return ConductanceReport(phi, [v for v in range(V) if arg >> v & 1])


def _walk_tables(gm: ContractedGraph):
    V = gm.size
    heads: list[list[int]] = [[] for _ in range(V)]
    for (a, b), c in sorted(gm.mult.items()):
        heads[a].extend([b] * c)
    start = np.zeros(V + 1, dtype=np.int64)
    for v in range(V):
        start[v + 1] = start[v] + len(heads[v])
    flat = np.array([h for hs in heads for h in hs], dtype=np.int64)
    deg = np.diff(start)
    return start, deg, flat


def walk_hit_counts(gm: ContractedGraph, starts: Iterable[int], k: int, trials: int,
                    seed: int = 0) -> dict[int, int]:
    """Number of ``k``-step walks (out of ``trials``) from each start that reach the sink."""
    starts = list(starts)
    rng = np.random.default_rng(seed)
    start, deg, flat = _walk_tables(gm)
    t = gm.sink
    cur = np.repeat(np.array(starts, dtype=np.int64), trials)
    hit = cur == t
    for _ in range(k):
        alive = ~hit & (deg[cur] > 0)
        if not alive.any():
            break
        idx = np.nonzero(alive)[0]
        c = cur[idx]
        pick = start[c] + (rng.random(len(idx)) * deg[c]).astype(np.int64)
        cur[idx] = flat[pick]
        hit[idx] |= cur[idx] == t
    per = hit.reshape(len(starts), trials).sum(axis=1)
    return {s: int(h) for s, h in zip(starts, per)}


def walk_hit_stats(gm: ContractedGraph, v: int, k: int, trials: int, seed: int = 0) -> HitStats:
    if v == gm.sink:
        raise ValueError("start vertex must not be the sink")
    h = walk_hit_counts(gm, [v], k, trials, seed)[v]
    lo, hi = wilson_interval(h, trials)
    return HitStats(h, trials, h / trials, lo, hi)


@dataclass
class LayerAudit:
    layers: list[int]  # layers[i] = |L_{i+1}|, path length counted in left vertices
    far: int  # |L_{> delta'}|, unreachable vertices included
    unreachable: int
    delta_prime: int
    max_edges: int  # longest shortest alternating path, in edges

    def to_json(self) -> dict:
        return self.__dict__.copy()


def alternating_layers(gg: DegreeGapGraph, m: Matching, r_mark: Iterable[int] = ()) -> dict[int, int]:
    """Map each live left vertex to its layer (number of left vertices on a
    shortest alternating path to an unmarked free right vertex), or 0 if none."""
    g = gg.g
    marked = set(r_mark)
    live = gg.live_left()
    layer: dict[int, int] = {}
    frontier = []
    for u in live:
        for r in g.adj[u]:
            if r != m.mate[u] and m.mate[r] is None and r not in marked:
                layer[u] = 1
                frontier.append(u)
                break
    i = 1
    while frontier:
        nxt = []
        for lp in frontier:
            r = m.mate[lp]
            if r is None:
                continue
            for u in g.adj[r]:
                if u != lp and u not in layer and not gg.removed[u]:
                    layer[u] = i + 1
                    nxt.append(u)
        frontier = nxt
        i += 1
    return {u: layer.get(u, 0) for u in live}


def alternating_layer_audit(gg: DegreeGapGraph, m: Matching, r_mark: Iterable[int] = ()) -> LayerAudit:
    live = gg.live_left()
    for u in live:
        if m.mate[u] is None:
            raise NotLeftPerfect(f"live left vertex {u} is unmatched")
    lay = alternating_layers(gg, m, r_mark)
    n = max(len(live), 2)
    dp = math.ceil(4 / gg.gamma * math.log(n))
    top = max(lay.values(), default=0)
    layers = [0] * top
    for x in lay.values():
        if x:
            layers[x - 1] += 1
    unreachable = sum(1 for x in lay.values() if x == 0)
    far = unreachable + sum(1 for x in lay.values() if x > dp)
    return LayerAudit(layers, far, unreachable, dp, 2 * top - 1 if top else 0)
