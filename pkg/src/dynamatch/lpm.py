"""Left-perfect matching in a bipartite graph with a degree gap.

The graph has bipartition ``(L, R)`` and a gamma-degree-gap at ``X``: live
left vertices have degree at least ``X`` and right vertices have degree at
most ``(1 - gamma) X``.  The structure supports edge deletions and
``augment(u)`` for a free live left vertex ``u``.  A left vertex whose
degree drops below ``X`` is tombstoned (unmatched and stripped of edges).

Two backends share the interface:

``LpmDet``
    Residual digraph (unmatched edges L->R, matched edges R->L, free right
    vertices -> sink) with a monotone shortest-path tree.  A right vertex
    freed by a deletion gets a sink edge weighted by its current distance,
    so no label decreases.  Every ``q_ep`` deletions the residual graph is
    rebuilt with unit weights.

``LpmRand``
    Random alternating walks with loop erasure, restarted a bounded number
    of times.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import DynGraph, Matching, MissingEdge, NotAlternating, WorkCounter, augment_along, kth_neighbor
from .estree import INF, EsTree, ResidualGraph


class InvalidMatching(ValueError):
    pass


class NoAugmentingPath(RuntimeError):
    pass


class WalkTimeout(NoAugmentingPath):
    pass


class EpochWeightBoundExceeded(AssertionError):
    pass


class DegreeGapGraph:
    def __init__(self, g: DynGraph, left: Iterable[int], right: Iterable[int], X: float, gamma: float):
        if not 0 < gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
        self.g = g
        self.left = set(left)
        self.right = set(right)
        if self.left & self.right:
            raise ValueError("L and R overlap")
        self.X = X
        self.gamma = gamma
        self.removed = [False] * g.n
        for u, v in g.edges():
            if not ((u in self.left and v in self.right) or (v in self.left and u in self.right)):
                raise ValueError(f"edge ({u}, {v}) does not cross the bipartition")

    def live_left(self) -> list[int]:
        return sorted(u for u in self.left if not self.removed[u])

    def gap_violations(self) -> list[int]:
        bad = [u for u in self.live_left() if self.g.degree(u) < self.X]
        cap = (1 - self.gamma) * self.X
        bad += sorted(v for v in self.right if self.g.degree(v) > cap + 1e-9)
        return bad

    @property
    def size(self) -> int:
        return len(self.left) + len(self.right)


@dataclass
class DeleteResult:
    unmatched: list[tuple[int, int]] = field(default_factory=list)  # (left, right) pairs removed from M
    tombstoned: Optional[int] = None


class _LpmBase:
    def __init__(self, gg: DegreeGapGraph, m0: Optional[Matching] = None, work: Optional[WorkCounter] = None):
        self.gg = gg
        self.g = gg.g
        self.work = work if work is not None else WorkCounter()
        self.M = Matching(gg.g.n)
        if m0 is not None:
            for u, v in m0.edges():
                if u not in gg.left:
                    u, v = v, u
                if u not in gg.left or v not in gg.right:
                    raise InvalidMatching(f"({u}, {v}) does not cross the bipartition")
                if not self.g.has_edge(u, v):
                    raise InvalidMatching(f"({u}, {v}) is not an edge")
                if gg.removed[u] or gg.removed[v]:
                    raise InvalidMatching(f"({u}, {v}) touches a removed vertex")
                self.M.match(u, v)
        self.ln_n = math.log(max(gg.size, 2))

    def is_free(self, v: int) -> bool:
        return self.M.mate[v] is None

    def is_live(self, u: int) -> bool:
        return not self.gg.removed[u]

    def has_edge(self, u: int, v: int) -> bool:
        return self.g.has_edge(u, v)

    def _check_delete(self, u: int, v: int) -> None:
        if u not in self.gg.left or not self.g.has_edge(u, v):
            raise MissingEdge((u, v))

    def _check_augment(self, u: int) -> None:
        if u not in self.gg.left or self.gg.removed[u]:
            raise ValueError(f"{u} is not a live left vertex")
        if self.M.mate[u] is not None:
            raise ValueError(f"{u} is already matched")
        if self.g.degree(u) < self.gg.X:
            raise ValueError(f"deg({u}) is below X")

    def _tombstone(self, u: int) -> None:
        self.gg.removed[u] = True
        self.g.isolate(u)

    def unmatched_live_left(self) -> list[int]:
        return [u for u in self.gg.live_left() if self.M.mate[u] is None]


class LpmDet(_LpmBase):
    backend = "det"

    def __init__(self, gg: DegreeGapGraph, m0: Optional[Matching] = None,
                 work: Optional[WorkCounter] = None, c_len: float = 4.0):
        super().__init__(gg, m0, work)
        self.c_len = c_len
        self.q_ep = max(1, math.ceil(math.sqrt(gg.size * gg.gamma)))
        self.sink = gg.g.n
        self.resets = 0
        self.max_sink_weight = 1
        self.reset_es()

    def weight_bound(self) -> float:
        return (len(self.r_aff) + 1) * self.c_len * self.ln_n / self.gg.gamma

    def reset_es(self) -> None:
        gg, g, M = self.gg, self.g, self.M
        gres = ResidualGraph(g.n + 1, self.sink)
        for u in gg.left:
            if gg.removed[u]:
                continue
            mu = M.mate[u]
            for v in g.adj[u]:
                if v == mu:
                    gres.add_edge(v, u)
                else:
                    gres.add_edge(u, v)
        for v in gg.right:
            if M.mate[v] is None:
                gres.add_edge(v, self.sink)
        self.work["lpm_reset"] += g.m + len(gg.right)
        self.gres = gres
        self.tree = EsTree(gres, self.work)
        self.num_deletions = 0
        self.r_aff: set[int] = set()
        self.resets += 1

    def _free_right(self, v: int) -> None:
        # v is still matched in gres; give it a sink edge that keeps dist(v)
        w = self.tree.dist[v]
        if w == INF:
            raise NoAugmentingPath(f"matched right vertex {v} cannot reach the sink")
        self.r_aff.add(v)
        bound = self.weight_bound()
        if w > bound:
            raise EpochWeightBoundExceeded(f"sink weight {w} exceeds {bound:.1f}")
        self.max_sink_weight = max(self.max_sink_weight, int(w))
        self.tree.insert(v, self.sink, int(w))

    def delete(self, u: int, v: int) -> DeleteResult:
        self._check_delete(u, v)
        res = DeleteResult()
        self.num_deletions += 1
        self.r_aff.add(v)
        if self.M.mate[u] == v:
            self._free_right(v)
            self.M.unmatch(u, v)
            res.unmatched.append((u, v))
            self.tree.delete(v, u)
        else:
            self.tree.delete(u, v)
        self.g.remove_edge(u, v)
        if self.g.degree(u) < self.gg.X:
            x = self.M.mate[u]
            if x is not None:
                self._free_right(x)
                self.M.unmatch(u, x)
                res.unmatched.append((u, x))
            self.tree.remove_vertex(u)
            self._tombstone(u)
            res.tombstoned = u
        if self.num_deletions > self.q_ep:
            self.reset_es()
        return res

    def augment(self, u: int) -> list[int]:
        self._check_augment(u)
        if self.tree.dist[u] == INF:
            raise NoAugmentingPath(f"no augmenting path from {u}")
        tp = self.tree.path_to_sink(u)
        path = tp[:-1]
        self._check_correspondence(path)
        augment_along(self.M, path)
        tree = self.tree
        for a, b in zip(path, path[1:]):
            tree.insert(b, a, 1)
        for a, b in zip(path, path[1:]):
            tree.delete(a, b)
        tree.delete(path[-1], self.sink)
        self.work["lpm_path"] += len(path)
        return path

    def _check_correspondence(self, path: list[int]) -> None:
        gg, M = self.gg, self.M
        for i, x in enumerate(path):
            side = gg.left if i % 2 == 0 else gg.right
            if x not in side:
                raise NotAlternating(f"residual path leaves the bipartition at {x}")
        if M.mate[path[-1]] is not None:
            raise NotAlternating("residual path ends at a matched vertex")

    def residual_matches_definition(self) -> bool:
        """Rebuild the residual graph from (G, M) and compare edge sets (weights aside)."""
        want = set()
        for u in self.gg.live_left():
            for v in self.g.adj[u]:
                want.add((v, u) if self.M.mate[u] == v else (u, v))
        for v in self.gg.right:
            if self.M.mate[v] is None:
                want.add((v, self.sink))
        have = {(a, b) for a, b, _ in self.gres.edges()}
        return want == have


class LpmRand(_LpmBase):
    backend = "rand"

    def __init__(self, gg: DegreeGapGraph, m0: Optional[Matching] = None,
                 work: Optional[WorkCounter] = None, seed: int = 0,
                 c1: float = 100.0, c2: float = 4.0):
        super().__init__(gg, m0, work)
        self.rng = random.Random(seed)
        self.k = max(1, math.ceil(c1 * self.ln_n / gg.gamma ** 2))
        self.K = max(1, math.ceil(c2 * self.ln_n / gg.gamma))
        self.restarts = 0
        self.work["lpm_init"] += self.M.size

    def delete(self, u: int, v: int) -> DeleteResult:
        self._check_delete(u, v)
        res = DeleteResult()
        if self.M.mate[u] == v:
            self.M.unmatch(u, v)
            res.unmatched.append((u, v))
        self.g.remove_edge(u, v)
        if self.g.degree(u) < self.gg.X:
            x = self.M.mate[u]
            if x is not None:
                self.M.unmatch(u, x)
                res.unmatched.append((u, x))
            self._tombstone(u)
            res.tombstoned = u
        return res

    def walk(self, u: int) -> Optional[list[int]]:
        """One random alternating walk of at most ``k`` steps, loops erased."""
        g, M, rng = self.g, self.M, self.rng
        path = [u]
        pos = {u: 0}
        cur = u
        for _ in range(self.k):
            self.work["walk_step"] += 1
            d = g.degree(cur)
            mate = M.mate[cur]
            if mate is None:
                if d == 0:
                    return None
                r = kth_neighbor(g, cur, rng.randrange(d))
            else:
                if d <= 1:
                    return None
                idx = rng.randrange(d - 1)
                if idx >= g.adj[cur].index(mate):
                    idx += 1
                r = kth_neighbor(g, cur, idx)
            if r in pos:
                # erase the loop: keep the earlier visit of r and its mate
                cut = pos[r] + 2
                for x in path[cut:]:
                    del pos[x]
                del path[cut:]
                cur = path[-1]
                continue
            pos[r] = len(path)
            path.append(r)
            nxt = M.mate[r]
            if nxt is None:
                return path
            pos[nxt] = len(path)
            path.append(nxt)
            cur = nxt
        return None

    def augment(self, u: int) -> list[int]:
        self._check_augment(u)
        for _ in range(self.K):
            path = self.walk(u)
            if path is not None:
                augment_along(self.M, path)
                return path
            self.restarts += 1
        raise WalkTimeout(f"no augmenting walk from {u} within {self.K} restarts")


def random_alternating_walk(state: LpmRand, u: int) -> Optional[list[int]]:
    return state.walk(u)


def lpm_init(backend: str, gg: DegreeGapGraph, m0: Optional[Matching] = None, **kw):
    if backend == "det":
        return LpmDet(gg, m0, **kw)
    if backend == "rand":
        return LpmRand(gg, m0, **kw)
    raise ValueError(f"unknown backend {backend!r}")


def lpm_delete(state, u: int, v: int) -> DeleteResult:
    return state.delete(u, v)


def lpm_augment(state, u: int) -> list[int]:
    return state.augment(u)


def reset_es(state: LpmDet) -> None:
    state.reset_es()
