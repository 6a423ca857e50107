"""Monotone shortest-path tree to a sink in a positively weighted digraph.

Supports edge deletions, insertions that do not shorten any distance, and
vertex removal.  Distance labels only grow.  When a tree edge disappears,
the affected subtree is re-labelled exactly: each affected vertex first
looks for an alternative parent at the same distance, and the remainder is
settled by a Dijkstra pass restricted to the subtree.  Every affected
vertex pays one scan of its incident edges.
"""

from __future__ import annotations

import heapq
import math
from typing import Iterable, Optional

from .core import DuplicateEdge, MissingEdge, WorkCounter

INF = math.inf


class MonotonicityViolation(AssertionError):
    pass


class SinkRemoval(ValueError):
    pass


class Unreachable(LookupError):
    pass


class ResidualGraph:
    """Directed graph on ``0..size-1``; ``out[v]`` maps head -> weight."""

    def __init__(self, size: int, sink: int):
        if not 0 <= sink < size:
            raise ValueError("sink out of range")
        self.size = size
        self.sink = sink
        self.out: list[dict[int, int]] = [dict() for _ in range(size)]
        self.inn: list[set[int]] = [set() for _ in range(size)]

    def add_edge(self, u: int, v: int, w: int = 1) -> None:
        if u == v:
            raise ValueError("self-loop")
        if w < 1 or int(w) != w:
            raise ValueError(f"weight must be a positive integer, got {w}")
        if v in self.out[u]:
            raise DuplicateEdge((u, v))
        if w > 1 and v != self.sink:
            raise ValueError("only edges into the sink may carry weight above 1")
        self.out[u][v] = int(w)
        self.inn[v].add(u)

    def remove_edge(self, u: int, v: int) -> int:
        try:
            w = self.out[u].pop(v)
        except KeyError:
            raise MissingEdge((u, v)) from None
        self.inn[v].discard(u)
        return w

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.out[u]

    def weight(self, u: int, v: int) -> int:
        return self.out[u][v]

    def edges(self) -> Iterable[tuple[int, int, int]]:
        for u in range(self.size):
            for v, w in self.out[u].items():
                yield (u, v, w)


def dijkstra_to_sink(g: ResidualGraph, skip: Optional[set] = None) -> list[float]:
    """Exact distances to the sink; reference oracle and bootstrap."""
    dist = [INF] * g.size
    dist[g.sink] = 0
    heap = [(0, g.sink)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for z in g.inn[x]:
            if skip and z in skip:
                continue
            nd = d + g.out[z][x]
            if nd < dist[z]:
                dist[z] = nd
                heapq.heappush(heap, (nd, z))
    return dist


class EsTree:
    def __init__(self, g: ResidualGraph, work: Optional[WorkCounter] = None):
        self.g = g
        self.t = g.sink
        self.work = work if work is not None else WorkCounter()
        n = g.size
        self.dist: list[float] = [INF] * n
        self.parent: list[Optional[int]] = [None] * n
        self.children: list[set[int]] = [set() for _ in range(n)]
        self.removed = [False] * n
        self._rebuild()

    # structure

    def _rebuild(self) -> None:
        g = self.g
        self.dist = dijkstra_to_sink(g, skip=None)
        self.work["es_scan"] += sum(len(o) for o in g.out)
        for x in range(g.size):
            self.parent[x] = None
            self.children[x].clear()
        for x in range(g.size):
            if x != self.t and self.dist[x] < INF:
                p = self._best_parent(x)
                self.parent[x] = p
                self.children[p].add(x)

    def _best_parent(self, x: int) -> Optional[int]:
        d = self.dist[x]
        dist = self.dist
        best = None
        for y, w in self.g.out[x].items():
            if w + dist[y] == d and (best is None or y < best):
                best = y
        return best

    def _set_parent(self, x: int, p: Optional[int]) -> None:
        old = self.parent[x]
        if old is not None:
            self.children[old].discard(x)
        self.parent[x] = p
        if p is not None:
            self.children[p].add(x)

    # updates

    def delete(self, u: int, v: int) -> None:
        self.g.remove_edge(u, v)
        self.work["es_update"] += 1
        if self.parent[u] != v:
            return
        self._set_parent(u, None)
        # an equal-distance alternative has a strictly smaller label, so it is
        # not a descendant of u and its label is still exact
        self.work["es_scan"] += len(self.g.out[u])
        p = self._best_parent(u)
        if p is not None:
            self._set_parent(u, p)
            return
        self._relabel([u])

    def insert(self, u: int, v: int, w: int = 1) -> None:
        if self.removed[u] or self.removed[v]:
            raise ValueError("edge touches a removed vertex")
        if w + self.dist[v] < self.dist[u]:
            raise MonotonicityViolation(
                f"insert ({u}, {v}, w={w}) would lower dist({u}) from {self.dist[u]} "
                f"to {w + self.dist[v]}"
            )
        self.g.add_edge(u, v, w)
        self.work["es_update"] += 1
        if self.dist[u] < INF and w + self.dist[v] == self.dist[u]:
            p = self.parent[u]
            if p is None or v < p:
                self._set_parent(u, v)

    def remove_vertex(self, v: int) -> None:
        if v == self.t:
            raise SinkRemoval("the sink cannot be removed")
        if self.removed[v]:
            return
        g = self.g
        self.removed[v] = True
        self.work["es_update"] += 1
        self._set_parent(v, None)
        roots = sorted(self.children[v])
        for z in roots:
            self._set_parent(z, None)
        for y in list(g.out[v]):
            g.remove_edge(v, y)
        for z in list(g.inn[v]):
            g.remove_edge(z, v)
        self.work["es_scan"] += len(roots)
        if roots:
            self._relabel(roots)

    def _relabel(self, roots: list[int]) -> None:
        """Exactly re-label the subtrees hanging below ``roots``."""
        g, dist = self.g, self.dist
        affected: list[int] = []
        seen = set(roots)
        stack = list(roots)
        while stack:
            x = stack.pop()
            affected.append(x)
            for c in self.children[x]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        for x in affected:
            if self.parent[x] is not None:
                self._set_parent(x, None)
        newd: dict[int, float] = {}
        heap = []
        scans = 0
        for x in affected:
            best = INF
            out = g.out[x]
            scans += len(out) + len(g.inn[x])
            for y, w in out.items():
                if y not in seen:
                    c = w + dist[y]
                    if c < best:
                        best = c
            newd[x] = best
            if best < INF:
                heap.append((best, x))
        heapq.heapify(heap)
        done = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in done or d > newd[x]:
                continue
            done.add(x)
            for z in g.inn[x]:
                if z in seen and z not in done:
                    nd = d + g.out[z][x]
                    if nd < newd[z]:
                        newd[z] = nd
                        heapq.heappush(heap, (nd, z))
        self.work["es_scan"] += scans
        changed = 0
        for x in affected:
            nd = newd[x]
            if nd < dist[x]:
                raise AssertionError("distance label decreased")
            if nd != dist[x]:
                changed += 1
            dist[x] = nd
        self.work["es_label_change"] += changed
        for x in affected:
            if dist[x] < INF:
                self._set_parent(x, self._best_parent(x))

    # queries

    def path_to_sink(self, v: int) -> list[int]:
        if self.removed[v] or self.dist[v] == INF:
            raise Unreachable(v)
        path = [v]
        x = v
        while x != self.t:
            x = self.parent[x]
            path.append(x)
        return path

    def check(self) -> None:
        """Compare against a fresh Dijkstra pass; raise AssertionError on mismatch."""
        ref = dijkstra_to_sink(self.g)
        for x in range(self.g.size):
            if self.removed[x]:
                continue
            if ref[x] != self.dist[x]:
                raise AssertionError(f"dist({x}) = {self.dist[x]}, expected {ref[x]}")
            if x != self.t and ref[x] < INF:
                p = self.parent[x]
                if p is None or self.g.out[x].get(p, INF) + self.dist[p] != self.dist[x]:
                    raise AssertionError(f"bad parent at {x}")


def es_build(g: ResidualGraph, t: Optional[int] = None, work: Optional[WorkCounter] = None) -> EsTree:
    if t is not None and t != g.sink:
        raise ValueError("sink mismatch")
    return EsTree(g, work)


def es_delete(tr: EsTree, u: int, v: int) -> None:
    tr.delete(u, v)


def es_insert(tr: EsTree, u: int, v: int, w: int = 1) -> None:
    tr.insert(u, v, w)


def es_remove_vertex(tr: EsTree, v: int) -> None:
    tr.remove_vertex(v)


def es_path_to_sink(tr: EsTree, v: int) -> list[int]:
    return tr.path_to_sink(v)
