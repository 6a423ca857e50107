"""Trivial maximal matching: rescan the neighbourhood of every freed vertex."""

from __future__ import annotations

from ..core import Kind, UpdateEvent, WorkCounter


class ScanBaseline:
    def __init__(self, n: int, initial_edges=()):
        self.n = n
        self.adj = [set() for _ in range(n)]
        self.mate = [None] * n
        self.work = WorkCounter()
        for u, v in initial_edges:
            self.adj[u].add(v)
            self.adj[v].add(u)
        for u in range(n):
            if self.mate[u] is None:
                self._rematch(u)

    def _rematch(self, x: int) -> None:
        self.work["scan"] += 1
        for y in self.adj[x]:
            self.work["scan"] += 1
            if self.mate[y] is None:
                self.mate[x] = y
                self.mate[y] = x
                return

    def matching_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in enumerate(self.mate) if v is not None and u < v]

    def handle_update(self, e: UpdateEvent) -> None:
        u, v = e.u, e.v
        self.work["update"] += 1
        if e.kind is Kind.INSERT:
            self.adj[u].add(v)
            self.adj[v].add(u)
            if self.mate[u] is None and self.mate[v] is None:
                self.mate[u], self.mate[v] = v, u
            return
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        if self.mate[u] == v:
            self.mate[u] = self.mate[v] = None
            self._rematch(u)
            self._rematch(v)
