"""Independent checkers used by the harness."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..core import DynGraph, Kind, Matching, UpdateEvent


def oracle_verify(g: DynGraph, m: Matching) -> Optional[tuple[int, int]]:
    """Scan every edge; return the first one with both endpoints free."""
    for u, v in g.edges():
        if m.mate[u] is None and m.mate[v] is None:
            return (u, v)
    for u, v in m.edges():
        if not g.has_edge(u, v):
            return (u, v)
    return None


class MatrixOracle:
    """Dense adjacency mirror of G and H for vectorised per-update audits."""

    def __init__(self, n: int, edges=()):
        self.n = n
        self.A = np.zeros((n, n), dtype=bool)
        self.H = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            self.A[u, v] = self.A[v, u] = True

    def apply(self, e: UpdateEvent) -> None:
        val = e.kind is Kind.INSERT
        if self.A[e.u, e.v] == val:
            raise AssertionError(f"oracle mirror rejects {e}")
        self.A[e.u, e.v] = self.A[e.v, e.u] = val

    def apply_h(self, changes) -> None:
        for kind, u, v in changes:
            val = kind is Kind.INSERT
            self.H[u, v] = self.H[v, u] = val

    def sync_h(self, h: DynGraph) -> bool:
        """Compare the H mirror to ``h``; resynchronise and report equality."""
        H = np.zeros_like(self.H)
        for u, v in h.edges():
            H[u, v] = H[v, u] = True
        same = bool((H == self.H).all())
        self.H = H
        return same

    def uncovered_edge(self, mate: Sequence[Optional[int]]) -> Optional[tuple[int, int]]:
        free = np.fromiter((x is None for x in mate), dtype=bool, count=self.n)
        sub = self.A & free[:, None] & free[None, :]
        if sub.any():
            u, v = np.argwhere(np.triu(sub))[0]
            return int(u), int(v)
        return None

    def matching_inside(self, mate: Sequence[Optional[int]]) -> Optional[tuple[int, int]]:
        for u, v in enumerate(mate):
            if v is not None and (not self.A[u, v] or mate[v] != u):
                return (u, v)
        return None

    def edcs_violations(self, upper: int, lower: int) -> tuple[int, int, int]:
        """Counts of (over-full H edges, missing G edges, H edges outside G)."""
        d = self.H.sum(axis=1)
        S = d[:, None] + d[None, :]
        over = int((self.H & (S > upper)).sum()) // 2
        missing = int((self.A & ~self.H & (S < lower)).sum()) // 2
        foreign = int((self.H & ~self.A).sum()) // 2
        return over, missing, foreign
