"""Dynamic graph and matching primitives."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

from sortedcontainers import SortedSet


class DuplicateEdge(ValueError):
    pass


class MissingEdge(KeyError):
    pass


class RankOutOfBounds(IndexError):
    pass


class NotAlternating(ValueError):
    pass


class InvalidParams(ValueError):
    pass


class Kind(str, Enum):
    INSERT = "+"
    DELETE = "-"


@dataclass(frozen=True)
class UpdateEvent:
    kind: Kind
    u: int
    v: int

    @classmethod
    def insert(cls, u: int, v: int) -> "UpdateEvent":
        return cls(Kind.INSERT, u, v)

    @classmethod
    def delete(cls, u: int, v: int) -> "UpdateEvent":
        return cls(Kind.DELETE, u, v)

    def to_line(self) -> str:
        return f"{self.kind.value} {self.u} {self.v}"


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class WorkCounter(Counter):
    """Named counters of elementary operations (edge scans, label changes, ...)."""

    def total_work(self) -> int:
        return sum(self.values())


class DynGraph:
    """Simple undirected graph on vertices ``0..n-1`` with ordered adjacency."""

    __slots__ = ("n", "adj", "m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise InvalidParams("n must be nonnegative")
        self.n = n
        self.adj = [SortedSet() for _ in range(n)]
        self.m = 0
        for u, v in edges:
            self.add_edge(u, v)

    def _check(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise IndexError(f"vertex out of range: ({u}, {v})")

    def add_edge(self, u: int, v: int) -> None:
        self._check(u, v)
        if v in self.adj[u]:
            raise DuplicateEdge((u, v))
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.m += 1

    def remove_edge(self, u: int, v: int) -> None:
        if not (0 <= u < self.n and 0 <= v < self.n) or v not in self.adj[u]:
            raise MissingEdge((u, v))
        self.adj[u].remove(v)
        self.adj[v].remove(u)
        self.m -= 1

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> SortedSet:
        return self.adj[v]

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def copy(self) -> "DynGraph":
        g = DynGraph(self.n)
        g.adj = [SortedSet(a) for a in self.adj]
        g.m = self.m
        return g

    def isolate(self, v: int) -> list[int]:
        """Delete every edge at ``v`` and return the former neighbors."""
        nbrs = list(self.adj[v])
        for w in nbrs:
            self.adj[w].remove(v)
        self.adj[v].clear()
        self.m -= len(nbrs)
        return nbrs

    def __repr__(self) -> str:
        return f"DynGraph(n={self.n}, m={self.m})"


def apply_update(g: DynGraph, e: UpdateEvent) -> None:
    if e.kind is Kind.INSERT:
        g.add_edge(e.u, e.v)
    else:
        g.remove_edge(e.u, e.v)


def kth_neighbor(g: DynGraph, v: int, k: int) -> int:
    """Return the ``k``-th smallest neighbor of ``v`` (O(log deg))."""
    if not 0 <= k < len(g.adj[v]):
        raise RankOutOfBounds(f"rank {k} with degree {len(g.adj[v])}")
    return g.adj[v][k]


class Matching:
    """Symmetric mate map."""

    __slots__ = ("n", "mate", "size")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        self.n = n
        self.mate: list[Optional[int]] = [None] * n
        self.size = 0
        for u, v in edges:
            self.match(u, v)

    def match(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError("cannot match a vertex to itself")
        if self.mate[u] is not None or self.mate[v] is not None:
            raise ValueError(f"({u}, {v}): endpoint already matched")
        self.mate[u] = v
        self.mate[v] = u
        self.size += 1

    def unmatch(self, u: int, v: int) -> None:
        if self.mate[u] != v:
            raise MissingEdge((u, v))
        self.mate[u] = None
        self.mate[v] = None
        self.size -= 1

    def is_free(self, v: int) -> bool:
        return self.mate[v] is None

    def contains(self, u: int, v: int) -> bool:
        return self.mate[u] == v

    def edges(self) -> list[tuple[int, int]]:
        return [(u, w) for u, w in enumerate(self.mate) if w is not None and u < w]

    def matched_vertices(self) -> set[int]:
        return {u for u, w in enumerate(self.mate) if w is not None}

    def copy(self) -> "Matching":
        m = Matching(self.n)
        m.mate = list(self.mate)
        m.size = self.size
        return m

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"Matching(size={self.size})"


def augment_along(m: Matching, path: Sequence[int]) -> None:
    """Replace ``m`` by ``m`` xor ``path``.

    ``path`` must have odd length in edges, start and end at free vertices,
    and alternate unmatched/matched edges starting with an unmatched one.
    """
    k = len(path) - 1
    if k < 1 or k % 2 == 0:
        raise NotAlternating(f"augmenting path needs odd edge count, got {k}")
    if m.mate[path[0]] is not None or m.mate[path[-1]] is not None:
        raise NotAlternating("augmenting path endpoints must be free")
    if len(set(path)) != len(path):
        raise NotAlternating("path repeats a vertex")
    for i in range(k):
        a, b = path[i], path[i + 1]
        if i % 2 == 1 and m.mate[a] != b:
            raise NotAlternating(f"edge ({a}, {b}) at position {i} must be matched")
    for i in range(1, k, 2):
        a, b = path[i], path[i + 1]
        m.mate[a] = None
        m.mate[b] = None
    for i in range(0, k, 2):
        a, b = path[i], path[i + 1]
        m.mate[a] = b
        m.mate[b] = a
    m.size += 1


def is_maximal(g: DynGraph, m: Matching) -> Optional[tuple[int, int]]:
    """Return an edge with both endpoints free, or None."""
    for u, v in g.edges():
        if m.mate[u] is None and m.mate[v] is None:
            return (u, v)
    return None
