"""Edge-degree constrained subgraph maintained by local repair.

An EDCS ``H`` of ``G`` with parameters ``(B, (1-eps)B)`` satisfies

1. ``deg_H(u) + deg_H(v) <= B`` for every edge of ``H``;
2. ``deg_H(u) + deg_H(v) >= (1-eps)B`` for every edge of ``G`` not in ``H``.

Both bounds are applied to integer degree sums, so the working thresholds
are ``floor(B)`` and ``ceil((1-eps)B)``.  Local repair terminates whenever
the lower threshold is at most ``floor(B) - 1``; otherwise an EDCS need not
exist (a triangle with ``B = 2`` and a lower bound of ``2`` has none), and
``InvalidParams`` is raised.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional

from .core import DynGraph, InvalidParams, Kind, UpdateEvent, WorkCounter, edge_key

_FLOAT_SLACK = 1e-9


def edcs_thresholds(B: float, eps: float) -> tuple[int, int]:
    """Integer ``(upper, lower)`` degree-sum thresholds."""
    upper = math.floor(B + _FLOAT_SLACK)
    lower = math.ceil((1.0 - eps) * B - _FLOAT_SLACK)
    return upper, lower


def effective_eps(B: float, eps: float) -> float:
    """Smallest slack at least ``eps`` for which local repair is well posed."""
    upper = math.floor(B + _FLOAT_SLACK)
    return max(eps, 1.0 - (upper - 1) / B)


@dataclass
class EdcsReport:
    over_full: list[tuple[int, int]] = field(default_factory=list)
    missing: list[tuple[int, int]] = field(default_factory=list)
    foreign: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.over_full or self.missing or self.foreign)


class EdcsState:
    def __init__(self, g: DynGraph, B: float, eps: float, work: Optional[WorkCounter] = None):
        if not 0 < eps < 1:
            raise InvalidParams(f"eps must lie in (0, 1), got {eps}")
        if B > g.n and g.n > 0:
            raise InvalidParams(f"B={B} exceeds n={g.n}")
        if (1 - eps) * B < 1 - _FLOAT_SLACK:
            raise InvalidParams("(1-eps)B must be at least 1")
        self.upper, self.lower = edcs_thresholds(B, eps)
        if self.lower > self.upper - 1:
            raise InvalidParams(
                f"lower threshold {self.lower} must be at most floor(B)-1={self.upper - 1}"
            )
        self.g = g
        self.B = B
        self.eps = eps
        self.h = DynGraph(g.n)
        self.work = work if work is not None else WorkCounter()
        self.dirty: deque = deque()  # edges, or vertex tokens
        self._queued: set[tuple[int, int]] = set()
        self._tokens: Counter = Counter()
        # vertices with deg_G > 0, bucketed by deg_H
        self._bucket: list[set[int]] = [set() for _ in range(self.upper + 2)]
        for v in range(g.n):
            if g.degree(v) > 0:
                self._bucket[0].add(v)
        self._changes: list[tuple[Kind, int, int]] = []

    # queue helpers

    def _push(self, u: int, v: int) -> None:
        key = edge_key(u, v)
        if key not in self._queued:
            self._queued.add(key)
            self.dirty.append(key)

    def _set_hdeg(self, v: int, old: int, new: int) -> None:
        if self.g.degree(v) > 0:
            self._bucket[old].discard(v)
            self._bucket[new].add(v)

    def _h_add(self, u: int, v: int) -> None:
        du, dv = self.h.degree(u), self.h.degree(v)
        self.h.add_edge(u, v)
        self._set_hdeg(u, du, du + 1)
        self._set_hdeg(v, dv, dv + 1)
        self._changes.append((Kind.INSERT, *edge_key(u, v)))
        self.work["edcs_flip"] += 1
        self._after_increase(u)
        self._after_increase(v)

    def _h_remove(self, u: int, v: int) -> None:
        du, dv = self.h.degree(u), self.h.degree(v)
        self.h.remove_edge(u, v)
        self._set_hdeg(u, du, du - 1)
        self._set_hdeg(v, dv, dv - 1)
        self._changes.append((Kind.DELETE, *edge_key(u, v)))
        self.work["edcs_flip"] += 1
        self._after_decrease(u)
        self._after_decrease(v)

    def _after_increase(self, x: int) -> None:
        # only H-edges at x can have become over-full
        dx = self.h.degree(x)
        self.work["edcs_scan"] += dx
        for y in self.h.neighbors(x):
            if dx + self.h.degree(y) > self.upper:
                self._push(x, y)

    def _after_decrease(self, x: int) -> None:
        # One token per unit of H-degree lost at x.  Every non-H edge that
        # violates the lower bound is queued, or has a token at an endpoint.
        self._tokens[x] += 1
        self.dirty.append(x)

    def _fill(self, x: int) -> None:
        # Add one violating edge at x, if any.  With k tokens pending at x an
        # uncovered violator has deg_H in [lim - k, lim - 1].
        k = self._tokens[x]
        self._tokens[x] = k - 1
        if k == 1:
            del self._tokens[x]
        lim = self.lower - self.h.degree(x)
        if lim <= 0:
            return
        gx, hx, h = self.g.neighbors(x), self.h.neighbors(x), self.h
        lo = max(0, lim - k)
        buckets = self._bucket[lo:lim]
        if sum(len(b) for b in buckets) < len(gx):
            for b in buckets:
                self.work["edcs_scan"] += len(b)
                for y in sorted(b):
                    if y != x and y in gx and y not in hx:
                        self._h_add(x, y)
                        return
            return
        seen = 0
        for y in gx:
            seen += 1
            if h.degree(y) < lim and y not in hx:
                self.work["edcs_scan"] += seen
                self._h_add(x, y)
                return
        self.work["edcs_scan"] += seen

    def _repair(self) -> None:
        g, h = self.g, self.h
        while self.dirty:
            item = self.dirty.popleft()
            self.work["edcs_pop"] += 1
            if isinstance(item, int):
                self._fill(item)
                continue
            self._queued.discard(item)
            u, v = item
            if not g.has_edge(u, v):
                continue
            s = h.degree(u) + h.degree(v)
            if h.has_edge(u, v):
                if s > self.upper:
                    self._h_remove(u, v)
            elif s < self.lower:
                self._h_add(u, v)

    def _touch_gdeg(self, v: int, before: int) -> None:
        after = self.g.degree(v)
        if before == 0 and after > 0:
            self._bucket[self.h.degree(v)].add(v)
        elif before > 0 and after == 0:
            self._bucket[self.h.degree(v)].discard(v)

    def bootstrap(self) -> list[tuple[Kind, int, int]]:
        self._changes = []
        for u, v in self.g.edges():
            self._push(u, v)
        self._repair()
        return self._changes

    def on_update(self, e: UpdateEvent) -> list[tuple[Kind, int, int]]:
        """Restore both conditions after ``e`` has been applied to the host graph."""
        self._changes = []
        u, v = e.u, e.v
        if e.kind is Kind.INSERT:
            self._touch_gdeg(u, self.g.degree(u) - 1)
            self._touch_gdeg(v, self.g.degree(v) - 1)
            self._push(u, v)
        else:
            self._touch_gdeg(u, self.g.degree(u) + 1)
            self._touch_gdeg(v, self.g.degree(v) + 1)
            if self.h.has_edge(u, v):
                self._h_remove(u, v)
        self._repair()
        return self._changes

    def validate(self) -> EdcsReport:
        rep = EdcsReport()
        h, g = self.h, self.g
        for u, v in h.edges():
            if not g.has_edge(u, v):
                rep.foreign.append((u, v))
            if h.degree(u) + h.degree(v) > self.upper:
                rep.over_full.append((u, v))
        for u, v in g.edges():
            if not h.has_edge(u, v) and h.degree(u) + h.degree(v) < self.lower:
                rep.missing.append((u, v))
        return rep


def edcs_init(g: DynGraph, B: float, eps: float, work: Optional[WorkCounter] = None) -> EdcsState:
    s = EdcsState(g, B, eps, work)
    s.bootstrap()
    return s


def edcs_on_update(s: EdcsState, e: UpdateEvent) -> list[tuple[Kind, int, int]]:
    return s.on_update(e)


def edcs_validate(s: EdcsState) -> EdcsReport:
    return s.validate()
