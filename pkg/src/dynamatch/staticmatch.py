"""Static matchings that cover almost all near-maximum-degree vertices.

``edge_color`` is the Misra-Gries constructive proof of Vizing's theorem
(at most Delta+1 colors).  ``match_most`` picks a color class leaving few
vertices of ``V_kappa = {v : deg(v) >= (1-kappa) Delta}`` unmatched.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .core import DynGraph, InvalidParams, Matching, WorkCounter, edge_key


class Mode(str, Enum):
    DETERMINISTIC = "det"
    RANDOMIZED = "rand"


@dataclass
class EdgeColoring:
    colors: dict[tuple[int, int], int]
    C: int

    def classes(self) -> list[list[tuple[int, int]]]:
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.C)]
        for e, c in sorted(self.colors.items()):
            out[c].append(e)
        return out

    def is_proper(self) -> bool:
        seen: dict[tuple[int, int], tuple[int, int]] = {}
        for (u, v), c in self.colors.items():
            for x in (u, v):
                if (x, c) in seen:
                    return False
                seen[(x, c)] = (u, v)
        return True


class _Coloring:
    def __init__(self, g: DynGraph, ncolors: int, work: WorkCounter):
        self.g = g
        self.k = ncolors
        self.at: list[dict[int, int]] = [dict() for _ in range(g.n)]  # vertex -> color -> neighbor
        self.col: dict[tuple[int, int], int] = {}
        self.work = work

    def color_of(self, u: int, v: int) -> Optional[int]:
        return self.col.get(edge_key(u, v))

    def set(self, u: int, v: int, c: int) -> None:
        self.col[edge_key(u, v)] = c
        self.at[u][c] = v
        self.at[v][c] = u

    def unset(self, u: int, v: int) -> None:
        c = self.col.pop(edge_key(u, v))
        del self.at[u][c]
        del self.at[v][c]

    def free(self, x: int) -> int:
        at = self.at[x]
        for c in range(self.k):
            if c not in at:
                return c
        raise AssertionError("no free color")

    def is_free(self, x: int, c: int) -> bool:
        return c not in self.at[x]

    def fan(self, u: int, v: int) -> list[int]:
        fan = [v]
        in_fan = {v}
        at_u = self.at[u]
        while True:
            last = fan[-1]
            nxt = None
            for c, x in at_u.items():
                if x not in in_fan and c not in self.at[last]:
                    nxt = x
                    break
            self.work["color_scan"] += len(at_u)
            if nxt is None:
                return fan
            fan.append(nxt)
            in_fan.add(nxt)

    def invert_path(self, u: int, c: int, d: int) -> None:
        # the maximal path from u alternating d, c, d, ...
        path_edges = []
        x, want = u, d
        while want in self.at[x]:
            y = self.at[x][want]
            path_edges.append((x, y, want))
            x = y
            want = c if want == d else d
        self.work["color_scan"] += len(path_edges)
        for a, b, _ in path_edges:
            self.unset(a, b)
        for a, b, cc in path_edges:
            self.set(a, b, d if cc == c else c)

    def color_edge(self, u: int, v: int) -> None:
        au, av = self.at[u], self.at[v]
        for c in range(self.k):
            if c not in au and c not in av:
                self.set(u, v, c)
                return
        fan = self.fan(u, v)
        c = self.free(u)
        d = self.free(fan[-1])
        self.invert_path(u, c, d)
        # first fan vertex with d free such that the prefix is still a fan
        w_idx = None
        for i, x in enumerate(fan):
            if i > 0:
                prev_ok = self.color_of(u, x) is not None and self.is_free(fan[i - 1], self.color_of(u, x))
                if not prev_ok:
                    break
            if self.is_free(x, d):
                w_idx = i
                break
        if w_idx is None:
            raise AssertionError("Misra-Gries invariant broken")
        for i in range(w_idx):
            cc = self.color_of(u, fan[i + 1])
            self.unset(u, fan[i + 1])
            self.set(u, fan[i], cc)
        self.set(u, fan[w_idx], d)


def edge_color(g: DynGraph, work: Optional[WorkCounter] = None,
               palette: Optional[int] = None) -> EdgeColoring:
    """Proper edge coloring with at most max_degree + 1 colors.

    A larger ``palette`` lets more edges take a common free color directly,
    which skips most fan rotations; the color count is then bounded by
    ``palette`` instead.
    """
    work = work if work is not None else WorkCounter()
    delta = max((g.degree(v) for v in range(g.n)), default=0)
    st = _Coloring(g, max(delta + 1, palette or 0), work)
    for u, v in g.edges():
        st.color_edge(u, v)
    used = sorted(set(st.col.values()))
    remap = {c: i for i, c in enumerate(used)}
    return EdgeColoring({e: remap[c] for e, c in st.col.items()}, len(used))


def v_kappa(g: DynGraph, Delta: float, kappa: float) -> list[int]:
    thr = (1 - kappa) * Delta - 1e-9
    return [v for v in range(g.n) if g.degree(v) >= thr and g.degree(v) > 0]


def _unmatched_count(cls: list[tuple[int, int]], targets: set[int]) -> int:
    hit = set()
    for u, v in cls:
        if u in targets:
            hit.add(u)
        if v in targets:
            hit.add(v)
    return len(targets) - len(hit)


def match_most(g: DynGraph, Delta: float, kappa: float, mode: str = "det",
               rng: Optional[random.Random] = None, work: Optional[WorkCounter] = None) -> Matching:
    if not 0 < kappa < 1:
        raise InvalidParams(f"kappa must lie in (0, 1), got {kappa}")
    maxdeg = max((g.degree(v) for v in range(g.n)), default=0)
    if maxdeg > Delta + 1e-9:
        raise InvalidParams(f"max degree {maxdeg} exceeds Delta={Delta}")
    mode = Mode(mode)
    work = work if work is not None else WorkCounter()
    targets = set(v_kappa(g, Delta, kappa))
    # the covering argument only needs at most (1 + kappa) * Delta classes
    palette = math.floor((1 + kappa) * Delta + 1e-9)
    m = Matching(g.n)
    if g.m == 0:
        return m
    if mode is Mode.DETERMINISTIC:
        col = edge_color(g, work, palette)
        best = min(col.classes(), key=lambda cls: _unmatched_count(cls, targets))
        for u, v in best:
            m.match(u, v)
        return m

    if Delta < 4 / kappa:
        raise InvalidParams(f"randomized mode expects Delta >= 4/kappa, got Delta={Delta}")
    rng = rng if rng is not None else random.Random(0)
    D = math.floor(Delta + 1e-9)
    n = g.n
    n_dummy = max(1, math.ceil(n * kappa))
    ext = DynGraph(n + n_dummy, g.edges())
    ptr = 0
    for v in sorted(targets):
        for _ in range(D - g.degree(v)):
            # round-robin over dummies, skipping full ones
            for _ in range(n_dummy):
                d = n + ptr
                ptr = (ptr + 1) % n_dummy
                if ext.degree(d) < D and not ext.has_edge(v, d):
                    ext.add_edge(v, d)
                    break
    col = edge_color(ext, work, palette)
    classes = [[(u, v) for u, v in cls if u < n and v < n] for cls in col.classes()]
    bound = 2 * kappa * n
    order = list(range(len(classes)))
    rng.shuffle(order)
    samples = max(1, math.ceil(2 * math.log(max(n, 2))))
    best_idx, best_val = None, None
    # sample O(log n) classes; keep drawing until the bound is met
    for i, c in enumerate(order):
        val = _unmatched_count(classes[c], targets)
        if best_val is None or val < best_val:
            best_idx, best_val = c, val
        if i + 1 >= samples and best_val <= bound:
            break
    for u, v in classes[best_idx]:
        m.match(u, v)
    return m
