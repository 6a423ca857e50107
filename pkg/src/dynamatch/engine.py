"""Phase-based fully dynamic maximal matching.

Each phase covers ``floor(delta * n)`` updates.  At phase start the EDCS
``H`` is frozen as ``H_init`` and vertices are classified by their
``H_init`` degree (low, medium, high; almost-low and very-high subflags).
``M_base`` starts as a matching covering most near-max-degree vertices and
is then extended so every safe high vertex is matched, using the LPM
structure on ``H_hilo`` (high vertices on the left, low and almost-low
vertices on the right).  Vertices left free by ``M_base`` form the adjunct
graph, on which a maximal matching ``M_adj`` is kept greedily.  The output
is ``M_base + M_adj + (greedy edges among new insertions)``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, asdict, field
from typing import Optional

from sortedcontainers import SortedSet

from .core import (DynGraph, InvalidParams, Kind, Matching, UpdateEvent,
                   WorkCounter, apply_update, edge_key)
from .edcs import EdcsState, effective_eps
from .lpm import DegreeGapGraph, LpmDet, LpmRand
from .staticmatch import match_most

LO, MED, HI = 0, 1, 2


class RecourseExceeded(AssertionError):
    pass


@dataclass
class EngineParams:
    B: float
    eps: float
    delta: Optional[float] = None
    X: Optional[float] = None
    gamma: Optional[float] = None
    strict_gamma: bool = False
    backend: str = "det"
    recourse_cap: int = 4
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


class Engine:
    def __init__(self, n: int, params: EngineParams, initial_edges=(), work: Optional[WorkCounter] = None):
        p = params
        self.n = n
        self.params = p
        self.work = work if work is not None else WorkCounter()
        self.delta = p.delta if p.delta is not None else 100 * p.eps
        self.eps_eff = effective_eps(p.B, p.eps)
        d, e, B = self.delta, self.eps_eff, p.B
        self.lo_thr = (0.5 - d) * B
        self.alo_cap = (0.5 - d + e) * B
        self.hi_thr = (0.5 + d - e) * B
        self.Delta = (0.5 + d) * B
        self.X = p.X if p.X is not None else (0.5 + d - 2 * e) * B
        if p.gamma is not None:
            self.gamma = p.gamma
        else:
            self.gamma = d / 1e8 if p.strict_gamma else d / 8
        self.kappa = 3 * d
        self._validate()
        self.phase_len = max(1, math.floor(d * n))
        self.rng = random.Random(p.seed)

        self.g = DynGraph(n, initial_edges)
        self.edcs = EdcsState(self.g, B, e, self.work)
        self.edcs.bootstrap()

        self.phase = 0
        self.updates_in_phase = 0
        self.update_index = 0
        self.fault: Optional[str] = None
        self.last_h_changes: list = []
        self.stats = {"max_recourse": 0, "max_med_free": 0, "max_damaged": 0,
                      "augments": 0, "phases": 0}
        self.start_phase()

    def _validate(self) -> None:
        d, e, B = self.delta, self.eps_eff, self.params.B
        if not 0 < d <= 0.5:
            raise InvalidParams(f"delta must lie in (0, 1/2], got {d}")
        if not 3 * e < 2 * d:
            raise InvalidParams(
                f"thresholds not well ordered: need 3*eps < 2*delta (eps={e:.4g}, delta={d:.4g})")
        if self.alo_cap > (1 - self.gamma) * self.X + 1e-9:
            raise InvalidParams("almost-low degrees exceed the right-side gap (1-gamma)X")
        if not 0 < self.gamma < 1:
            raise InvalidParams(f"gamma must lie in (0, 1), got {self.gamma}")
        if d * self.n < 1:
            raise InvalidParams("delta * n must be at least 1")

    # classification

    def classify(self, deg: int) -> tuple[int, bool, bool]:
        """Return ``(class, almost_low, very_high)`` for an ``H_init`` degree."""
        if deg >= self.hi_thr - 1e-9:
            return HI, False, deg > self.Delta + 1e-9
        if deg < self.lo_thr - 1e-9:
            return LO, False, False
        return MED, deg <= self.alo_cap + 1e-9, False

    def is_safe(self, v: int) -> bool:
        return self.cls[v] == HI and v not in self.dmg

    # phase start

    def start_phase(self) -> None:
        n, work = self.n, self.work
        self.phase += 1
        self.stats["phases"] += 1
        self.updates_in_phase = 0
        h_core = self.edcs.h.copy()
        work["phase_init"] += n + 2 * h_core.m
        self.h_core = h_core
        self.cls = [LO] * n
        self.alo = [False] * n
        vhi = []
        for v in range(n):
            c, a, vh = self.classify(h_core.degree(v))
            self.cls[v] = c
            self.alo[v] = a
            if vh:
                vhi.append(v)
        hi = [v for v in range(n) if self.cls[v] == HI]

        h_prime = h_core.copy()
        cap = math.floor(self.Delta + 1e-9)
        for v in vhi:
            while h_prime.degree(v) > cap:
                h_prime.remove_edge(v, h_prime.adj[v][-1])
        mode = self.params.backend
        if mode == "rand" and self.Delta < 4 / self.kappa:
            mode = "det"
        m_most = match_most(h_prime, self.Delta, self.kappa, mode, self.rng, work)
        self.m_base = m_most
        self.m_adj = Matching(n)
        self.m_new = Matching(n)
        self.dmg: dict[int, SortedSet] = {}
        self.med_free: dict[int, None] = {}
        # medium vertices free in both M_base and M_adj
        self.med_open: dict[int, None] = {}
        self.e_new: set[tuple[int, int]] = set()
        self.new_adj: list[set[int]] = [set() for _ in range(n)]
        self._adj_ready = False
        self._pending: list[int] = []
        self._rec: dict[int, bool] = {}

        hilo = DynGraph(n)
        right = set()
        for v in hi:
            for y in h_core.adj[v]:
                hilo.add_edge(v, y)
                right.add(y)
        gg = DegreeGapGraph(hilo, hi, right, self.X, self.gamma)
        m0 = Matching(n)
        for v in hi:
            y = self.m_base.mate[v]
            if y is not None:
                m0.match(v, y)
        if self.params.backend == "det":
            self.lpm = LpmDet(gg, m0, work)
        else:
            self.lpm = LpmRand(gg, m0, work, seed=self.rng.getrandbits(32))
        for v in hi:
            if self.lpm.is_free(v):
                self.match_via_augment(v)

        self._adj_ready = True
        for v in range(n):
            if self.m_base.mate[v] is None and self.cls[v] == MED:
                self.med_free[v] = None
                self.med_open[v] = None
        self._pending = [v for v in range(n) if self.m_base.mate[v] is None]
        work["phase_init"] += n
        self._settle()
        self._overlay()
        self._note_stats()

    # M_base bookkeeping

    def _mb_apply(self, removes, adds) -> None:
        mb = self.m_base
        touched = []
        for a, b in removes:
            touched += (a, b)
        for a, b in adds:
            touched += (a, b)
        before = {}
        for x in touched:
            if x not in before:
                before[x] = mb.mate[x] is not None
                self._rec.setdefault(x, before[x])
        for a, b in removes:
            mb.unmatch(a, b)
        for a, b in adds:
            mb.match(a, b)
        for x, was in before.items():
            now = mb.mate[x] is not None
            if was and not now:
                self._enter_adj(x)
            elif now and not was:
                self._leave_adj(x)

    def _enter_adj(self, x: int) -> None:
        if not self._adj_ready:
            return
        if self.cls[x] == MED:
            self.med_free[x] = None
            if self.m_adj.mate[x] is None:
                self.med_open[x] = None
        self._free_on(x)
        self._pending.append(x)

    def _leave_adj(self, x: int) -> None:
        if not self._adj_ready:
            return
        self.med_free.pop(x, None)
        self.med_open.pop(x, None)
        y = self.m_adj.mate[x]
        if y is not None:
            self.m_adj.unmatch(x, y)
            if y in self.med_free:
                self.med_open[y] = None
            self._free_on(y)
            self._pending.append(y)
        else:
            self._free_off(x)

    # adjunct bookkeeping

    def _is_free(self, y: int) -> bool:
        return self.m_base.mate[y] is None and self.m_adj.mate[y] is None

    def _damaged_nbrs(self, x: int):
        dmg = self.dmg
        if not dmg:
            return ()
        adj = self.g.adj[x]
        if len(adj) < len(dmg):
            self.work["adj_scan"] += len(adj)
            return [w for w in adj if w in dmg]
        self.work["adj_scan"] += len(dmg)
        return [w for w in dmg if w in adj]

    def _free_on(self, x: int) -> None:
        for w in self._damaged_nbrs(x):
            self.dmg[w].add(x)

    def _free_off(self, x: int) -> None:
        for w in self._damaged_nbrs(x):
            self.dmg[w].discard(x)

    def _adj_match(self, a: int, b: int) -> None:
        self.m_adj.match(a, b)
        self.med_open.pop(a, None)
        self.med_open.pop(b, None)
        self._free_off(a)
        self._free_off(b)

    def _adj_unmatch(self, a: int, b: int) -> None:
        self.m_adj.unmatch(a, b)
        for x in (a, b):
            if self.m_base.mate[x] is None:
                if x in self.med_free:
                    self.med_open[x] = None
                self._free_on(x)
                self._pending.append(x)

    def find_free_neighbor(self, x: int) -> Optional[int]:
        work = self.work
        if x in self.dmg:
            f = self.dmg[x]
            work["adj_scan"] += 1
            return f[0] if f else None
        is_free = self._is_free
        nb = self.h_core.adj[x]
        gx = self.g.adj[x]
        planned = len(nb) + len(self.dmg) + len(self.new_adj[x])
        if self.cls[x] == MED:
            planned += len(self.med_open)
        if len(gx) <= planned:
            # a plain scan of N_G(x) is cheaper and finds any free neighbour
            work["adj_scan"] += len(gx)
            for y in gx:
                if is_free(y):
                    return y
            return None
        work["adj_scan"] += len(nb)
        for y in nb:
            if is_free(y):
                return y
        if self.cls[x] == MED:
            # medium-medium edges need not lie in H_init
            work["adj_scan"] += len(self.med_open)
            for y in self.med_open:
                if y != x and y in gx:
                    return y
        if self.dmg:
            work["adj_scan"] += len(self.dmg)
            for y in self.dmg:
                if y != x and is_free(y) and y in gx:
                    return y
        work["adj_scan"] += len(self.new_adj[x])
        for y in self.new_adj[x]:
            if is_free(y):
                return y
        return None

    def _settle(self) -> None:
        pending, self._pending = self._pending, []
        for x in pending:
            if not self._is_free(x):
                continue
            y = self.find_free_neighbor(x)
            if y is not None and self.fault == "skip_rematch":
                # test hook: drop one rematch that was possible
                self.fault = None
                continue
            if y is not None:
                self._adj_match(x, y)

    def _overlay(self) -> None:
        self.m_new = Matching(self.n)
        if not self.e_new:
            return
        self.work["overlay_scan"] += len(self.e_new)
        mn = self.m_new
        for a, b in sorted(self.e_new):
            if self._is_free(a) and self._is_free(b) and mn.mate[a] is None and mn.mate[b] is None:
                mn.match(a, b)

    # high vertices

    def match_via_augment(self, v: int) -> list[int]:
        path = self.lpm.augment(v)
        self.stats["augments"] += 1
        removes = [(path[i], path[i + 1]) for i in range(1, len(path) - 1, 2)]
        adds = [(path[i], path[i + 1]) for i in range(0, len(path) - 1, 2)]
        end = path[-1]
        other = self.m_base.mate[end]
        if other is not None:
            removes.append((end, other))
        self._mb_apply(removes, adds)
        return path

    def insert_damaged(self, v: int) -> None:
        if self.m_base.mate[v] is not None:
            self._mb_apply([(v, self.m_base.mate[v])], [])
        adj = self.g.adj[v]
        self.work["adj_scan"] += len(adj)
        self.dmg[v] = SortedSet(y for y in adj if self._is_free(y))
        f = self.dmg[v]
        if f and self._is_free(v):
            self._adj_match(v, f[0])

    # updates

    def handle_update(self, e: UpdateEvent) -> int:
        """Process one update; return the number of ``V(M_base)`` changes."""
        if self.updates_in_phase >= self.phase_len:
            self.start_phase()
        self._rec = {}
        apply_update(self.g, e)
        self.last_h_changes = self.edcs.on_update(e)
        if e.kind is Kind.INSERT:
            self._insert(e.u, e.v)
        else:
            self._delete(e.u, e.v)
        self._settle()
        self._overlay()
        self.updates_in_phase += 1
        self.update_index += 1
        mb = self.m_base.mate
        recourse = sum(1 for x, was in self._rec.items() if (mb[x] is not None) != was)
        self.stats["max_recourse"] = max(self.stats["max_recourse"], recourse)
        self._note_stats()
        if recourse > self.params.recourse_cap:
            raise RecourseExceeded(
                f"update {self.update_index - 1}: {recourse} changes to V(M_base)")
        return recourse

    def _note_stats(self) -> None:
        s = self.stats
        s["max_med_free"] = max(s["max_med_free"], len(self.med_free))
        s["max_damaged"] = max(s["max_damaged"], len(self.dmg))
        s["max_sink_weight"] = max(s.get("max_sink_weight", 0), getattr(self.lpm, "max_sink_weight", 0))

    def _insert(self, u: int, v: int) -> None:
        self.e_new.add(edge_key(u, v))
        self.new_adj[u].add(v)
        self.new_adj[v].add(u)
        if self._is_free(u) and self._is_free(v):
            self._adj_match(u, v)
            return
        if u in self.dmg and self._is_free(v):
            self.dmg[u].add(v)
        if v in self.dmg and self._is_free(u):
            self.dmg[v].add(u)

    def _delete(self, u: int, v: int) -> None:
        key = edge_key(u, v)
        if key in self.e_new:
            self.e_new.discard(key)
            self.new_adj[u].discard(v)
            self.new_adj[v].discard(u)
        for a, b in ((u, v), (v, u)):
            if a in self.dmg:
                self.dmg[a].discard(b)
        if self.h_core.has_edge(u, v):
            self.h_core.remove_edge(u, v)
        removes = []
        newly_damaged = None
        left, right = (u, v) if self.cls[u] == HI else (v, u)
        if self.cls[left] == HI and self.lpm.has_edge(left, right):
            res = self.lpm.delete(left, right)
            removes.extend(res.unmatched)
            newly_damaged = res.tombstoned
        if self.m_base.mate[u] == v and not any(edge_key(*r) == key for r in removes):
            removes.append((u, v))
        if self.m_adj.mate[u] == v:
            self._adj_unmatch(u, v)
        if removes:
            self._mb_apply(removes, [])
        if newly_damaged is not None:
            self.insert_damaged(newly_damaged)
        for w in (u, v):
            if self.is_safe(w) and self.lpm.is_free(w):
                self.match_via_augment(w)

    # queries

    def current_matching(self) -> Matching:
        m = Matching(self.n)
        for src in (self.m_base, self.m_adj, self.m_new):
            for a, b in src.edges():
                m.match(a, b)
        return m

    def final_mate(self) -> list[Optional[int]]:
        mate = list(self.m_base.mate)
        for src in (self.m_adj, self.m_new):
            for x, y in enumerate(src.mate):
                if y is not None:
                    mate[x] = y
        return mate

    def matching_edges(self) -> list[tuple[int, int]]:
        return sorted(self.current_matching().edges())

    def damaged_bound(self) -> float:
        return 2 * self.delta * self.n / (self.eps_eff * self.params.B)

    def audit(self) -> list[str]:
        """Full structural self-check; returns human-readable violations."""
        out = []
        n, mb, ma, mn = self.n, self.m_base, self.m_adj, self.m_new
        for x in range(n):
            ys = [m.mate[x] for m in (mb, ma, mn) if m.mate[x] is not None]
            if len(ys) > 1:
                out.append(f"vertex {x} matched in several parts")
        for a, b in mb.edges():
            if not self.h_core.has_edge(a, b):
                out.append(f"M_base edge ({a}, {b}) not in H_core")
        for a, b in ma.edges() + mn.edges():
            if not self.g.has_edge(a, b):
                out.append(f"adjunct edge ({a}, {b}) not in G")
        for v in range(n):
            if self.is_safe(v):
                if mb.mate[v] is None:
                    out.append(f"safe high vertex {v} unmatched in M_base")
                elif self.lpm.M.mate[v] != mb.mate[v]:
                    out.append(f"M_hilo differs from M_base at {v}")
                if self.h_core.degree(v) < self.X - 1e-9:
                    out.append(f"safe vertex {v} below X")
        for x in range(n):
            y = self.lpm.M.mate[x]
            if y is not None and mb.mate[x] != y:
                out.append(f"M_hilo edge at {x} missing from M_base")
        for w, f in self.dmg.items():
            want = {y for y in self.g.adj[w] if self._is_free(y)}
            if set(f) != want:
                out.append(f"F_adj({w}) inexact")
            if mb.mate[w] is not None:
                out.append(f"damaged vertex {w} matched in M_base")
        want_med = {v for v in range(n) if self.cls[v] == MED and mb.mate[v] is None}
        if want_med != set(self.med_free):
            out.append("V_med & V_adj list inexact")
        if {v for v in want_med if ma.mate[v] is None} != set(self.med_open):
            out.append("open medium list inexact")
        if len(self.dmg) > self.damaged_bound() + 1e-9:
            out.append(f"|V_dmg|={len(self.dmg)} exceeds {self.damaged_bound():.2f}")
        return out


def start_phase(engine: Engine) -> None:
    engine.start_phase()


def handle_update(engine: Engine, e: UpdateEvent) -> int:
    return engine.handle_update(e)


def match_via_augment(engine: Engine, v: int) -> list[int]:
    return engine.match_via_augment(v)


def insert_damaged(engine: Engine, v: int) -> None:
    engine.insert_damaged(v)


def current_matching(engine: Engine) -> Matching:
    return engine.current_matching()
