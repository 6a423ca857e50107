"""Update-stream models and the text stream format.

Format::

    n <count>
    # initial <k>        (optional block: edges present before update 0)
    + u v
    # updates
    + u v
    - u v

Files without the ``# initial`` marker contain updates only.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

from ..core import Kind, UpdateEvent, edge_key

MODELS = ("random", "decremental", "adaptive", "file")


@dataclass
class StreamSpec:
    n: int
    length: int
    model: str = "random"
    seed: int = 0
    p_insert: float = 0.5
    density: float = 0.1
    hub_fraction: float = 0.0
    path: Optional[str] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.n < 2 and self.model != "file":
            raise ValueError("need at least two vertices")


@dataclass
class Stream:
    n: int
    initial_edges: list[tuple[int, int]] = field(default_factory=list)
    events: Sequence[UpdateEvent] | Iterator[UpdateEvent] = field(default_factory=list)


class _EdgePool:
    """Edge set with O(1) uniform sampling."""

    def __init__(self):
        self.items: list[tuple[int, int]] = []
        self.pos: dict[tuple[int, int], int] = {}

    def add(self, e):
        self.pos[e] = len(self.items)
        self.items.append(e)

    def remove(self, e):
        i = self.pos.pop(e)
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def __contains__(self, e):
        return e in self.pos

    def __len__(self):
        return len(self.items)

    def sample(self, rng):
        return self.items[rng.randrange(len(self.items))]


def random_graph(n: int, p: float, rng: random.Random) -> list[tuple[int, int]]:
    return [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]


def _random_absent(n: int, pool: _EdgePool, rng: random.Random, hubs: Sequence[int]) -> Optional[tuple[int, int]]:
    if len(pool) >= n * (n - 1) // 2:
        return None
    while True:
        u = rng.choice(hubs) if hubs and rng.random() < 0.5 else rng.randrange(n)
        v = rng.randrange(n)
        if u != v:
            e = edge_key(u, v)
            if e not in pool:
                return e


def gen_stream(spec: StreamSpec, observer: Optional[Callable[[], list]] = None) -> Stream:
    """Build the stream described by ``spec``.

    For the adaptive model ``observer`` must return the current matching as
    an edge list; events are then produced lazily, one per call of ``next``.
    """
    if spec.model == "file":
        return read_stream(spec.path, limit=spec.length)
    rng = random.Random(spec.seed)
    n = spec.n
    if spec.model == "decremental":
        init = random_graph(n, spec.density, rng)
        order = list(init)
        rng.shuffle(order)
        events = [UpdateEvent(Kind.DELETE, u, v) for u, v in order[: spec.length]]
        return Stream(n, init, events)
    init = random_graph(n, spec.density, rng)
    hubs = rng.sample(range(n), max(1, round(spec.hub_fraction * n))) if spec.hub_fraction > 0 else []
    if spec.model == "random":
        return Stream(n, init, list(_random_events(spec, init, rng, hubs)))
    if observer is None:
        raise ValueError("the adaptive model needs an observer of the current matching")
    return Stream(n, init, _adaptive_events(spec, init, rng, observer, hubs))


def _random_events(spec, init, rng, hubs) -> Iterator[UpdateEvent]:
    pool = _EdgePool()
    for e in init:
        pool.add(e)
    for _ in range(spec.length):
        e = None
        if len(pool) == 0 or rng.random() < spec.p_insert:
            e = _random_absent(spec.n, pool, rng, hubs)
        if e is not None:
            pool.add(e)
            yield UpdateEvent(Kind.INSERT, *e)
        else:
            e = pool.sample(rng)
            pool.remove(e)
            yield UpdateEvent(Kind.DELETE, *e)


def _adaptive_events(spec, init, rng, observer, hubs) -> Iterator[UpdateEvent]:
    pool = _EdgePool()
    for e in init:
        pool.add(e)
    for _ in range(spec.length):
        matched = observer() if len(pool) else []
        if matched and rng.random() >= spec.p_insert:
            e = edge_key(*matched[rng.randrange(len(matched))])
            pool.remove(e)
            yield UpdateEvent(Kind.DELETE, *e)
            continue
        e = _random_absent(spec.n, pool, rng, hubs)
        if e is None:
            e = pool.sample(rng)
            pool.remove(e)
            yield UpdateEvent(Kind.DELETE, *e)
        else:
            pool.add(e)
            yield UpdateEvent(Kind.INSERT, *e)


def write_stream(stream: Stream, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(f"n {stream.n}\n")
        if stream.initial_edges:
            f.write(f"# initial {len(stream.initial_edges)}\n")
            for u, v in stream.initial_edges:
                f.write(f"+ {u} {v}\n")
            f.write("# updates\n")
        for e in stream.events:
            f.write(e.to_line() + "\n")


def read_stream(path, limit: Optional[int] = None) -> Stream:
    p = Path(path)
    if not p.exists():
        raise IOError(f"stream file not found: {path}")
    lines = p.read_text(encoding="ascii").splitlines()
    if not lines or not lines[0].startswith("n "):
        raise ValueError("stream must start with 'n <count>'")
    n = int(lines[0].split()[1])
    init, events = [], []
    target = events
    for line in lines[1:]:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# initial"):
                target = init
            elif line.startswith("# updates"):
                target = events
            continue
        sign, a, b = line.split()
        u, v = int(a), int(b)
        if target is init:
            if sign != "+":
                raise ValueError("initial block may only contain insertions")
            init.append((u, v))
        else:
            events.append(UpdateEvent(Kind(sign), u, v))
    if limit is not None:
        events = events[:limit]
    return Stream(n, init, events)
