"""Property-based checks over generated graphs and update sequences."""

import random

from hypothesis import HealthCheck, given, settings, strategies as st

from dynamatch.core import DynGraph, UpdateEvent, apply_update
from dynamatch.edcs import edcs_init, edcs_on_update, edcs_validate, effective_eps
from dynamatch.engine import Engine, EngineParams
from dynamatch.estree import es_build
from dynamatch.harness.oracle import oracle_verify
from dynamatch.harness.streams import Stream, read_stream, write_stream
from dynamatch.staticmatch import edge_color

from support import es_exact, es_random_ops, random_residual

pairs = st.tuples(st.integers(0, 15), st.integers(0, 15)).filter(lambda p: p[0] != p[1])
settle = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def toggles(g, seq):
    for u, v in seq:
        yield UpdateEvent.delete(u, v) if g.has_edge(u, v) else UpdateEvent.insert(u, v)


@settle
@given(st.lists(pairs, max_size=80))
def test_degree_sum_is_twice_edge_count(seq):
    g = DynGraph(16)
    for e in toggles(g, seq):
        apply_update(g, e)
        assert sum(g.degree(v) for v in range(16)) == 2 * g.m


@settle
@given(st.lists(pairs, max_size=60))
def test_colouring_is_proper(seq):
    g = DynGraph(16)
    for e in toggles(g, seq):
        apply_update(g, e)
    col = edge_color(g)
    delta = max((g.degree(v) for v in range(16)), default=0)
    assert col.is_proper() and col.C <= delta + 1


@settle
@given(st.lists(pairs, max_size=120), st.sampled_from([3, 4, 6, 8]), st.sampled_from([0.25, 0.5]))
def test_edcs_stays_valid(seq, B, eps):
    g = DynGraph(16)
    s = edcs_init(g, B, effective_eps(B, eps))
    for e in toggles(g, seq):
        apply_update(g, e)
        edcs_on_update(s, e)
    assert edcs_validate(s).ok


@settle
@given(st.integers(0, 10**6), st.integers(4, 30))
def test_es_tree_matches_dijkstra(seed, size):
    rng = random.Random(seed)
    tr = es_build(random_residual(rng, size))
    es_random_ops(tr, rng, 40, check=es_exact)


@settle
@given(st.lists(pairs, max_size=150), st.sampled_from(["det", "rand"]), st.integers(0, 99))
def test_engine_output_is_maximal(seq, backend, seed):
    eng = Engine(16, EngineParams(B=6, eps=0.01, delta=0.3, backend=backend, seed=seed))
    for e in toggles(eng.g, seq):
        eng.handle_update(e)
        assert oracle_verify(eng.g, eng.current_matching()) is None
    assert eng.audit() == []


@settle
@given(init=st.lists(pairs, max_size=40), seq=st.lists(pairs, max_size=40))
def test_stream_round_trip(tmp_path_factory, init, seq):
    g = DynGraph(16)
    initial = sorted({(min(u, v), max(u, v)) for u, v in init})
    for u, v in initial:
        g.add_edge(u, v)
    events = []
    for e in toggles(g, seq):
        apply_update(g, e)
        events.append(e)
    path = tmp_path_factory.mktemp("s") / "s.txt"
    write_stream(Stream(16, initial, events), path)
    back = read_stream(path)
    assert back.initial_edges == initial and back.events == events
