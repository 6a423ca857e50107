import random

import pytest

from dynamatch.core import DynGraph, InvalidParams, UpdateEvent, is_maximal
from dynamatch.engine import HI, LO, MED, Engine, EngineParams, current_matching
from dynamatch.harness.oracle import oracle_verify
from dynamatch.harness.runner import AuditFailure, run
from dynamatch.harness.streams import StreamSpec, random_graph
from dynamatch.staticmatch import match_most


def dense_engine(n=64, B=16, seed=0, density=0.5, backend="det"):
    edges = random_graph(n, density, random.Random(seed))
    return Engine(n, EngineParams(B=B, eps=0.002, backend=backend, seed=seed), edges)


def parts_disjoint(eng):
    seen = set()
    for part in (eng.m_base, eng.m_adj, eng.m_new):
        for a, b in part.edges():
            if a in seen or b in seen:
                return False
            seen.update((a, b))
    return True


def test_threshold_arithmetic():
    eng = Engine(1000, EngineParams(B=1000, eps=0.001))
    assert eng.delta == pytest.approx(0.1)
    assert eng.classify(650) == (HI, False, True)
    assert eng.classify(600) == (HI, False, False)
    assert eng.classify(599)[0] == HI
    assert eng.classify(598)[0] == MED
    assert eng.classify(450) == (MED, False, False)
    assert eng.classify(401) == (MED, True, False)
    assert eng.classify(400) == (MED, True, False)
    assert eng.classify(399) == (LO, False, False)
    assert eng.classify(300)[0] == LO


def test_invalid_params():
    with pytest.raises(InvalidParams):
        Engine(8, EngineParams(B=4, eps=0.01))  # delta = 1
    with pytest.raises(InvalidParams):
        Engine(8, EngineParams(B=8, eps=0.001))  # delta * n < 1


def test_path_is_all_low():
    path = [(i, i + 1) for i in range(7)]
    eng = Engine(8, EngineParams(B=8, eps=0.001, delta=0.2), path)
    assert all(c == LO for c in eng.cls)
    assert not eng.lpm.gg.left
    g = DynGraph(8, path)
    expected = match_most(g, eng.Delta, eng.kappa)
    assert sorted(eng.m_base.edges()) == sorted(expected.edges())
    assert is_maximal(eng.g, current_matching(eng)) is None


def test_empty_graph_gives_empty_matching():
    eng = Engine(20, EngineParams(B=8, eps=0.002))
    assert current_matching(eng).size == 0


@pytest.mark.parametrize("seed", range(5))
def test_maximal_after_start_phase(seed):
    eng = dense_engine(seed=seed)
    assert oracle_verify(eng.g, eng.current_matching()) is None
    assert parts_disjoint(eng)
    assert eng.audit() == []
    for v in range(eng.n):
        if eng.is_safe(v):
            assert eng.m_base.mate[v] is not None


def test_delete_outside_core_keeps_output():
    eng = dense_engine(seed=3)
    mate = eng.final_mate()
    cand = [(u, v) for u, v in eng.g.edges()
            if not eng.h_core.has_edge(u, v) and mate[u] not in (None, v)
            and mate[v] not in (None, u) and (u, v) not in eng.e_new]
    assert cand
    before = eng.matching_edges()
    eng.handle_update(UpdateEvent.delete(*cand[0]))
    assert eng.matching_edges() == before


def test_delete_adjunct_edge_rematches():
    eng = dense_engine(seed=4, density=0.02)
    free = [x for x in range(eng.n) if eng.final_mate()[x] is None and eng.cls[x] == LO]
    a, b, c = free[:3]
    eng.handle_update(UpdateEvent.insert(a, b))
    assert eng.m_adj.mate[a] == b
    eng.handle_update(UpdateEvent.insert(b, c))
    assert eng.final_mate()[c] is None
    eng.handle_update(UpdateEvent.delete(a, b))
    # b scans its neighbourhood and picks up c
    assert eng.final_mate()[b] == c and eng.final_mate()[a] is None
    assert oracle_verify(eng.g, eng.current_matching()) is None
    assert eng.audit() == []


def hub_engine(seed, n=64, hubs=4):
    rng = random.Random(seed)
    edges = set(random_graph(n, 0.05, rng))
    for h in range(hubs):
        for y in rng.sample(range(hubs, n), 30):
            edges.add((h, y))
    return Engine(n, EngineParams(B=16, eps=0.002, seed=seed), sorted(edges))


@pytest.mark.parametrize("seed", range(4))
def test_insert_damaged_builds_exact_free_sets(seed):
    eng = hub_engine(seed)
    his = [v for v in range(eng.n) if eng.cls[v] == HI]
    assert his
    for v in his:
        eng.insert_damaged(v)
        assert eng.m_base.mate[v] is None
        want = {y for y in eng.g.adj[v] if eng._is_free(y)}
        assert set(eng.dmg[v]) == want
        if eng.m_adj.mate[v] is None:
            assert want == set()
        else:
            assert eng.m_adj.mate[v] in eng.g.adj[v]
    assert oracle_verify(eng.g, eng.current_matching()) is None


def test_insert_damaged_small_cases():
    eng = Engine(12, EngineParams(B=8, eps=0.001, delta=0.2), [(0, 1), (0, 2), (1, 3), (2, 4)])
    assert sorted(eng.m_base.edges()) == [(0, 1), (2, 4)]
    # 3 has a single neighbour, already matched
    eng.insert_damaged(3)
    assert list(eng.dmg[3]) == [] and eng.final_mate()[3] is None
    # 0 loses its base edge; 1 is then its only free neighbour
    eng.insert_damaged(0)
    assert eng.m_base.mate[0] is None and eng.m_adj.mate[0] == 1
    assert eng.audit() == []


def test_injected_fault_is_caught():
    spec = StreamSpec(n=64, length=400, model="decremental", seed=2, density=0.3)
    with pytest.raises(AuditFailure) as info:
        run(64, EngineParams(B=16, eps=0.002), spec, audit="full", fault="skip_rematch")
    assert info.value.invariant == "maximality"


@pytest.mark.parametrize("backend", ["det", "rand"])
def test_union_disjoint_on_hub_stream(backend):
    n = 64
    spec = StreamSpec(n=n, length=600, model="random", seed=7, density=0.3, hub_fraction=0.05)
    m = run(n, EngineParams(B=16, eps=0.002, backend=backend, seed=7), spec,
            audit="full", sample_every=25)
    assert m.audit_failures == [] and m.max_recourse <= 4


@pytest.mark.slow
def test_long_random_stream_stays_maximal():
    n = 256
    spec = StreamSpec(n=n, length=10_000, model="random", seed=11, density=0.02, hub_fraction=0.05)
    m = run(n, EngineParams(B=32, eps=0.002), spec, audit="full", sample_every=200)
    assert m.updates == 10_000 and m.audit_failures == []
