import json
import random

import pytest

from dynamatch.core import DynGraph, Kind, Matching, UpdateEvent, apply_update
from dynamatch.engine import Engine, EngineParams
from dynamatch.harness.baseline import ScanBaseline
from dynamatch.harness.cli import main
from dynamatch.harness.oracle import MatrixOracle, oracle_verify
from dynamatch.harness.runner import (
    baseline_work,
    read_metrics,
    run,
    run_many,
    write_metrics,
)
from dynamatch.harness.streams import Stream, StreamSpec, gen_stream, read_stream, write_stream


def replay_valid(stream):
    g = DynGraph(stream.n, stream.initial_edges)
    for e in stream.events:
        apply_update(g, e)  # raises on an invalid event
    return g


# streams

def test_empty_stream():
    s = gen_stream(StreamSpec(n=10, length=0, model="random"))
    assert list(s.events) == []


def test_decremental_k4():
    n = 4
    s = gen_stream(StreamSpec(n=n, length=100, model="decremental", density=1.0, seed=3))
    assert len(s.initial_edges) == 6 and len(s.events) == 6
    assert all(e.kind is Kind.DELETE for e in s.events)
    assert replay_valid(s).m == 0


@pytest.mark.parametrize("model", ["random", "decremental"])
def test_streams_are_replayable(model):
    spec = StreamSpec(n=30, length=300, model=model, seed=9, density=0.2)
    a, b = gen_stream(spec), gen_stream(spec)
    assert a.initial_edges == b.initial_edges and list(a.events) == list(b.events)
    replay_valid(gen_stream(spec))


def test_adaptive_needs_observer():
    with pytest.raises(ValueError):
        gen_stream(StreamSpec(n=10, length=5, model="adaptive"))


def test_unknown_model():
    with pytest.raises(ValueError):
        StreamSpec(n=10, length=5, model="bursty")


def test_adaptive_attack_on_star():
    n = 12
    eng = Engine(n, EngineParams(B=8, eps=0.001, delta=0.2), [(0, i) for i in range(1, n)])
    for _ in range(n - 1):
        (u, v), = eng.matching_edges()  # a star has one matched edge
        assert 0 in (u, v)
        eng.handle_update(UpdateEvent.delete(u, v))
        assert oracle_verify(eng.g, eng.current_matching()) is None
    assert eng.g.m == 0 and eng.matching_edges() == []


def test_adaptive_stream_targets_matched_edges():
    n = 40
    captured = []
    spec = StreamSpec(n=n, length=300, model="adaptive", seed=1, density=0.2, p_insert=0.0)
    m = run(n, EngineParams(B=16, eps=0.002), spec, audit="full", capture=captured)
    assert m.audit_failures == []
    st, = captured
    # replay: each deletion hits the engine's matching at that time; with
    # p_insert = 0 the adversary only inserts once the matching is empty
    eng = Engine(n, EngineParams(B=16, eps=0.002), st.initial_edges)
    kinds = set()
    for e in st.events:
        matched = eng.matching_edges()
        if e.kind is Kind.DELETE:
            assert (min(e.u, e.v), max(e.u, e.v)) in matched
        else:
            assert matched == []
        kinds.add(e.kind)
        eng.handle_update(e)
    assert Kind.DELETE in kinds


def test_stream_file_round_trip(tmp_path):
    spec = StreamSpec(n=25, length=200, model="random", seed=4, density=0.2)
    s = gen_stream(spec)
    path = tmp_path / "s.txt"
    write_stream(s, path)
    back = read_stream(path)
    assert back.n == 25 and back.initial_edges == s.initial_edges
    assert list(back.events) == list(s.events)
    assert len(read_stream(path, limit=10).events) == 10


def test_stream_file_errors(tmp_path):
    with pytest.raises(IOError):
        read_stream(tmp_path / "missing.txt")
    bad = tmp_path / "bad.txt"
    bad.write_text("+ 0 1\n")
    with pytest.raises(ValueError):
        read_stream(bad)


# oracle

def test_oracle_examples():
    assert oracle_verify(DynGraph(3), Matching(3)) is None
    g = DynGraph(2, [(0, 1)])
    assert oracle_verify(g, Matching(2)) == (0, 1)
    assert oracle_verify(g, Matching(2, [(0, 1)])) is None
    # a matching edge missing from the graph is reported too
    assert oracle_verify(DynGraph(2), Matching(2, [(0, 1)])) == (0, 1)


def test_matrix_oracle_agrees_with_scan():
    rng = random.Random(2)
    n = 30
    g = DynGraph(n)
    mo = MatrixOracle(n)
    for _ in range(300):
        u, v = rng.sample(range(n), 2)
        e = UpdateEvent.delete(u, v) if g.has_edge(u, v) else UpdateEvent.insert(u, v)
        apply_update(g, e)
        mo.apply(e)
        mate = [None] * n
        m = Matching(n)
        for a in range(n):
            for b in g.adj[a]:
                if mate[a] is None and mate[b] is None and rng.random() < 0.5:
                    mate[a], mate[b] = b, a
                    m.match(a, b)
        assert (mo.uncovered_edge(mate) is None) == (oracle_verify(g, m) is None)


# runner and metrics

def test_passing_run_has_no_failures():
    spec = StreamSpec(n=48, length=500, model="random", seed=5, density=0.1, hub_fraction=0.05)
    m = run(48, EngineParams(B=12, eps=0.002), spec, audit="full", sample_every=50, window=100)
    assert m.audit_failures == [] and m.updates == 500
    assert len(m.windows) == 5
    assert sum(w["work"] for w in m.windows) == pytest.approx(m.work_per_update * m.updates)


def test_run_rejects_size_mismatch():
    with pytest.raises(ValueError):
        run(10, EngineParams(B=4, eps=0.1), Stream(12, [], []))


def test_metrics_round_trip(tmp_path):
    spec = StreamSpec(n=32, length=200, model="random", seed=6, density=0.1)
    m = run(32, EngineParams(B=8, eps=0.002), spec, window=50)
    path = tmp_path / "m.jsonl"
    write_metrics(m, path)
    back = read_metrics(path)
    assert back == m
    recs = [json.loads(x) for x in path.read_text().splitlines()]
    assert [r["kind"] for r in recs] == ["window"] * 4 + ["summary"]


def test_counters_monotone_across_windows():
    spec = StreamSpec(n=32, length=300, model="random", seed=8, density=0.1)
    m = run(32, EngineParams(B=8, eps=0.002), spec, window=30)
    assert all(w["work"] >= 0 for w in m.windows)


def test_run_many_matches_serial():
    jobs = [(32, EngineParams(B=8, eps=0.002, seed=s),
             StreamSpec(n=32, length=100, model="random", seed=s, density=0.1), "sampled", 20)
            for s in range(3)]
    serial = run_many(jobs)
    parallel = run_many(jobs, workers=2)
    for a, b in zip(serial, parallel):
        assert a.work == b.work and a.audit_failures == b.audit_failures == []


def test_baseline_keeps_maximal():
    rng = random.Random(1)
    n = 30
    b = ScanBaseline(n)
    g = DynGraph(n)
    for _ in range(400):
        u, v = rng.sample(range(n), 2)
        e = UpdateEvent.delete(u, v) if g.has_edge(u, v) else UpdateEvent.insert(u, v)
        apply_update(g, e)
        b.handle_update(e)
        assert oracle_verify(g, Matching(n, b.matching_edges())) is None


def test_baseline_work_on_given_stream():
    s = gen_stream(StreamSpec(n=20, length=50, model="decremental", density=0.5, seed=2))
    assert baseline_work(s) >= 1.0


# command line

def test_cli_gen_run_verify(tmp_path, capsys):
    stream = tmp_path / "s.txt"
    log = tmp_path / "log.txt"
    out = tmp_path / "m.jsonl"
    assert main(["gen", "--model", "random", "--n", "40", "--len", "300", "--seed", "3",
                 "--density", "0.1", "--out", str(stream)]) == 0
    assert main(["run", "--stream", str(stream), "--B", "10", "--eps", "0.002",
                 "--audit", "sampled", "--matching-log", str(log), "--out", str(out)]) == 0
    assert main(["verify", "--stream", str(stream), "--matching-log", str(log)]) == 0
    assert "ok: 300 updates verified" in capsys.readouterr().out
    assert read_metrics(out).updates == 300


def test_cli_verify_catches_bad_log(tmp_path, capsys):
    stream = tmp_path / "s.txt"
    write_stream(Stream(3, [(0, 1)], [UpdateEvent.insert(1, 2)]), stream)
    log = tmp_path / "log.txt"
    log.write_text("\n")
    assert main(["verify", "--stream", str(stream), "--matching-log", str(log)]) == 1
    assert "violates" in capsys.readouterr().out


def test_cli_run_from_spec_and_adaptive_gen(tmp_path, capsys):
    assert main(["run", "--stream", "random:hub_fraction=0.05,density=0.1", "--n", "40",
                 "--len", "200", "--B", "10", "--eps", "0.002", "--audit", "full"]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["updates"] == 200
    path = tmp_path / "a.txt"
    assert main(["gen", "--model", "adaptive", "--n", "30", "--len", "50", "--density", "0.2",
                 "--B", "8", "--out", str(path)]) == 0
    assert len(read_stream(path).events) == 50


def test_cli_run_needs_n_for_specs(capsys):
    assert main(["run", "--stream", "random", "--B", "8", "--eps", "0.01"]) == 2
