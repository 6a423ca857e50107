"""Drive an engine over a stream with audits and work accounting."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

from ..core import Kind, UpdateEvent, WorkCounter
from ..engine import Engine, EngineParams
from .baseline import ScanBaseline
from .oracle import MatrixOracle, oracle_verify
from .streams import Stream, StreamSpec, gen_stream

AUDIT_LEVELS = ("off", "sampled", "full")


class AuditFailure(AssertionError):
    def __init__(self, index: int, invariant: str, detail: str = ""):
        super().__init__(f"update {index}: {invariant} {detail}".strip())
        self.index = index
        self.invariant = invariant
        self.detail = detail


@dataclass
class RunMetrics:
    n: int
    params: dict
    model: str
    seed: int
    updates: int = 0
    work: dict = field(default_factory=dict)
    boot_work: dict = field(default_factory=dict)
    work_per_update: float = 0.0
    max_recourse: int = 0
    max_med_free: int = 0
    med_free_bound: float = 0.0
    max_damaged: int = 0
    damaged_bound: float = 0.0
    phases: int = 0
    augments: int = 0
    max_sink_weight: int = 0
    audits: int = 0
    audit_failures: list = field(default_factory=list)
    wall_time: float = 0.0
    windows: list = field(default_factory=list)

    def to_records(self) -> list[dict]:
        summary = asdict(self)
        windows = summary.pop("windows")
        recs = [dict(kind="window", **w) for w in windows]
        recs.append(dict(kind="summary", **summary))
        return recs

    @classmethod
    def from_records(cls, recs: list[dict]) -> "RunMetrics":
        windows = [{k: v for k, v in r.items() if k != "kind"} for r in recs if r["kind"] == "window"]
        summ = [r for r in recs if r["kind"] == "summary"][-1]
        body = {k: v for k, v in summ.items() if k != "kind"}
        return cls(windows=windows, **body)


def write_metrics(m: RunMetrics, path) -> None:
    with open(path, "w") as f:
        for r in m.to_records():
            f.write(json.dumps(r, sort_keys=True) + "\n")


def read_metrics(path) -> RunMetrics:
    with open(path) as f:
        recs = [json.loads(line) for line in f if line.strip()]
    return RunMetrics.from_records(recs)


def _fail(metrics: RunMetrics, idx: int, inv: str, detail: str = ""):
    metrics.audit_failures.append({"index": idx, "invariant": inv, "detail": detail})
    raise AuditFailure(idx, inv, detail)


def run(n: int, params: EngineParams, stream: Stream | StreamSpec, audit: str = "off",
        sample_every: int = 50, window: int = 0, matching_log=None,
        capture: Optional[list] = None, fault: Optional[str] = None) -> RunMetrics:
    """Run the engine over ``stream``.

    ``audit``: ``off``; ``sampled`` (full checks every ``sample_every``
    updates); ``full`` (maximality, EDCS validity and the recourse and slack
    bounds after every update, component validators every ``sample_every``).
    ``fault`` is handed to the engine after bootstrap (test hook).
    """
    if audit not in AUDIT_LEVELS:
        raise ValueError(f"audit must be one of {AUDIT_LEVELS}")
    t0 = time.perf_counter()
    holder: dict = {}
    if isinstance(stream, StreamSpec):
        spec = stream
        model, seed = spec.model, spec.seed
        stream = gen_stream(spec, observer=lambda: holder["engine"].matching_edges())
    else:
        model, seed = "given", params.seed
    if stream.n != n:
        raise ValueError(f"stream has n={stream.n}, run asked for n={n}")
    work = WorkCounter()
    eng = Engine(n, params, stream.initial_edges, work)
    holder["engine"] = eng
    eng.fault = fault
    metrics = RunMetrics(n=n, params=params.to_dict(), model=model, seed=seed)
    metrics.med_free_bound = 22 * eng.delta * n
    metrics.damaged_bound = eng.damaged_bound()
    oracle = MatrixOracle(n, stream.initial_edges) if audit == "full" else None
    if oracle is not None:
        oracle.sync_h(eng.edcs.h)
    metrics.boot_work = dict(work)
    boot_work = work.total_work()
    last_window_work, last_window_idx = boot_work, 0
    i = -1
    seen: list = []
    for i, e in enumerate(stream.events):
        if capture is not None:
            seen.append(e)
        eng.handle_update(e)
        if matching_log is not None:
            matching_log.write(" ".join(f"{a}-{b}" for a, b in eng.matching_edges()) + "\n")
        if oracle is not None:
            oracle.apply(e)
            oracle.apply_h(eng.last_h_changes)
            mate = eng.final_mate()
            bad = oracle.uncovered_edge(mate) or oracle.matching_inside(mate)
            if bad:
                _fail(metrics, i, "maximality", f"edge {bad}")
            over, missing, foreign = oracle.edcs_violations(eng.edcs.upper, eng.edcs.lower)
            if over or missing or foreign:
                _fail(metrics, i, "edcs", f"over={over} missing={missing} foreign={foreign}")
            if len(eng.med_free) > metrics.med_free_bound:
                _fail(metrics, i, "medium-slack", f"{len(eng.med_free)}")
        if audit != "off" and (i + 1) % sample_every == 0:
            metrics.audits += 1
            _component_audit(eng, metrics, i, oracle)
        if window and (i + 1) % window == 0:
            w = work.total_work()
            metrics.windows.append({"start": last_window_idx, "end": i + 1,
                                    "work": w - last_window_work})
            last_window_work, last_window_idx = w, i + 1
    if audit != "off":
        metrics.audits += 1
        _component_audit(eng, metrics, i, oracle)
    metrics.updates = i + 1
    metrics.work = dict(work)
    metrics.work_per_update = (work.total_work() - boot_work) / max(1, metrics.updates)
    s = eng.stats
    metrics.max_recourse = s["max_recourse"]
    metrics.max_med_free = s["max_med_free"]
    metrics.max_damaged = s["max_damaged"]
    metrics.phases = s["phases"]
    metrics.augments = s["augments"]
    metrics.max_sink_weight = s.get("max_sink_weight", 0)
    metrics.wall_time = time.perf_counter() - t0
    if capture is not None:
        capture.append(Stream(n, list(stream.initial_edges), seen))
    return metrics


def _component_audit(eng: Engine, metrics: RunMetrics, i: int, oracle: Optional[MatrixOracle]) -> None:
    bad = oracle_verify(eng.g, eng.current_matching())
    if bad:
        _fail(metrics, i, "maximality", f"edge {bad}")
    rep = eng.edcs.validate()
    if not rep.ok:
        _fail(metrics, i, "edcs", f"{rep}")
    problems = eng.audit()
    if problems:
        _fail(metrics, i, "engine", "; ".join(problems[:5]))
    if oracle is not None and not oracle.sync_h(eng.edcs.h):
        _fail(metrics, i, "edcs-mirror", "change log diverged from H")


def baseline_work(stream: Stream | StreamSpec) -> float:
    """Average per-update work of the neighbourhood-rescan baseline.

    An adaptive ``StreamSpec`` is replayed against the baseline's own
    matching, so the adversary targets the baseline rather than the engine.
    """
    if isinstance(stream, StreamSpec):
        holder: dict = {}
        stream = gen_stream(stream, observer=lambda: holder["b"].matching_edges())
        b = holder["b"] = ScanBaseline(stream.n, stream.initial_edges)
    else:
        b = ScanBaseline(stream.n, stream.initial_edges)
    boot = b.work.total_work()
    k = 0
    for e in stream.events:
        b.handle_update(e)
        k += 1
    return (b.work.total_work() - boot) / max(1, k)


def _run_job(job):
    n, params, spec, audit, sample_every = job
    try:
        return run(n, params, spec, audit, sample_every)
    except AuditFailure as exc:
        m = RunMetrics(n=n, params=params.to_dict(), model=spec.model, seed=spec.seed)
        m.audit_failures.append({"index": exc.index, "invariant": exc.invariant, "detail": exc.detail})
        return m
    except Exception as exc:  # surfaced as an audit failure record
        m = RunMetrics(n=n, params=params.to_dict(), model=spec.model, seed=spec.seed)
        m.audit_failures.append({"index": -1, "invariant": type(exc).__name__, "detail": str(exc)})
        return m


def run_many(jobs: Iterable[tuple], workers: int = 1) -> list[RunMetrics]:
    """Run independent jobs ``(n, params, spec, audit, sample_every)``."""
    jobs = list(jobs)
    if workers <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_run_job, jobs))
