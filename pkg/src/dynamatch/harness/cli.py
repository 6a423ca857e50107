"""Command line entry point: ``dynamatch run | gen | verify``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from ..core import DynGraph, Matching, apply_update
from ..engine import EngineParams
from .oracle import oracle_verify
from .runner import AUDIT_LEVELS, AuditFailure, run, write_metrics
from .streams import MODELS, Stream, StreamSpec, gen_stream, read_stream, write_stream


def _parse_spec(text: str, n: int, length: int, seed: int) -> StreamSpec:
    # "<model>[:key=value,...]", e.g. "random:p_insert=0.6,hub_fraction=0.05"
    model, _, rest = text.partition(":")
    kw = {}
    for item in filter(None, rest.split(",")):
        k, _, v = item.partition("=")
        kw[k.strip()] = float(v)
    return StreamSpec(n=n, length=length, model=model, seed=seed, **kw)


def _cmd_run(a) -> int:
    params = EngineParams(B=a.B, eps=a.eps, backend=a.backend, seed=a.seed)
    if os.path.exists(a.stream):
        stream = read_stream(a.stream)
        n = a.n if a.n is not None else stream.n
    else:
        if a.n is None:
            print("--n is required when --stream is a model spec", file=sys.stderr)
            return 2
        n = a.n
        stream = _parse_spec(a.stream, n, a.len, a.seed)
    log = open(a.matching_log, "w") if a.matching_log else None
    try:
        m = run(n, params, stream, audit=a.audit, sample_every=a.sample_every,
                window=a.window, matching_log=log)
    except AuditFailure as exc:
        print(f"AUDIT FAILURE at update {exc.index}: {exc.invariant} {exc.detail}", file=sys.stderr)
        return 1
    finally:
        if log:
            log.close()
    if a.out:
        write_metrics(m, a.out)
    print(json.dumps({"updates": m.updates, "work_per_update": round(m.work_per_update, 2),
                      "max_recourse": m.max_recourse, "phases": m.phases,
                      "wall_time": round(m.wall_time, 3)}))
    return 0


def _cmd_gen(a) -> int:
    spec = StreamSpec(n=a.n, length=a.len, model=a.model, seed=a.seed, p_insert=a.p_insert,
                      density=a.density, hub_fraction=a.hub_fraction)
    if a.model == "adaptive":
        # the adversary needs a live engine to observe
        from ..engine import Engine
        holder = {}
        st = gen_stream(spec, observer=lambda: holder["e"].matching_edges())
        holder["e"] = eng = Engine(a.n, EngineParams(B=a.B, eps=a.eps, seed=a.seed), st.initial_edges)
        events = []
        for e in st.events:
            eng.handle_update(e)
            events.append(e)
        stream = Stream(a.n, st.initial_edges, events)
    else:
        stream = gen_stream(spec)
    write_stream(stream, a.out)
    print(f"wrote {len(stream.events)} updates to {a.out}")
    return 0


def _cmd_verify(a) -> int:
    stream = read_stream(a.stream)
    g = DynGraph(stream.n, stream.initial_edges)
    with open(a.matching_log) as f:
        lines = f.read().splitlines()
    if len(lines) != len(stream.events):
        print(f"log has {len(lines)} lines for {len(stream.events)} updates", file=sys.stderr)
        return 1
    for i, (e, line) in enumerate(zip(stream.events, lines)):
        apply_update(g, e)
        m = Matching(stream.n)
        for tok in line.split():
            u, v = tok.split("-")
            m.match(int(u), int(v))
        bad = oracle_verify(g, m)
        if bad:
            print(f"update {i}: edge {bad} violates maximality or validity")
            return 1
    print(f"ok: {len(lines)} updates verified")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynamatch", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run the engine over a stream")
    r.add_argument("--stream", required=True, help="stream file or model spec such as 'random:hub_fraction=0.05'")
    r.add_argument("--n", type=int)
    r.add_argument("--len", type=int, default=10000, help="length for generated streams")
    r.add_argument("--B", type=float, required=True)
    r.add_argument("--eps", type=float, required=True)
    r.add_argument("--backend", choices=["det", "rand"], default="det")
    r.add_argument("--audit", choices=AUDIT_LEVELS, default="off")
    r.add_argument("--sample-every", type=int, default=50)
    r.add_argument("--window", type=int, default=0, help="metrics window length (0 = summary only)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", help="metrics JSON-lines output")
    r.add_argument("--matching-log", help="write the matching after each update")
    r.set_defaults(func=_cmd_run)

    gn = sub.add_parser("gen", help="generate an update stream")
    gn.add_argument("--model", choices=[m for m in MODELS if m != "file"], required=True)
    gn.add_argument("--n", type=int, required=True)
    gn.add_argument("--len", type=int, required=True)
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--p-insert", type=float, default=0.5)
    gn.add_argument("--density", type=float, default=0.1)
    gn.add_argument("--hub-fraction", type=float, default=0.0)
    gn.add_argument("--B", type=float, default=16, help="engine B used by the adaptive adversary")
    gn.add_argument("--eps", type=float, default=0.002, help="engine eps used by the adaptive adversary")
    gn.add_argument("--out", required=True)
    gn.set_defaults(func=_cmd_gen)

    v = sub.add_parser("verify", help="check a matching log against a stream")
    v.add_argument("--stream", required=True)
    v.add_argument("--matching-log", required=True)
    v.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
