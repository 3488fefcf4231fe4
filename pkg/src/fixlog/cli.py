"""Command line driver.

`fixlog run PROGRAM` executes the five-stage pipeline and prints canonical
dumps of the requested output relations to stdout.  Timing lines and
diagnostics go to stderr; every pipeline stage maps to a distinct exit
code so scripted callers can tell failures apart.  `fixlog gen-graph`
writes a random edge relation for the transitive closure benchmark.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field

from . import engine, funceval, pipeline, smt
from .errors import FixlogError, STAGE_EXIT_CODES


@dataclass
class RunConfig:
    program_path: str
    fact_dirs: list[str] = field(default_factory=list)
    workers: int = 0  # 0: use available parallelism
    smt_backend: str = "builtin"
    dump_relations: list[str] = field(default_factory=lambda: ["all"])
    step_budget: int = funceval.DEFAULT_STEP_BUDGET
    timing_report: bool = False


def _build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fixlog",
        description="Datalog interpreter with first-class logical formulae")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate a program and dump relations")
    run.add_argument("program", help="path to the program source")
    run.add_argument("--workers", type=int, default=0, metavar="N",
                     help="worker processes (default: available cores)")
    run.add_argument("--facts", action="append", default=[], metavar="DIR",
                     help="directory of <relation>.tsv fact files "
                          "(repeatable)")
    run.add_argument("--dump", action="append", default=[], metavar="REL",
                     help="output relation to dump, or 'all' (repeatable; "
                          "default all)")
    run.add_argument("--smt", default="builtin", metavar="BACKEND",
                     help="builtin, external, or external:PATH (external "
                          f"reads ${smt.SOLVER_ENV_VAR} when no path is "
                          "given)")
    run.add_argument("--step-budget", type=int,
                     default=funceval.DEFAULT_STEP_BUDGET, metavar="N",
                     help="function evaluation step budget")
    run.add_argument("--time", action="store_true",
                     help="print per-stage timing to stderr")

    gen = sub.add_parser("gen-graph",
                         help="write a random e.tsv edge relation")
    gen.add_argument("--n", type=int, required=True, metavar="N",
                     help="vertex count")
    gen.add_argument("--p", type=float, required=True, metavar="P",
                     help="edge probability")
    gen.add_argument("--seed", type=int, default=0, metavar="N")
    gen.add_argument("--out", default=".", metavar="DIR",
                     help="directory for e.tsv (default: cwd)")
    return ap


def _cmd_run(args) -> int:
    cfg = RunConfig(program_path=args.program, fact_dirs=args.facts,
                    workers=args.workers, smt_backend=args.smt,
                    dump_relations=args.dump or ["all"],
                    step_budget=args.step_budget, timing_report=args.time)
    workers = cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)
    try:
        source = open(cfg.program_path, encoding="utf-8").read()
    except OSError as e:
        print(f"error: cannot read {cfg.program_path}: {e}",
              file=sys.stderr)
        return STAGE_EXIT_CODES["internal"]
    try:
        backend = smt.make_backend(cfg.smt_backend)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FixlogError as e:
        return _diagnose(e)
    context = smt.SmtContext(backend=backend)
    try:
        result = pipeline.build(source, fact_dirs=tuple(cfg.fact_dirs),
                                smt_context=context,
                                step_budget=cfg.step_budget)
    except FixlogError as e:
        return _diagnose(e)
    rels = cfg.dump_relations
    if "all" in rels:
        rels = sorted(result.rewritten.output_rels)
    else:
        known = (result.rewritten.output_rels
                 | result.rewritten.input_rels)
        missing = [r for r in rels if r not in known]
        if missing:
            print(f"error: no relation named {missing[0]}",
                  file=sys.stderr)
            return 2
    try:
        t0 = time.perf_counter()
        engine.evaluate(result.prep, result.db, workers=workers)
        result.timings.append(("evaluate", time.perf_counter() - t0))
        result.fact_count = result.db.count()
    except FixlogError as e:
        return _diagnose(e)
    if cfg.timing_report:
        for stage, seconds in result.timings:
            print(f"stage={stage} ms={int(seconds * 1000)}",
                  file=sys.stderr)
        print(f"facts={result.fact_count}", file=sys.stderr)
    store = result.prep.store
    out = sys.stdout
    for rel in rels:
        for line in engine.dump_lines(store, result.db, rel):
            out.write(line + "\n")
    return 0


def _diagnose(e: FixlogError) -> int:
    loc = f"{e.loc}: " if getattr(e, "loc", None) is not None else ""
    print(f"error: {e.stage}: {loc}{e.message}", file=sys.stderr)
    return STAGE_EXIT_CODES.get(e.stage, 1)


def _cmd_gen_graph(args) -> int:
    from .corpus import generate
    path = generate.write_graph(args.out, args.n, args.p, args.seed)
    print(f"wrote {path}", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_arg_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_gen_graph(args)


if __name__ == "__main__":
    sys.exit(main())
