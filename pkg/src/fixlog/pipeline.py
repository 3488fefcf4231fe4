"""The staged program pipeline.

Five stages run in a fixed order -- parsing, type checking, validation,
rewriting, evaluation -- with external fact ingestion between rewriting
and evaluation.  Every stage is timed, and every error carries its stage
so the command line driver can map it to a distinct exit code.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import ast, engine, factio, funceval, parser, smt, terms, typecheck
from . import validate as validate_mod


@dataclass
class PipelineResult:
    program: ast.SourceProgram
    rewritten: validate_mod.RewrittenProgram
    prep: engine.PreparedProgram
    db: engine.FactDatabase
    timings: list[tuple[str, float]] = field(default_factory=list)
    fact_count: int = 0


def build(source: str, fact_dirs: tuple[str, ...] = (),
          smt_context: smt.SmtContext | None = None,
          step_budget: int = funceval.DEFAULT_STEP_BUDGET
          ) -> PipelineResult:
    """Run every stage up to but not including evaluation."""
    t0 = time.perf_counter()
    parsed = ast.desugar_program(parser.parse(source))
    parse_time = time.perf_counter() - t0
    result = build_program(parsed, fact_dirs, smt_context, step_budget)
    result.timings.insert(0, ("parse", parse_time))
    return result


def build_program(parsed: ast.SourceProgram,
                  fact_dirs: tuple[str, ...] = (),
                  smt_context: smt.SmtContext | None = None,
                  step_budget: int = funceval.DEFAULT_STEP_BUDGET
                  ) -> PipelineResult:
    """The stages after parsing, from a desugared source program."""
    timings: list[tuple[str, float]] = []

    def staged(name, fn):
        t0 = time.perf_counter()
        out = fn()
        timings.append((name, time.perf_counter() - t0))
        return out

    program = staged("typecheck", lambda: typecheck.check(parsed))
    stratified = staged("validate", lambda: validate_mod.validate(program))
    rewritten = staged("rewrite", lambda: validate_mod.rewrite(stratified))

    store = terms.TermStore()
    table = funceval.FunctionTable.build(program, store)
    context = smt_context or smt.SmtContext()
    evaluator = funceval.Evaluator(
        store, table, step_budget=step_budget,
        is_sat_fn=lambda tid: context.is_sat(store, tid))
    prep = engine.prepare(rewritten, store, evaluator)

    def ingest():
        db = engine.FactDatabase()
        prep.seed_facts(db)
        for fact in factio.ingest_facts(program, list(fact_dirs)):
            atom = tuple(funceval.intern_template(store, a)
                         for a in fact.head.args)
            db.add(fact.head.rel, atom)
        return db

    db = staged("facts", ingest)
    return PipelineResult(program=program, rewritten=rewritten, prep=prep,
                          db=db, timings=timings)


def run(source: str, fact_dirs: tuple[str, ...] = (), workers: int = 1,
        smt_context: smt.SmtContext | None = None,
        step_budget: int = funceval.DEFAULT_STEP_BUDGET) -> PipelineResult:
    """Full pipeline: build, then evaluate to the least fixpoint."""
    result = build(source, fact_dirs, smt_context, step_budget)
    t0 = time.perf_counter()
    engine.evaluate(result.prep, result.db, workers=workers)
    result.timings.append(("evaluate", time.perf_counter() - t0))
    result.fact_count = result.db.count()
    return result
