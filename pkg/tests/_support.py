"""Shared helpers for the test suite: corpus access, reference oracles,
program permutation, and symbolic-execution fuel sweeps."""
from __future__ import annotations

import dataclasses
import random
from pathlib import Path

from fixlog import ast, engine, factio, funceval, parser, pipeline, smt
from fixlog.corpus import data_path, symoracle
from fixlog.terms import TermStore

REPO_ROOT = Path(__file__).resolve().parent.parent
REF_SOLVER = REPO_ROOT / "scripts" / "ref_smt.py"

CORPUS_PROGRAMS = ("tree_sum", "tc", "symexec")
SYMEXEC_DATASETS = ("symexec_fork3", "symexec_straightline",
                    "symexec_infeasible", "symexec_guarded")
NEGATIVE_PROGRAMS = ("unbound_head", "unbound_fun_arg", "unstratified")


def corpus_source(name: str) -> str:
    return data_path(f"{name}.fxl").read_text()


def negative_source(name: str) -> str:
    return (data_path("negative") / f"{name}.fxl").read_text()


def dump(result: pipeline.PipelineResult, rel: str) -> list[str]:
    return engine.dump_lines(result.prep.store, result.db, rel)


def output_relations(program: ast.SourceProgram) -> list[str]:
    return sorted(d.name for d in program.rel_decls if d.kind == "output")


def all_dumps(result: pipeline.PipelineResult) -> dict[str, list[str]]:
    return {rel: dump(result, rel)
            for rel in output_relations(result.program)}


def floyd_warshall(n: int, edges: list[tuple[int, int]]) -> set[tuple[int, int]]:
    """Transitive closure by matrix closure over bitset rows; paths of
    length >= 1, no implicit self-loops."""
    row = [0] * n
    for u, v in edges:
        row[u] |= 1 << v
    for k in range(n):
        bit = 1 << k
        rk = row[k]
        for i in range(n):
            if row[i] & bit:
                row[i] |= rk
    return {(i, j) for i in range(n) for j in range(n)
            if row[i] & (1 << j)}


def permute_program(program: ast.SourceProgram,
                    rng: random.Random) -> ast.SourceProgram:
    """Shuffle clause order and the premise order within every body."""
    clauses = []
    for c in program.clauses:
        body = list(c.body)
        rng.shuffle(body)
        clauses.append(dataclasses.replace(c, body=tuple(body)))
    rng.shuffle(clauses)
    return dataclasses.replace(program, clauses=tuple(clauses))


def naive_dumps(source: str, fact_dirs: tuple[str, ...] = ()
                ) -> dict[str, list[str]]:
    """Fixpoint of the sequential naive oracle, as canonical dumps."""
    res = pipeline.build(source, fact_dirs=fact_dirs)
    db = engine.naive_evaluate(res.prep, res.db)
    return {rel: engine.dump_lines(res.prep.store, db, rel)
            for rel in output_relations(res.program)}


class SymexecHarness:
    """One pipeline build per dataset, reused across fuel levels so the
    formula cache stays valid (verdicts are keyed by term id, and term
    ids only make sense within a single store)."""

    def __init__(self, dataset: str):
        self.dataset_dir = data_path(dataset)
        self.context = smt.SmtContext()
        self.result = pipeline.build(corpus_source("symexec"),
                                     fact_dirs=(str(self.dataset_dir),),
                                     smt_context=self.context)
        self.base_facts = factio.ingest_facts(
            self.result.program, [str(self.dataset_dir)])

    def run(self, fuel: int | None = None,
            workers: int = 1) -> tuple[list[str], list[str]]:
        store = self.result.prep.store
        db = engine.FactDatabase()
        for fact in self.base_facts:
            if fuel is not None and fact.head.rel == "init_fuel":
                continue
            atom = tuple(funceval.intern_template(store, a)
                         for a in fact.head.args)
            db.add(fact.head.rel, atom)
        if fuel is not None:
            db.add("init_fuel", (store.mk_i32(fuel),))
        engine.evaluate(self.result.prep, db, workers=workers)
        return (engine.dump_lines(store, db, "reach"),
                engine.dump_lines(store, db, "failed_assert"))


class OracleHarness:
    """Reference interpreter over the same dataset, with its own store
    and verdict cache, independent of the engine's."""

    def __init__(self, dataset: str):
        self.program = symoracle.load_program(data_path(dataset))
        self.store = TermStore()
        self.context = smt.SmtContext()
        self.is_sat = symoracle.make_is_sat(self.store, self.context)

    def run(self, fuel: int | None = None) -> tuple[list[str], list[str]]:
        out = symoracle.run(self.program, self.is_sat, fuel=fuel)
        return (symoracle.dump_lines(out.reach),
                symoracle.dump_lines(out.failed))


CHAIN_SRC = """\
define type u = b(i32) | a(u, u, u, u).

declare fun f(i32) : u.
fun f(N) = b(N + 1).
"""


def chain_instance(n: int):
    """The linear-unification family: a(f(Xn),...,f(X0),b(0)) against
    a(b(X{n+1}),...,b(X0)); the unique solution is Xi = i."""
    res = pipeline.build(CHAIN_SRC)
    store = res.prep.store
    left = store.mk_ctor("a", tuple(
        store.mk_call("f", (store.mk_var(f"X{i}"),))
        for i in range(n, -1, -1)) + (
        store.mk_ctor("b", (store.mk_i32(0),)),))
    right = store.mk_ctor("a", tuple(
        store.mk_ctor("b", (store.mk_var(f"X{i}"),))
        for i in range(n + 1, -1, -1)))
    return store, left, right, res.prep.evaluator.reducer()


def build_conjunction(store: TermStore):
    """x = 42 and y = x + 1, as a ground formula term."""
    x = store.mk_ctor("bv32_sym", (store.mk_str("x"),))
    y = store.mk_ctor("bv32_sym", (store.mk_str("y"),))
    c42 = store.mk_ctor("bv32_const", (store.mk_i32(42),))
    c1 = store.mk_ctor("bv32_const", (store.mk_i32(1),))
    return store.mk_ctor("and", (
        store.mk_ctor("bv32_eq", (x, c42)),
        store.mk_ctor("bv32_eq", (y, store.mk_ctor("bv32_add", (x, c1)))),
    ))


def parse_program(source: str) -> ast.SourceProgram:
    return ast.desugar_program(parser.parse(source))


def strip_locs(obj):
    """Rebuild an AST value with every loc field cleared, so trees from
    different source texts compare structurally."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        changes = {}
        for f in dataclasses.fields(obj):
            val = getattr(obj, f.name)
            changes[f.name] = None if f.name == "loc" else strip_locs(val)
        return dataclasses.replace(obj, **changes)
    if isinstance(obj, tuple):
        return tuple(strip_locs(v) for v in obj)
    return obj
