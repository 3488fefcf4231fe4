from __future__ import annotations

import itertools
import random

import pytest

from fixlog import ast, typecheck, validate
from fixlog.errors import (NoValidOrder, UnboundFunctionArgument,
                           UnboundHeadVariable, UnstratifiableNegation,
                           ValidationError)

from _support import (CORPUS_PROGRAMS, corpus_source, naive_dumps,
                      negative_source, parse_program, permute_program)


def checked(source: str) -> ast.SourceProgram:
    return typecheck.check(parse_program(source))


NEGATIVE_CASES = [
    ("unbound_head", UnboundHeadVariable),
    ("unbound_fun_arg", UnboundFunctionArgument),
    ("unstratified", UnstratifiableNegation),
]


@pytest.mark.parametrize("name,expected", NEGATIVE_CASES)
def test_negative_program_rejected_with_category(name, expected):
    program = checked(negative_source(name))
    with pytest.raises(expected):
        validate.validate(program)


@pytest.mark.parametrize("name", CORPUS_PROGRAMS)
def test_corpus_programs_validate(name):
    sp = validate.validate(checked(corpus_source(name)))
    assert sp.rules_by_stratum or not sp.program.clauses


def test_nonground_fact_rejected():
    src = "declare input q(i32).\nq(X)."
    with pytest.raises(UnboundHeadVariable):
        validate.validate(checked(src))


def test_fact_with_function_call_rejected():
    src = """\
declare fun inc(i32) : i32.
fun inc(N) = N + 1.
declare input q(i32).
q(inc(1)).
"""
    with pytest.raises(ValidationError):
        validate.validate(checked(src))


def test_unsafe_negation_rejected():
    src = """\
declare input e(i32).
declare output r(i32).
declare output s(i32).
r(X) :- e(X).
s(1) :- !r(X).
"""
    with pytest.raises(ValidationError):
        validate.validate(checked(src))


def test_cyclic_function_dependency_has_no_valid_order():
    src = """\
declare fun f(i32) : i32.
fun f(N) = N + 1.
declare fun g(i32) : i32.
fun g(N) = N - 1.
declare input e(i32).
declare output p(i32).
p(Z) :- e(Z), f(Y) = X, g(X) = Y.
"""
    with pytest.raises(NoValidOrder):
        validate.rewrite(validate.validate(checked(src)))


def test_stratification_layers_negation():
    src = """\
declare input e(i32).
declare output r(i32).
declare output s(i32).
r(X) :- e(X).
s(X) :- e(X), !r(X).
"""
    sp = validate.validate(checked(src))
    strata = {}
    for i, rules in enumerate(sp.rules_by_stratum):
        for c in rules:
            strata[c.head.rel] = i
    assert strata["r"] < strata["s"]


def test_mutual_recursion_shares_a_stratum():
    src = """\
declare input e(i32, i32).
declare output p(i32).
declare output q(i32).
p(X) :- e(X, Y), q(Y).
q(X) :- e(X, Y), p(Y).
q(X) :- e(X, X).
"""
    sp = validate.validate(checked(src))
    strata = {}
    for i, rules in enumerate(sp.rules_by_stratum):
        for c in rules:
            strata.setdefault(c.head.rel, i)
    assert strata["p"] == strata["q"]


# premise reordering ---------------------------------------------------------


@pytest.mark.parametrize("name", CORPUS_PROGRAMS)
def test_reordering_finds_evaluable_order_for_corpus_rules(name):
    sp = validate.validate(checked(corpus_source(name)))
    rewritten = validate.rewrite(sp)
    for rules in rewritten.rules_by_stratum:
        for rule in rules:
            bound: set[str] = set()
            for p in rule.clause.body:
                assert validate._premise_ready(p, bound), \
                    f"premise out of order in rule for {rule.clause.head.rel}"
                bound |= validate._premise_binds(p)


def test_reordering_moves_binding_premise_first():
    src = """\
declare fun inc(i32) : i32.
fun inc(N) = N + 1.
declare input e(i32).
declare output p(i32).
p(Y) :- inc(X) = Y, e(X).
"""
    rewritten = validate.rewrite(validate.validate(checked(src)))
    rule = rewritten.rules_by_stratum[0][0]
    first = rule.clause.body[0]
    assert isinstance(first, ast.Atom) and first.rel == "e"


def test_reordering_preserves_semantics_under_permutation():
    src = corpus_source("tc")
    fact_dir = str(__import__("fixlog.corpus", fromlist=["data_path"])
                   .data_path("tc_small"))
    baseline = naive_dumps(src, fact_dirs=(fact_dir,))
    rng = random.Random(20)
    program = parse_program(src)
    from fixlog import engine, pipeline
    for _ in range(5):
        permuted = permute_program(program, rng)
        res = pipeline.build_program(permuted, fact_dirs=(fact_dir,))
        engine.evaluate(res.prep, res.db)
        assert engine.dump_lines(res.prep.store, res.db, "tc") == \
            baseline["tc"]


def test_body_permutations_all_find_valid_order():
    # every permutation of a mixed body must reorder to something runnable
    premises = ["e(X, Y)", "Z = Y + 1", "lbl(Z, L)"]
    template = """\
declare input e(i32, i32).
declare input lbl(i32, string).
declare output p(i32, string).
p(X, L) :- %s.
"""
    for perm in itertools.permutations(premises):
        src = template % ", ".join(perm)
        rewritten = validate.rewrite(validate.validate(checked(src)))
        rule = rewritten.rules_by_stratum[0][0]
        bound: set[str] = set()
        for p in rule.clause.body:
            assert validate._premise_ready(p, bound)
            bound |= validate._premise_binds(p)
