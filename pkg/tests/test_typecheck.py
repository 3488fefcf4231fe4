from __future__ import annotations

import pytest

from fixlog import ast, typecheck
from fixlog.errors import OccursCheckFailure, TypeCheckError, TypeMismatch

from _support import (CORPUS_PROGRAMS, NEGATIVE_PROGRAMS, corpus_source,
                      negative_source, parse_program)


def check(source: str) -> ast.SourceProgram:
    return typecheck.check(parse_program(source))


@pytest.mark.parametrize("name", CORPUS_PROGRAMS)
def test_corpus_programs_type_check(name):
    check(corpus_source(name))


@pytest.mark.parametrize("name", NEGATIVE_PROGRAMS)
def test_negative_programs_type_check(name):
    # their defects are validation-level, so the checker must accept them
    check(negative_source(name))


# unification on type expressions ------------------------------------------


def _item():
    return typecheck._Item(typecheck.Checker(parse_program("")))


def test_unify_binds_type_variable():
    item = _item()
    item.unify(ast.TNamed("option", (ast.TVar("A"),)),
               ast.TNamed("option", (ast.T_I32,)))
    assert item.resolve(ast.TVar("A")) == ast.T_I32


def test_unify_base_mismatch():
    item = _item()
    with pytest.raises(TypeMismatch):
        item.unify(ast.T_I32, ast.T_STRING)


def test_unify_occurs_check():
    item = _item()
    with pytest.raises(OccursCheckFailure):
        item.unify(ast.TVar("A"),
                   ast.TNamed("option", (ast.TVar("A"),)))


def test_substitution_idempotent_after_chained_binding():
    item = _item()
    item.unify(ast.TVar("A"), ast.TVar("B"))
    item.unify(ast.TVar("B"), ast.T_STRING)
    once = item.resolve(ast.TVar("A"))
    assert once == ast.T_STRING
    assert item.resolve(once) == once


# whole-program checking -----------------------------------------------------


def test_fact_argument_mismatch():
    src = corpus_source("tree_sum") + '\nnum_tree(node(leaf, "x", leaf)).\n'
    with pytest.raises(TypeCheckError):
        check(src)


def test_variable_used_at_two_types_in_one_clause():
    src = """\
declare fun sum(i32) : i32.
fun sum(N) = N.
declare input num(i32).
declare input name(string).
declare output out(i32, i32).
out(T, S) :- num(T), sum(T) = S, name(S).
"""
    with pytest.raises(TypeCheckError):
        check(src)


def test_premise_order_does_not_affect_checking():
    template = """\
declare input e(i32, i32).
declare input lbl(i32, string).
declare output p(i32, string).
p(X, L) :- %s.
"""
    premises = ["e(X, Y)", "lbl(Y, L)", "Y = X + 1"]
    import itertools
    for perm in itertools.permutations(premises):
        check(template % ", ".join(perm))


def test_polymorphic_type_two_instantiations():
    src = """\
define type 'A box = empty | full('A).
declare input si(i32 box).
declare input ss(string box).
declare output out(i32 box, string box).
out(A, B) :- si(A), ss(B).
"""
    check(src)


def test_constructor_instantiation_is_monomorphic_per_use():
    src = """\
define type 'A box = empty | full('A).
declare input si(i32 box).
si(full("oops")).
"""
    with pytest.raises(TypeCheckError):
        check(src)


def test_relation_types_must_be_monomorphic():
    from fixlog.errors import ResolutionError
    with pytest.raises((ResolutionError, TypeCheckError)):
        check("declare input q('A option).")
    # the checker itself also enforces it on a hand-built program
    decl = ast.RelDecl("q", (ast.TNamed("option", (ast.TVar("A"),)),),
                       "input")
    prog = ast.SourceProgram(rel_decls=(decl,))
    with pytest.raises(TypeCheckError):
        typecheck.check(prog)


def test_function_body_must_match_declared_return():
    src = """\
declare fun f(i32) : string.
fun f(N) = N + 1.
"""
    with pytest.raises(TypeCheckError):
        check(src)


def test_signature_type_variable_is_rigid_in_body():
    # the body may not specialize a polymorphic parameter
    src = """\
declare fun first('A, 'A) : 'A.
fun first(X, Y) = X + 1.
"""
    with pytest.raises(TypeCheckError):
        check(src)


def test_polymorphic_function_instantiated_fresh_per_use():
    src = """\
declare fun pick('A, 'A) : 'A.
fun pick(X, Y) = X.
declare input a(i32).
declare input b(string).
declare output out(i32, string).
out(N, S) :- a(N), b(S), pick(N, N) = N, pick(S, S) = S.
"""
    check(src)


def test_formula_type_distinct_from_bool():
    # `true` where a formula is wanted is fine (bool_exp has its own true)
    # but an i32 comparison result is not a formula
    src = """\
declare input f(bool_exp).
declare output out(bool_exp).
out(and(X, X)) :- f(X).
"""
    check(src)
    bad = """\
declare input n(i32).
declare output out(bool_exp).
out(and(X, X)) :- n(X).
"""
    with pytest.raises(TypeCheckError):
        check(bad)


def test_is_sat_takes_formula_returns_bool():
    src = """\
declare input f(bool_exp).
declare output out(bool_exp).
out(F) :- f(F), is_sat(F) = true.
"""
    check(src)
    bad = """\
declare input n(i32).
declare output out(i32).
out(N) :- n(N), is_sat(N) = true.
"""
    with pytest.raises(TypeCheckError):
        check(bad)
