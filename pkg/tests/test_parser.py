from __future__ import annotations

import pytest

from fixlog import ast, parser
from fixlog.errors import ParseError, ResolutionError

from _support import (CORPUS_PROGRAMS, NEGATIVE_PROGRAMS, corpus_source,
                      negative_source, parse_program, strip_locs)


def test_tree_sum_shape():
    p = parser.parse(corpus_source("tree_sum"))
    assert len(p.type_defs) == 1
    assert len(p.fun_defs) == 1
    assert len(p.rel_decls) == 2
    kinds = sorted(d.kind for d in p.rel_decls)
    assert kinds == ["input", "output"]
    facts = [c for c in p.clauses if c.is_fact]
    rules = [c for c in p.clauses if not c.is_fact]
    assert len(facts) == 2
    assert len(rules) == 1


def test_empty_source():
    p = parser.parse("")
    assert p.type_defs == ()
    assert p.fun_defs == ()
    assert p.rel_decls == ()
    assert p.clauses == ()


def test_unclosed_atom_is_syntax_error():
    with pytest.raises(ParseError):
        parser.parse("declare input q(i32).\ndeclare output p(i32).\n"
                     "p(X) :- q(X.")


def test_unknown_identifier_is_resolution_error():
    with pytest.raises(ResolutionError):
        parser.parse("declare output p(i32).\np(X) :- mystery(X).")


def test_unknown_constructor_is_resolution_error():
    with pytest.raises(ResolutionError):
        parser.parse("declare output p(i32).\np(nosuch).")


@pytest.mark.parametrize("name", CORPUS_PROGRAMS)
def test_pretty_print_round_trip(name):
    first = parse_program(corpus_source(name))
    again = parse_program(ast.program_to_str(first))
    assert strip_locs(again) == strip_locs(first)


@pytest.mark.parametrize("name", NEGATIVE_PROGRAMS)
def test_pretty_print_round_trip_negative(name):
    first = parse_program(negative_source(name))
    again = parse_program(ast.program_to_str(first))
    assert strip_locs(again) == strip_locs(first)


LET_IF_SRC = """\
declare fun f(i32) : i32.
fun f(N) =
    let M = N + 1 in
    if M < 10 then M else N.
"""


def _expr_vars(e, acc):
    if isinstance(e, ast.TermExpr):
        _term_vars(e.term, acc)
    elif isinstance(e, ast.Match):
        _expr_vars(e.scrutinee, acc)
        for pat, body in e.branches:
            _term_vars(pat, acc)
            _expr_vars(body, acc)
    elif isinstance(e, ast.Let):
        _term_vars(e.pattern, acc)
        _expr_vars(e.bound, acc)
        _expr_vars(e.body, acc)
    elif isinstance(e, ast.If):
        _term_vars(e.cond, acc)
        _expr_vars(e.then, acc)
        _expr_vars(e.orelse, acc)
    else:
        _term_vars(e, acc)


def _term_vars(t, acc):
    if isinstance(t, ast.TermExpr):
        t = t.term
    if isinstance(t, ast.Var):
        acc.add(t.name)
    else:
        for child in getattr(t, "args", ()) or ():
            _term_vars(child, acc)
        for child in getattr(t, "items", ()) or ():
            _term_vars(child, acc)


def test_desugar_preserves_variables():
    p = parser.parse(LET_IF_SRC)
    before: set[str] = set()
    _expr_vars(p.fun_defs[0].body, before)
    after: set[str] = set()
    _expr_vars(ast.desugar_program(p).fun_defs[0].body, after)
    assert before == after


def test_desugared_body_is_match_only():
    p = ast.desugar_program(parser.parse(LET_IF_SRC))

    def walk(e):
        assert not isinstance(e, (ast.Let, ast.If))
        if isinstance(e, ast.Match):
            for _, body in e.branches:
                walk(body)

    walk(p.fun_defs[0].body)


def test_line_comments():
    p = parser.parse("// a comment\ndeclare input q(i32). // trailing\n")
    assert len(p.rel_decls) == 1


def test_int_literal_overflow_is_parse_error():
    with pytest.raises(ParseError):
        parser.parse("declare input q(i32).\nq(2147483648).")


def test_int_literal_extremes_parse():
    p = parser.parse("declare input q(i32).\nq(2147483647).\nq(-2147483648).")
    assert len(p.clauses) == 2


def test_string_escapes():
    p = parser.parse('declare input q(string).\nq("a\\"b\\\\c").')
    atom = p.clauses[0].head
    assert atom.args[0].value == 'a"b\\c'


def test_negated_premise_syntax():
    p = parser.parse("declare input q(i32).\ndeclare output r(i32).\n"
                     "declare output s(i32).\nr(X) :- q(X).\n"
                     "s(X) :- q(X), !r(X).")
    rule = p.clauses[-1]
    assert any(isinstance(prem, ast.NegAtom) for prem in rule.body)
