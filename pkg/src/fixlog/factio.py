"""Tab-separated fact files.

One file per EDB relation, named `<relation>.tsv`: each line is one fact,
one canonical-text term per column, UTF-8, newline-terminated.  Lines are
tokenized with the program tokenizer and restricted to the ground
vocabulary (literals, tuples, declared constructors).  Ingested facts are
type checked against the relation signature exactly like in-source facts,
so the two channels are interchangeable.
"""

from __future__ import annotations

import dataclasses
import os

from . import ast, parser, typecheck
from .errors import (ArityMismatch, FactFileError, Loc, ParseError,
                     TermParseError, TypeCheckError)
from .prelude import PRELUDE_ADTS


def ctor_arities(program: ast.SourceProgram) -> dict[str, int]:
    out: dict[str, int] = {}
    for adt in tuple(PRELUDE_ADTS) + tuple(program.type_defs):
        for name, args in adt.ctors:
            out[name] = len(args)
    return out


def _resolve(t, line: int, ctors: dict[str, int]) -> ast.TermAst:
    if isinstance(t, (ast.IntLit, ast.StrLit, ast.BoolLit)):
        return t
    if isinstance(t, ast.Var):
        raise TermParseError(
            f"variable {t.name} not allowed in a fact file", line)
    if isinstance(t, ast.FnCall):
        raise TermParseError(
            f"function call {t.name} not allowed in a fact file; facts "
            "must be fully evaluated terms", line)
    if isinstance(t, ast.TupleTerm):
        return ast.TupleTerm(tuple(_resolve(i, line, ctors)
                                   for i in t.items), t.loc)
    if isinstance(t, parser.RawId):
        if t.name in ("true", "false"):
            return ast.BoolLit(t.name == "true", t.loc)
        if t.name not in ctors:
            raise TermParseError(f"unknown constructor {t.name}", line)
        if ctors[t.name] != 0:
            raise TermParseError(
                f"constructor {t.name} expects {ctors[t.name]} "
                "argument(s), got 0", line)
        return ast.CtorApp(t.name, (), t.loc)
    if isinstance(t, parser.RawApp):
        if t.name not in ctors:
            raise TermParseError(f"unknown constructor {t.name}", line)
        if ctors[t.name] != len(t.args):
            raise TermParseError(
                f"constructor {t.name} expects {ctors[t.name]} "
                f"argument(s), got {len(t.args)}", line)
        return ast.CtorApp(t.name, tuple(_resolve(a, line, ctors)
                                         for a in t.args), t.loc)
    raise TermParseError(f"unsupported term {t!r}", line)


def parse_fact_term(text: str, line: int,
                    ctors: dict[str, int]) -> ast.TermAst:
    """One canonical-text column as a ground term."""
    try:
        toks = [dataclasses.replace(t, loc=Loc(line, t.loc.col))
                for t in parser.tokenize(text)]
        p = parser._Parser(toks)
        raw = p.parse_term()
    except ParseError as e:
        raise TermParseError(e.message, line) from e
    trailing = p.peek()
    if trailing.kind != "eof":
        raise TermParseError(
            f"unexpected trailing input {trailing.text!r}", line)
    return _resolve(raw, line, ctors)


def read_fact_file(path: str, decl: ast.RelDecl,
                   ctors: dict[str, int]) -> list[ast.Clause]:
    """Parse one .tsv file into fact clauses (not yet type checked)."""
    arity = len(decl.arg_types)
    out: list[ast.Clause] = []
    with open(path, encoding="utf-8") as fh:
        for i, raw_line in enumerate(fh, 1):
            line = raw_line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != arity:
                raise ArityMismatch(
                    f"{path} line {i}: relation {decl.name} has arity "
                    f"{arity}, line has {len(cols)} column(s)")
            try:
                args = tuple(parse_fact_term(c, i, ctors) for c in cols)
            except TermParseError as e:
                raise FactFileError(f"{path}: {e.message}") from e
            loc = Loc(i, 1)
            out.append(ast.Clause(head=ast.Atom(decl.name, args, loc),
                                  body=(), loc=loc))
    return out


def _typecheck_facts(program: ast.SourceProgram, path: str,
                     facts: list[ast.Clause]) -> tuple[ast.Clause, ...]:
    # reuse the program type checker on a synthetic program holding only
    # the declarations and these facts; this also elaborates true/false
    # into bool_exp constructors where the relation signature requires it
    synthetic = ast.SourceProgram(
        type_defs=program.type_defs,
        aliases=program.aliases,
        rel_decls=program.rel_decls,
        clauses=tuple(facts))
    try:
        checked = typecheck.check(synthetic)
    except TypeCheckError as e:
        line = e.loc.line if e.loc is not None else 0
        raise FactFileError(f"{path}: line {line}: {e.message}") from e
    return checked.clauses


def ingest_facts(program: ast.SourceProgram,
                 fact_dirs: list[str]) -> tuple[ast.Clause, ...]:
    """All facts from `<relation>.tsv` files in the given directories,
    type checked and ready to seed the database."""
    ctors = ctor_arities(program)
    out: list[ast.Clause] = []
    for d in fact_dirs:
        if not os.path.isdir(d):
            raise FactFileError(f"fact directory {d} does not exist")
        for fn in sorted(os.listdir(d)):
            if not fn.endswith(".tsv"):
                continue
            rel = fn[: -len(".tsv")]
            path = os.path.join(d, fn)
            decl = program.rel_decl(rel)
            if decl is None:
                raise FactFileError(
                    f"{path}: no declared relation named {rel}")
            if decl.kind != "input":
                raise FactFileError(
                    f"{path}: relation {rel} is an output relation; fact "
                    "files may only feed input relations")
            facts = read_fact_file(path, decl, ctors)
            if facts:
                out.extend(_typecheck_facts(program, path, facts))
    return tuple(out)
