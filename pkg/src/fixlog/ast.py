"""Resolved abstract syntax.

The parser produces these nodes with every identifier already classified
(variable, constructor, function, relation).  Types live here too because
declarations embed them; the checker consumes and then discards them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import Loc

# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class TBase:
    name: str  # i32 | string | bool


@dataclass(frozen=True)
class TVar:
    name: str  # declared as 'A in source


@dataclass(frozen=True)
class TTuple:
    items: tuple["TypeExpr", ...]  # always length >= 2


@dataclass(frozen=True)
class TNamed:
    name: str
    args: tuple["TypeExpr", ...] = ()


@dataclass(frozen=True)
class TRigid:
    """A signature type variable made opaque while checking its own body."""

    name: str


TypeExpr = Union[TBase, TVar, TTuple, TNamed, TRigid]

T_I32 = TBase("i32")
T_STRING = TBase("string")
T_BOOL = TBase("bool")
T_BOOL_EXP = TNamed("bool_exp")
T_BV32_EXP = TNamed("bv32_exp")


def type_to_str(t: TypeExpr) -> str:
    if isinstance(t, TBase):
        return t.name
    if isinstance(t, TVar):
        return f"'{t.name}"
    if isinstance(t, TRigid):
        return f"'{t.name}"
    if isinstance(t, TTuple):
        return "(" + " * ".join(type_to_str(i) for i in t.items) + ")"
    if isinstance(t, TNamed):
        if not t.args:
            return t.name
        if len(t.args) == 1:
            return f"{arg_str(t.args[0])} {t.name}"
        return "(" + ", ".join(type_to_str(a) for a in t.args) + ") " + t.name
    raise AssertionError(t)


def arg_str(t: TypeExpr) -> str:
    # single type argument: parenthesize applications so `i32 tree list`
    # round-trips unambiguously as `(i32 tree) list`
    if isinstance(t, TNamed) and t.args:
        return "(" + type_to_str(t) + ")"
    return type_to_str(t)


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True)
class Var:
    name: str
    loc: Loc | None = None


@dataclass(frozen=True)
class IntLit:
    value: int
    loc: Loc | None = None


@dataclass(frozen=True)
class StrLit:
    value: str
    loc: Loc | None = None


@dataclass(frozen=True)
class BoolLit:
    """`true`/`false` before the checker decides between bool and bool_exp."""

    value: bool
    loc: Loc | None = None


@dataclass(frozen=True)
class CtorApp:
    name: str
    args: tuple["TermAst", ...] = ()
    loc: Loc | None = None


@dataclass(frozen=True)
class TupleTerm:
    items: tuple["TermAst", ...] = ()
    loc: Loc | None = None


@dataclass(frozen=True)
class FnCall:
    name: str
    args: tuple["TermAst", ...] = ()
    loc: Loc | None = None


TermAst = Union[Var, IntLit, StrLit, BoolLit, CtorApp, TupleTerm, FnCall]


def term_vars(t: TermAst, acc: set[str] | None = None) -> set[str]:
    """All variable names occurring anywhere in the term."""
    if acc is None:
        acc = set()
    stack = [t]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            acc.add(n.name)
        elif isinstance(n, (CtorApp, FnCall)):
            stack.extend(n.args)
        elif isinstance(n, TupleTerm):
            stack.extend(n.items)
    return acc


def call_arg_vars(t: TermAst, acc: set[str] | None = None) -> set[str]:
    """Variables occurring inside the arguments of any function call."""
    if acc is None:
        acc = set()
    stack: list[tuple[TermAst, bool]] = [(t, False)]
    while stack:
        n, inside = stack.pop()
        if isinstance(n, Var):
            if inside:
                acc.add(n.name)
        elif isinstance(n, FnCall):
            stack.extend((a, True) for a in n.args)
        elif isinstance(n, CtorApp):
            stack.extend((a, inside) for a in n.args)
        elif isinstance(n, TupleTerm):
            stack.extend((a, inside) for a in n.items)
    return acc


def outside_call_vars(t: TermAst) -> set[str]:
    """Variables with at least one occurrence outside all call arguments."""
    acc: set[str] = set()
    stack = [t]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            acc.add(n.name)
        elif isinstance(n, CtorApp):
            stack.extend(n.args)
        elif isinstance(n, TupleTerm):
            stack.extend(n.items)
        # FnCall: do not descend
    return acc


def has_call(t: TermAst) -> bool:
    stack = [t]
    while stack:
        n = stack.pop()
        if isinstance(n, FnCall):
            return True
        if isinstance(n, CtorApp):
            stack.extend(n.args)
        elif isinstance(n, TupleTerm):
            stack.extend(n.items)
    return False


# ---------------------------------------------------------------------------
# expressions (function bodies)

@dataclass(frozen=True)
class TermExpr:
    term: TermAst


@dataclass(frozen=True)
class Match:
    """Surface scrutinees are terms; desugaring a let whose bound side is
    itself an expression produces a Match with an Expr scrutinee."""

    scrutinee: Union[TermAst, "Expr"]
    branches: tuple[tuple[TermAst, "Expr"], ...]
    loc: Loc | None = None


@dataclass(frozen=True)
class Let:
    pattern: TermAst
    bound: "Expr"
    body: "Expr"
    loc: Loc | None = None


@dataclass(frozen=True)
class If:
    cond: TermAst
    then: "Expr"
    orelse: "Expr"
    loc: Loc | None = None


Expr = Union[TermExpr, Match, Let, If]


def _is_expr(x) -> bool:
    return isinstance(x, (TermExpr, Match, Let, If))


def desugar(e: Expr) -> Expr:
    """Rewrite Let and If into single- and two-branch Match expressions."""
    if isinstance(e, TermExpr):
        return e
    if isinstance(e, Match):
        scrut = desugar(e.scrutinee) if _is_expr(e.scrutinee) else e.scrutinee
        if isinstance(scrut, TermExpr):
            scrut = scrut.term
        return Match(scrut,
                     tuple((p, desugar(b)) for p, b in e.branches), e.loc)
    if isinstance(e, Let):
        bound = desugar(e.bound)
        if isinstance(bound, TermExpr):
            bound = bound.term
        return Match(bound, ((e.pattern, desugar(e.body)),), e.loc)
    if isinstance(e, If):
        return Match(e.cond, ((BoolLit(True, e.loc), desugar(e.then)),
                              (BoolLit(False, e.loc), desugar(e.orelse))),
                     e.loc)
    raise AssertionError(e)


def expr_free_vars(e: Expr) -> set[str]:
    """Variables read by the expression, minus those bound by patterns."""
    if isinstance(e, TermExpr):
        return term_vars(e.term)
    if isinstance(e, Match):
        out = (expr_free_vars(e.scrutinee) if _is_expr(e.scrutinee)
               else term_vars(e.scrutinee))
        for pat, body in e.branches:
            out |= expr_free_vars(body) - term_vars(pat)
        return out
    if isinstance(e, Let):
        return expr_free_vars(e.bound) | (expr_free_vars(e.body)
                                          - term_vars(e.pattern))
    if isinstance(e, If):
        return (term_vars(e.cond) | expr_free_vars(e.then)
                | expr_free_vars(e.orelse))
    raise AssertionError(e)


# ---------------------------------------------------------------------------
# clauses

@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[TermAst, ...]
    loc: Loc | None = None


@dataclass(frozen=True)
class NegAtom:
    atom: Atom
    loc: Loc | None = None


@dataclass(frozen=True)
class Unification:
    lhs: TermAst
    rhs: TermAst
    loc: Loc | None = None


Premise = Union[Atom, NegAtom, Unification]


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple[Premise, ...] = ()
    loc: Loc | None = None

    @property
    def is_fact(self) -> bool:
        return not self.body


def premise_vars(p: Premise) -> set[str]:
    if isinstance(p, Atom):
        out: set[str] = set()
        for a in p.args:
            term_vars(a, out)
        return out
    if isinstance(p, NegAtom):
        return premise_vars(p.atom)
    return term_vars(p.lhs) | term_vars(p.rhs)


# ---------------------------------------------------------------------------
# declarations

@dataclass(frozen=True)
class AdtDef:
    name: str
    type_params: tuple[str, ...]
    ctors: tuple[tuple[str, tuple[TypeExpr, ...]], ...]
    loc: Loc | None = None


@dataclass(frozen=True)
class TypeAlias:
    name: str
    target: TypeExpr
    loc: Loc | None = None


@dataclass(frozen=True)
class FunDecl:
    name: str
    param_types: tuple[TypeExpr, ...]
    return_type: TypeExpr
    loc: Loc | None = None


@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple[str, ...]
    body: Expr
    loc: Loc | None = None


@dataclass(frozen=True)
class RelDecl:
    name: str
    arg_types: tuple[TypeExpr, ...]
    kind: str  # "input" | "output"
    loc: Loc | None = None


@dataclass(frozen=True)
class SourceProgram:
    type_defs: tuple[AdtDef, ...] = ()
    aliases: tuple[TypeAlias, ...] = ()
    fun_decls: tuple[FunDecl, ...] = ()
    fun_defs: tuple[FunDef, ...] = ()
    rel_decls: tuple[RelDecl, ...] = ()
    clauses: tuple[Clause, ...] = ()

    def rel_decl(self, name: str) -> RelDecl | None:
        for d in self.rel_decls:
            if d.name == name:
                return d
        return None

    @property
    def facts(self) -> tuple[Clause, ...]:
        return tuple(c for c in self.clauses if c.is_fact)

    @property
    def rules(self) -> tuple[Clause, ...]:
        return tuple(c for c in self.clauses if not c.is_fact)


def desugar_program(p: SourceProgram) -> SourceProgram:
    defs = tuple(FunDef(d.name, d.params, desugar(d.body), d.loc)
                 for d in p.fun_defs)
    return SourceProgram(p.type_defs, p.aliases, p.fun_decls, defs,
                         p.rel_decls, p.clauses)


# ---------------------------------------------------------------------------
# pretty printer (canonical concrete syntax; parse(pp(parse(s))) == parse(s))

INFIX_OPS = {"==", "<", "<=", ">", ">=", "+", "-", "*", "/", "%"}
# precedence levels, loosest first
_CMP = {"==", "<", "<=", ">", ">="}
_ADD = {"+", "-"}
_MUL = {"*", "/", "%"}


def _prec(name: str) -> int:
    if name in _CMP:
        return 1
    if name in _ADD:
        return 2
    if name in _MUL:
        return 3
    return 4


def term_to_str(t: TermAst, parent_prec: int = 0) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, IntLit):
        return str(t.value)
    if isinstance(t, StrLit):
        return '"' + t.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(t, BoolLit):
        return "true" if t.value else "false"
    if isinstance(t, CtorApp):
        if not t.args:
            return t.name
        return t.name + "(" + ", ".join(term_to_str(a) for a in t.args) + ")"
    if isinstance(t, TupleTerm):
        return "(" + ", ".join(term_to_str(a) for a in t.items) + ")"
    if isinstance(t, FnCall):
        if t.name in INFIX_OPS:
            p = _prec(t.name)
            lhs = term_to_str(t.args[0], p)
            rhs = term_to_str(t.args[1], p + 1)
            s = f"{lhs} {t.name} {rhs}"
            return f"({s})" if p < parent_prec else s
        return t.name + "(" + ", ".join(term_to_str(a) for a in t.args) + ")"
    raise AssertionError(t)


def expr_to_str(e: Expr, indent: int = 1) -> str:
    pad = "    " * indent
    if isinstance(e, TermExpr):
        return term_to_str(e.term)
    if isinstance(e, Match):
        scrut = (expr_to_str(e.scrutinee, indent) if _is_expr(e.scrutinee)
                 else term_to_str(e.scrutinee))
        lines = [f"match {scrut} with"]
        for pat, body in e.branches:
            lines.append(f"{pad}| {term_to_str(pat)} => "
                         f"{expr_to_str(body, indent + 1)}")
        lines.append(f"{pad}end")
        return "\n".join(lines)
    if isinstance(e, Let):
        return (f"let {term_to_str(e.pattern)} = "
                f"{expr_to_str(e.bound, indent)} in\n"
                f"{pad}{expr_to_str(e.body, indent)}")
    if isinstance(e, If):
        return (f"if {term_to_str(e.cond)} then {expr_to_str(e.then, indent)} "
                f"else {expr_to_str(e.orelse, indent)}")
    raise AssertionError(e)


def premise_to_str(p: Premise) -> str:
    if isinstance(p, Atom):
        return p.rel + "(" + ", ".join(term_to_str(a) for a in p.args) + ")"
    if isinstance(p, NegAtom):
        return "!" + premise_to_str(p.atom)
    return f"{term_to_str(p.lhs)} = {term_to_str(p.rhs)}"


def clause_to_str(c: Clause) -> str:
    head = premise_to_str(c.head)
    if not c.body:
        return head + "."
    return head + " :- " + ", ".join(premise_to_str(p) for p in c.body) + "."


def program_to_str(p: SourceProgram) -> str:
    """Canonical re-rendering of a resolved program."""
    out: list[str] = []
    for a in p.aliases:
        out.append(f"define type {a.name} = {type_to_str(a.target)}.")
    for d in p.type_defs:
        params = ""
        if len(d.type_params) == 1:
            params = f"'{d.type_params[0]} "
        elif d.type_params:
            params = "(" + ", ".join(f"'{v}" for v in d.type_params) + ") "
        ctors = []
        for cname, cargs in d.ctors:
            if cargs:
                ctors.append(cname + "("
                             + ", ".join(type_to_str(t) for t in cargs) + ")")
            else:
                ctors.append(cname)
        out.append(f"define type {params}{d.name} = " + " | ".join(ctors)
                   + ".")
    for fd in p.fun_decls:
        args = ", ".join(type_to_str(t) for t in fd.param_types)
        out.append(f"declare fun {fd.name}({args}) : "
                   f"{type_to_str(fd.return_type)}.")
        for fb in p.fun_defs:
            if fb.name == fd.name:
                params = ", ".join(fb.params)
                out.append(f"fun {fb.name}({params}) =\n    "
                           f"{expr_to_str(fb.body, 1)}.")
    for r in p.rel_decls:
        args = ", ".join(type_to_str(t) for t in r.arg_types)
        out.append(f"declare {r.kind} {r.name}({args}).")
    for c in p.clauses:
        out.append(clause_to_str(c))
    return "\n".join(out) + "\n"
