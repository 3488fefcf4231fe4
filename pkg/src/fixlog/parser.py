"""Lexer and two-phase parser.

Phase one reads declarations and clauses with term formers left raw, so that
nothing depends on declaration order.  Phase two builds the symbol tables,
expands type aliases, and resolves every raw identifier into a variable,
constructor, function call, or relation.

Grammar sketch::

    program   := statement*
    statement := "define" "type" [params] name "=" (ctors | type) "."
               | "declare" "fun" name "(" types ")" ":" type "."
               | "fun" name "(" vars ")" "=" expr "."
               | "declare" ("input" | "output") name "(" types ")" "."
               | atom [":-" premise ("," premise)*] "."
    premise   := "!" atom | term "=" term | atom
    expr      := "match" term "with" ["|"] branch ("|" branch)* "end"
               | "let" pattern "=" term "in" expr
               | "if" term "then" expr "else" expr
               | term
    term      := infix expression over primaries; "(" t ")" groups and
                 "(" t "," t ... ")" builds a tuple

Identifiers starting with an uppercase letter are variables.  `//` starts a
line comment.  Match syntax is greedy: a nested match inside a branch
swallows the following branches, so put nested matches last or inside a let.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import ast
from .errors import Loc, ParseError, ResolutionError
from .prelude import (BASE_TYPE_NAMES, BUILTIN_FUNCS, INT_MAX, INT_MIN,
                      PRELUDE_ADTS)

KEYWORDS = {"define", "type", "declare", "fun", "input", "output", "match",
            "with", "end", "let", "in", "if", "then", "else"}

_TOKEN_RE = re.compile(r"""
   (?P<ws>[\ \t\r\n]+)
  |(?P<comment>//[^\n]*)
  |(?P<tyvar>'[A-Za-z][A-Za-z0-9_]*)
  |(?P<int>[0-9]+)
  |(?P<string>"(?:[^"\\\n\r\t]|\\.)*")
  |(?P<badstring>")
  |(?P<ident>[a-z_][A-Za-z0-9_]*)
  |(?P<uident>[A-Z][A-Za-z0-9_]*)
  |(?P<punct>:-|=>|==|<=|>=|[().,|=<>+\-*/%!:])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # tyvar int string ident uident punct keyword eof
    text: str
    loc: Loc


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}",
                             Loc(line, col))
        kind = m.lastgroup
        text = m.group()
        loc = Loc(line, col)
        if kind == "badstring":
            raise ParseError("unterminated string literal", loc)
        if kind == "ident" and text in KEYWORDS:
            toks.append(Token("keyword", text, loc))
        elif kind not in ("ws", "comment"):
            toks.append(Token(kind, text, loc))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(Token("eof", "", Loc(line, col)))
    return toks


def _decode_string(tok: Token) -> str:
    body = tok.text[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            if i + 1 >= len(body) or body[i + 1] not in ('"', "\\"):
                raise ParseError(
                    f"unsupported escape \\{body[i + 1:i + 2]}", tok.loc)
            out.append(body[i + 1])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


# ---------------------------------------------------------------------------
# raw (unresolved) term formers

@dataclass(frozen=True)
class RawId:
    name: str
    loc: Loc


@dataclass(frozen=True)
class RawApp:
    name: str
    args: tuple
    loc: Loc


@dataclass(frozen=True)
class RawTypeDef:
    """ADT or alias; a bare identifier right-hand side stays ambiguous until
    the resolver knows every type name."""

    name: str
    params: tuple[str, ...]
    ctors: tuple | None  # list of (name, types, loc) when clearly an ADT
    alias_of: ast.TypeExpr | None
    ambiguous_ident: str | None
    loc: Loc


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    # token plumbing -------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.next()
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.peek()
        if not self.at(kind, text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, found {t.text or t.kind!r}",
                             t.loc)
        return self.next()

    # types ------------------------------------------------------------------

    def parse_type(self) -> ast.TypeExpr:
        t = self.parse_type_atom()
        while self.at("ident"):
            name = self.next()
            if isinstance(t, tuple):  # argument list from parentheses
                t = ast.TNamed(name.text, t)
            else:
                t = ast.TNamed(name.text, (t,))
        if isinstance(t, tuple):
            raise ParseError("type argument list must be followed by a "
                             "type name", self.peek().loc)
        return t

    def parse_type_atom(self):
        t = self.peek()
        if t.kind == "tyvar":
            self.next()
            return ast.TVar(t.text[1:])
        if t.kind == "ident":
            self.next()
            if t.text in BASE_TYPE_NAMES:
                return ast.TBase(t.text)
            return ast.TNamed(t.text, ())
        if self.accept("punct", "("):
            first = self.parse_type()
            if self.accept("punct", "*"):
                items = [first, self.parse_type()]
                while self.accept("punct", "*"):
                    items.append(self.parse_type())
                self.expect("punct", ")")
                return ast.TTuple(tuple(items))
            if self.accept("punct", ","):
                args = [first, self.parse_type()]
                while self.accept("punct", ","):
                    args.append(self.parse_type())
                self.expect("punct", ")")
                return tuple(args)  # must be followed by a type name
            self.expect("punct", ")")
            return first
        raise ParseError(f"expected a type, found {t.text or t.kind!r}",
                         t.loc)

    def parse_type_list(self) -> tuple[ast.TypeExpr, ...]:
        types = [self.parse_type()]
        while self.accept("punct", ","):
            types.append(self.parse_type())
        return tuple(types)

    # terms ------------------------------------------------------------------

    def parse_term(self):
        lhs = self.parse_additive()
        t = self.peek()
        if t.kind == "punct" and t.text in ("==", "<", "<=", ">", ">="):
            self.next()
            rhs = self.parse_additive()
            return ast.FnCall(t.text, (lhs, rhs), t.loc)
        return lhs

    def parse_additive(self):
        lhs = self.parse_multiplicative()
        while True:
            t = self.peek()
            if t.kind == "punct" and t.text in ("+", "-"):
                self.next()
                rhs = self.parse_multiplicative()
                lhs = ast.FnCall(t.text, (lhs, rhs), t.loc)
            else:
                return lhs

    def parse_multiplicative(self):
        lhs = self.parse_primary()
        while True:
            t = self.peek()
            if t.kind == "punct" and t.text in ("*", "/", "%"):
                self.next()
                rhs = self.parse_primary()
                lhs = ast.FnCall(t.text, (lhs, rhs), t.loc)
            else:
                return lhs

    def parse_primary(self):
        t = self.peek()
        if t.kind == "int":
            self.next()
            v = int(t.text)
            if v > INT_MAX:
                raise ParseError(f"integer literal {t.text} overflows i32",
                                 t.loc)
            return ast.IntLit(v, t.loc)
        if t.kind == "punct" and t.text == "-":
            nxt = self.peek(1)
            if nxt.kind != "int":
                raise ParseError("'-' is only a binary operator or a "
                                 "literal sign", t.loc)
            self.next()
            self.next()
            v = -int(nxt.text)
            if v < INT_MIN:
                raise ParseError(f"integer literal -{nxt.text} overflows i32",
                                 t.loc)
            return ast.IntLit(v, t.loc)
        if t.kind == "string":
            self.next()
            return ast.StrLit(_decode_string(t), t.loc)
        if t.kind == "uident":
            self.next()
            if self.at("punct", "("):
                raise ParseError(f"variable {t.text} cannot be applied to "
                                 "arguments", t.loc)
            return ast.Var(t.text, t.loc)
        if t.kind == "ident":
            self.next()
            if self.accept("punct", "("):
                if self.accept("punct", ")"):
                    return RawApp(t.text, (), t.loc)
                args = [self.parse_term()]
                while self.accept("punct", ","):
                    args.append(self.parse_term())
                self.expect("punct", ")")
                return RawApp(t.text, tuple(args), t.loc)
            return RawId(t.text, t.loc)
        if t.kind == "punct" and t.text == "(":
            self.next()
            first = self.parse_term()
            if self.accept("punct", ","):
                items = [first, self.parse_term()]
                while self.accept("punct", ","):
                    items.append(self.parse_term())
                self.expect("punct", ")")
                return ast.TupleTerm(tuple(items), t.loc)
            self.expect("punct", ")")
            return first
        raise ParseError(f"expected a term, found {t.text or t.kind!r}",
                         t.loc)

    # expressions -------------------------------------------------------------

    def parse_expr(self):
        t = self.peek()
        if t.kind == "keyword" and t.text == "match":
            self.next()
            scrut = self.parse_term()
            self.expect("keyword", "with")
            self.accept("punct", "|")
            branches = [self.parse_branch()]
            while self.accept("punct", "|"):
                branches.append(self.parse_branch())
            self.expect("keyword", "end")
            return ast.Match(scrut, tuple(branches), t.loc)
        if t.kind == "keyword" and t.text == "let":
            self.next()
            pat = self.parse_term()
            self.expect("punct", "=")
            nxt = self.peek()
            if nxt.kind == "keyword" and nxt.text in ("match", "let", "if"):
                bound: ast.Expr = self.parse_expr()
            else:
                bound = ast.TermExpr(self.parse_term())
            self.expect("keyword", "in")
            body = self.parse_expr()
            return ast.Let(pat, bound, body, t.loc)
        if t.kind == "keyword" and t.text == "if":
            self.next()
            cond = self.parse_term()
            self.expect("keyword", "then")
            then = self.parse_expr()
            self.expect("keyword", "else")
            orelse = self.parse_expr()
            return ast.If(cond, then, orelse, t.loc)
        return ast.TermExpr(self.parse_term())

    def parse_branch(self):
        pat = self.parse_term()
        self.expect("punct", "=>")
        body = self.parse_expr()
        return (pat, body)

    # statements ----------------------------------------------------------------

    def parse_atom_raw(self) -> RawApp:
        t = self.expect("ident")
        self.expect("punct", "(")
        args = [self.parse_term()]
        while self.accept("punct", ","):
            args.append(self.parse_term())
        self.expect("punct", ")")
        return RawApp(t.text, tuple(args), t.loc)

    def parse_premise(self):
        t = self.peek()
        if self.accept("punct", "!"):
            atom = self.parse_atom_raw()
            return ("neg", atom, t.loc)
        lhs = self.parse_term()
        if self.accept("punct", "="):
            rhs = self.parse_term()
            return ("unif", lhs, rhs, t.loc)
        if isinstance(lhs, RawApp):
            return ("atom", lhs, t.loc)
        raise ParseError("expected a premise (atom, !atom, or s = t)", t.loc)

    def parse_type_def(self, loc: Loc) -> RawTypeDef:
        params: tuple[str, ...] = ()
        if self.at("tyvar"):
            params = (self.next().text[1:],)
        elif self.at("punct", "(") and self.peek(1).kind == "tyvar":
            self.next()
            names = [self.expect("tyvar").text[1:]]
            while self.accept("punct", ","):
                names.append(self.expect("tyvar").text[1:])
            self.expect("punct", ")")
            params = tuple(names)
        name = self.expect("ident").text
        self.expect("punct", "=")
        # a leading '|' or any '(' args / '|' separator means an ADT
        if self.accept("punct", "|"):
            ctors = self.parse_ctor_list()
            self.expect("punct", ".")
            return RawTypeDef(name, params, ctors, None, None, loc)
        if self.at("ident"):
            first = self.next()
            if self.at("punct", "(") or self.at("punct", "|"):
                self.pos -= 1
                ctors = self.parse_ctor_list()
                self.expect("punct", ".")
                return RawTypeDef(name, params, ctors, None, None, loc)
            if self.at("punct", "."):
                self.next()
                # `define type n = foo.`: alias if foo names a type,
                # otherwise a single 0-ary constructor
                if first.text in BASE_TYPE_NAMES:
                    return RawTypeDef(name, params, None,
                                      ast.TBase(first.text), None, loc)
                return RawTypeDef(name, params, None, None, first.text, loc)
            self.pos -= 1
            target = self.parse_type()
            self.expect("punct", ".")
            return RawTypeDef(name, params, None, target, None, loc)
        target = self.parse_type()
        self.expect("punct", ".")
        return RawTypeDef(name, params, None, target, None, loc)

    def parse_ctor_list(self):
        ctors = [self.parse_ctor()]
        while self.accept("punct", "|"):
            ctors.append(self.parse_ctor())
        return tuple(ctors)

    def parse_ctor(self):
        t = self.expect("ident")
        args: tuple[ast.TypeExpr, ...] = ()
        if self.accept("punct", "("):
            args = self.parse_type_list()
            self.expect("punct", ")")
        return (t.text, args, t.loc)

    def parse_program(self):
        type_defs: list[RawTypeDef] = []
        fun_decls: list[ast.FunDecl] = []
        fun_defs: list[tuple] = []
        rel_decls: list[ast.RelDecl] = []
        clauses: list[tuple] = []
        while not self.at("eof"):
            t = self.peek()
            if t.kind == "keyword" and t.text == "define":
                self.next()
                self.expect("keyword", "type")
                type_defs.append(self.parse_type_def(t.loc))
            elif t.kind == "keyword" and t.text == "declare":
                self.next()
                if self.accept("keyword", "fun"):
                    name = self.expect("ident")
                    self.expect("punct", "(")
                    ptypes: tuple[ast.TypeExpr, ...] = ()
                    if not self.at("punct", ")"):
                        ptypes = self.parse_type_list()
                    self.expect("punct", ")")
                    self.expect("punct", ":")
                    ret = self.parse_type()
                    self.expect("punct", ".")
                    fun_decls.append(ast.FunDecl(name.text, ptypes, ret,
                                                 t.loc))
                else:
                    kw = self.peek()
                    if not (kw.kind == "keyword"
                            and kw.text in ("input", "output")):
                        raise ParseError("expected 'fun', 'input', or "
                                         "'output' after 'declare'", kw.loc)
                    self.next()
                    name = self.expect("ident")
                    self.expect("punct", "(")
                    if self.at("punct", ")"):
                        raise ParseError("relations must have at least one "
                                         "argument", name.loc)
                    atypes = self.parse_type_list()
                    self.expect("punct", ")")
                    self.expect("punct", ".")
                    rel_decls.append(ast.RelDecl(name.text, atypes, kw.text,
                                                 t.loc))
            elif t.kind == "keyword" and t.text == "fun":
                self.next()
                name = self.expect("ident")
                self.expect("punct", "(")
                params: list[str] = []
                if not self.at("punct", ")"):
                    params.append(self.expect("uident").text)
                    while self.accept("punct", ","):
                        params.append(self.expect("uident").text)
                self.expect("punct", ")")
                self.expect("punct", "=")
                body = self.parse_expr()
                self.expect("punct", ".")
                fun_defs.append((name.text, tuple(params), body, t.loc))
            elif t.kind == "ident":
                head = self.parse_atom_raw()
                body_premises: list = []
                if self.accept("punct", ":-"):
                    body_premises.append(self.parse_premise())
                    while self.accept("punct", ","):
                        body_premises.append(self.parse_premise())
                self.expect("punct", ".")
                clauses.append((head, tuple(body_premises), t.loc))
            else:
                raise ParseError(
                    f"expected a declaration or clause, found "
                    f"{t.text or t.kind!r}", t.loc)
        return type_defs, fun_decls, fun_defs, rel_decls, clauses


# ---------------------------------------------------------------------------
# phase two: resolution

class _Resolver:
    def __init__(self, type_defs, fun_decls, fun_defs, rel_decls, clauses):
        self.raw = (type_defs, fun_decls, fun_defs, rel_decls, clauses)
        self.adts: dict[str, ast.AdtDef] = {d.name: d for d in PRELUDE_ADTS}
        self.aliases: dict[str, ast.TypeExpr] = {}
        self.ctors: dict[str, tuple[str, tuple[ast.TypeExpr, ...]]] = {}
        for d in PRELUDE_ADTS:
            for cname, cargs in d.ctors:
                self.ctors[cname] = (d.name, cargs)
        self.fun_sigs: dict[str, tuple] = dict(BUILTIN_FUNCS)
        self.rels: dict[str, ast.RelDecl] = {}

    def run(self) -> ast.SourceProgram:
        raw_types, fun_decls, raw_defs, rel_decls, raw_clauses = self.raw
        self.classify_type_defs(raw_types)
        adt_defs = self.install_types(raw_types)
        self.install_funcs(fun_decls, raw_defs)
        self.install_rels(rel_decls)

        out_decls = tuple(
            ast.FunDecl(d.name, tuple(self.expand(t, d.loc)
                                      for t in d.param_types),
                        self.expand(d.return_type, d.loc), d.loc)
            for d in fun_decls)
        out_rels = tuple(
            ast.RelDecl(d.name, tuple(self.expand(t, d.loc)
                                      for t in d.arg_types), d.kind, d.loc)
            for d in rel_decls)
        out_defs = tuple(
            ast.FunDef(name, params, self.resolve_expr(body), loc)
            for name, params, body, loc in raw_defs)
        out_clauses = tuple(self.resolve_clause(c) for c in raw_clauses)
        out_aliases = tuple(ast.TypeAlias(n, t)
                            for n, t in self.aliases.items())
        return ast.SourceProgram(adt_defs, out_aliases, out_decls, out_defs,
                                 out_rels, out_clauses)

    # types --------------------------------------------------------------

    def classify_type_defs(self, raw_types: list[RawTypeDef]):
        names = {d.name for d in raw_types}
        for i, d in enumerate(raw_types):
            if d.ambiguous_ident is not None:
                target = d.ambiguous_ident
                if (target in names or target in self.adts
                        or target in BASE_TYPE_NAMES):
                    raw_types[i] = RawTypeDef(
                        d.name, d.params, None,
                        ast.TBase(target) if target in BASE_TYPE_NAMES
                        else ast.TNamed(target, ()), None, d.loc)
                else:
                    raw_types[i] = RawTypeDef(
                        d.name, d.params, ((target, (), d.loc),), None, None,
                        d.loc)

    def install_types(self, raw_types: list[RawTypeDef]):
        for d in raw_types:
            if d.name in self.adts or d.name in self.aliases \
                    or d.name in BASE_TYPE_NAMES:
                raise ResolutionError(f"type {d.name} is declared twice",
                                      d.loc)
            if d.ctors is None:
                if d.params:
                    raise ResolutionError(
                        "type aliases cannot take parameters", d.loc)
                self.aliases[d.name] = d.alias_of  # expanded below
            else:
                # reserve name and arity so mutually recursive ADTs resolve
                self.adts[d.name] = ast.AdtDef(d.name, d.params, (), d.loc)

        for name in list(self.aliases):
            self.aliases[name] = self._expand(self.aliases[name], (name,))

        adt_defs = []
        for d in raw_types:
            if d.ctors is None:
                continue
            ctors = []
            for cname, cargs, cloc in d.ctors:
                if cname in self.ctors:
                    raise ResolutionError(
                        f"constructor {cname} is declared twice", cloc)
                expanded = tuple(self.expand(t, cloc) for t in cargs)
                for t in expanded:
                    self.check_type(t, set(d.params), cloc)
                self.ctors[cname] = (d.name, expanded)
                ctors.append((cname, expanded))
            adt = ast.AdtDef(d.name, d.params, tuple(ctors), d.loc)
            self.adts[d.name] = adt
            adt_defs.append(adt)
        return tuple(adt_defs)

    def _expand(self, t: ast.TypeExpr, seen: tuple[str, ...]) -> ast.TypeExpr:
        if isinstance(t, (ast.TBase, ast.TVar, ast.TRigid)):
            return t
        if isinstance(t, ast.TTuple):
            return ast.TTuple(tuple(self._expand(i, seen) for i in t.items))
        if isinstance(t, ast.TNamed):
            if t.name in self.aliases:
                if t.args:
                    raise ResolutionError(
                        f"type alias {t.name} takes no arguments")
                if t.name in seen:
                    raise ResolutionError(
                        "type alias cycle: " + " -> ".join(seen + (t.name,)))
                return self._expand(self.aliases[t.name], seen + (t.name,))
            return ast.TNamed(t.name, tuple(self._expand(a, seen)
                                            for a in t.args))
        raise AssertionError(t)

    def expand(self, t: ast.TypeExpr, loc: Loc | None = None) -> ast.TypeExpr:
        return self._expand(t, ())

    def check_type(self, t: ast.TypeExpr, params: set[str], loc: Loc | None):
        """Ensure every named type exists with the right arity and every
        type variable is in scope."""
        if isinstance(t, ast.TBase):
            return
        if isinstance(t, ast.TVar):
            if t.name not in params:
                raise ResolutionError(f"unbound type variable '{t.name}", loc)
            return
        if isinstance(t, ast.TTuple):
            for i in t.items:
                self.check_type(i, params, loc)
            return
        if isinstance(t, ast.TNamed):
            adt = self.adts.get(t.name)
            if adt is None:
                raise ResolutionError(f"unknown type {t.name}", loc)
            if len(adt.type_params) != len(t.args):
                raise ResolutionError(
                    f"type {t.name} expects {len(adt.type_params)} "
                    f"argument(s), got {len(t.args)}", loc)
            for a in t.args:
                self.check_type(a, params, loc)
            return
        raise AssertionError(t)

    # functions and relations ---------------------------------------------

    def install_funcs(self, fun_decls, raw_defs):
        for d in fun_decls:
            if d.name in self.fun_sigs:
                raise ResolutionError(f"function {d.name} is declared twice",
                                      d.loc)
            if d.name in self.ctors:
                raise ResolutionError(
                    f"{d.name} is already a constructor name", d.loc)
            params = tuple(self.expand(t, d.loc) for t in d.param_types)
            ret = self.expand(d.return_type, d.loc)
            sig_vars = set()
            for t in params + (ret,):
                _collect_tvars(t, sig_vars)
            for t in params + (ret,):
                self.check_type(t, sig_vars, d.loc)
            self.fun_sigs[d.name] = (params, ret)
        for c in self.ctors:
            if c in self.fun_sigs:
                raise ResolutionError(f"{c} is both a constructor and a "
                                      "function name")
        defined = set()
        declared = {d.name for d in fun_decls}
        for name, params, _body, loc in raw_defs:
            if name not in declared:
                raise ResolutionError(
                    f"function {name} is defined but never declared", loc)
            if name in defined:
                raise ResolutionError(f"function {name} is defined twice",
                                      loc)
            sig = self.fun_sigs[name]
            if len(sig[0]) != len(params):
                raise ResolutionError(
                    f"function {name} is declared with {len(sig[0])} "
                    f"parameter(s) but defined with {len(params)}", loc)
            if len(set(params)) != len(params):
                raise ResolutionError(
                    f"function {name} repeats a parameter name", loc)
            defined.add(name)
        for name in declared - defined:
            raise ResolutionError(f"function {name} is declared but never "
                                  "defined")

    def install_rels(self, rel_decls):
        for d in rel_decls:
            if d.name in self.rels:
                raise ResolutionError(f"relation {d.name} is declared twice",
                                      d.loc)
            for t in d.arg_types:
                self.check_type(self.expand(t, d.loc), set(), d.loc)
            self.rels[d.name] = d

    # terms ---------------------------------------------------------------

    def resolve_term(self, t, pattern: bool = False):
        if isinstance(t, (ast.Var, ast.IntLit, ast.StrLit, ast.BoolLit)):
            return t
        if isinstance(t, ast.TupleTerm):
            return ast.TupleTerm(tuple(self.resolve_term(i, pattern)
                                       for i in t.items), t.loc)
        if isinstance(t, ast.FnCall):  # infix operators
            if pattern:
                raise ResolutionError(
                    f"operator {t.name} cannot appear in a pattern", t.loc)
            return ast.FnCall(t.name, tuple(self.resolve_term(a)
                                            for a in t.args), t.loc)
        if isinstance(t, RawId):
            if t.name in ("true", "false"):
                return ast.BoolLit(t.name == "true", t.loc)
            if t.name in self.ctors:
                want = len(self.ctors[t.name][1])
                if want != 0:
                    raise ResolutionError(
                        f"constructor {t.name} expects {want} "
                        f"argument(s), got 0", t.loc)
                return ast.CtorApp(t.name, (), t.loc)
            if t.name in self.fun_sigs:
                if pattern:
                    raise ResolutionError(
                        f"function {t.name} cannot appear in a pattern",
                        t.loc)
                want = len(self.fun_sigs[t.name][0])
                if want != 0:
                    raise ResolutionError(
                        f"function {t.name} expects {want} argument(s), "
                        f"got 0", t.loc)
                return ast.FnCall(t.name, (), t.loc)
            raise ResolutionError(
                f"unknown identifier {t.name} used as a term", t.loc)
        if isinstance(t, RawApp):
            args = tuple(self.resolve_term(a, pattern) for a in t.args)
            if t.name in ("true", "false"):
                raise ResolutionError(f"{t.name} takes no arguments", t.loc)
            if t.name in self.ctors:
                want = len(self.ctors[t.name][1])
                if want != len(args):
                    raise ResolutionError(
                        f"constructor {t.name} expects {want} argument(s), "
                        f"got {len(args)}", t.loc)
                return ast.CtorApp(t.name, args, t.loc)
            if t.name in self.fun_sigs:
                if pattern:
                    raise ResolutionError(
                        f"function {t.name} cannot appear in a pattern",
                        t.loc)
                want = len(self.fun_sigs[t.name][0])
                if want != len(args):
                    raise ResolutionError(
                        f"function {t.name} expects {want} argument(s), "
                        f"got {len(args)}", t.loc)
                return ast.FnCall(t.name, args, t.loc)
            raise ResolutionError(
                f"unknown identifier {t.name} used as a constructor or "
                f"function", t.loc)
        raise AssertionError(t)

    def resolve_expr(self, e):
        if isinstance(e, ast.TermExpr):
            return ast.TermExpr(self.resolve_term(e.term))
        if isinstance(e, ast.Match):
            return ast.Match(
                self.resolve_term(e.scrutinee),
                tuple((self.resolve_term(p, pattern=True),
                       self.resolve_expr(b)) for p, b in e.branches), e.loc)
        if isinstance(e, ast.Let):
            return ast.Let(self.resolve_term(e.pattern, pattern=True),
                           self.resolve_expr(e.bound),
                           self.resolve_expr(e.body), e.loc)
        if isinstance(e, ast.If):
            return ast.If(self.resolve_term(e.cond),
                          self.resolve_expr(e.then),
                          self.resolve_expr(e.orelse), e.loc)
        raise AssertionError(e)

    def resolve_atom(self, raw: RawApp) -> ast.Atom:
        decl = self.rels.get(raw.name)
        if decl is None:
            raise ResolutionError(
                f"unknown relation {raw.name}", raw.loc)
        if len(decl.arg_types) != len(raw.args):
            raise ResolutionError(
                f"relation {raw.name} expects {len(decl.arg_types)} "
                f"argument(s), got {len(raw.args)}", raw.loc)
        return ast.Atom(raw.name, tuple(self.resolve_term(a)
                                        for a in raw.args), raw.loc)

    def resolve_clause(self, raw) -> ast.Clause:
        head_raw, premises_raw, loc = raw
        head = self.resolve_atom(head_raw)
        body: list[ast.Premise] = []
        for p in premises_raw:
            if p[0] == "neg":
                body.append(ast.NegAtom(self.resolve_atom(p[1]), p[2]))
            elif p[0] == "atom":
                body.append(self.resolve_atom(p[1]))
            else:
                _, lhs, rhs, ploc = p
                body.append(ast.Unification(self.resolve_term(lhs),
                                            self.resolve_term(rhs), ploc))
        return ast.Clause(head, tuple(body), loc)


def _collect_tvars(t: ast.TypeExpr, acc: set[str]):
    if isinstance(t, ast.TVar):
        acc.add(t.name)
    elif isinstance(t, ast.TTuple):
        for i in t.items:
            _collect_tvars(i, acc)
    elif isinstance(t, ast.TNamed):
        for a in t.args:
            _collect_tvars(a, acc)


def parse(source: str) -> ast.SourceProgram:
    """Parse and resolve a program; raises ParseError or ResolutionError."""
    toks = tokenize(source)
    raw = _Parser(toks).parse_program()
    return _Resolver(*raw).run()
