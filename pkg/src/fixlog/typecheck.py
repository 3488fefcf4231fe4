"""Unification-based type checking.

Checks function bodies against their declared signatures and every clause
against the relation signatures, with parametric polymorphism for ADTs and
functions.  `true`/`false` literals are overloaded between plain bool and
the bool_exp constructors; each occurrence is resolved by unification and
defaults to plain bool when nothing constrains it.  check() returns an
elaborated program with every literal disambiguated; all type information is
discarded afterwards.
"""

from __future__ import annotations

from . import ast
from .errors import Loc, OccursCheckFailure, TypeCheckError, TypeMismatch
from .prelude import BUILTIN_FUNCS, PRELUDE_ADTS


class _Item:
    """Typing state for one function definition, fact, or rule."""

    def __init__(self, checker: "Checker"):
        self.checker = checker
        self.subst: dict[str, ast.TypeExpr] = {}
        self.env: dict[str, ast.TypeExpr] = {}
        self.bool_lits: list[tuple[ast.BoolLit, str]] = []
        self.counter = 0
        self.loc: Loc | None = None

    # type variable plumbing ------------------------------------------------

    def fresh(self) -> ast.TVar:
        self.counter += 1
        return ast.TVar(f"%{self.counter}")

    def resolve(self, t: ast.TypeExpr) -> ast.TypeExpr:
        while isinstance(t, ast.TVar) and t.name in self.subst:
            t = self.subst[t.name]
        return t

    def deep_resolve(self, t: ast.TypeExpr) -> ast.TypeExpr:
        t = self.resolve(t)
        if isinstance(t, ast.TTuple):
            return ast.TTuple(tuple(self.deep_resolve(i) for i in t.items))
        if isinstance(t, ast.TNamed):
            return ast.TNamed(t.name, tuple(self.deep_resolve(a)
                                            for a in t.args))
        return t

    def occurs(self, name: str, t: ast.TypeExpr) -> bool:
        t = self.resolve(t)
        if isinstance(t, ast.TVar):
            return t.name == name
        if isinstance(t, ast.TTuple):
            return any(self.occurs(name, i) for i in t.items)
        if isinstance(t, ast.TNamed):
            return any(self.occurs(name, a) for a in t.args)
        return False

    def unify(self, a: ast.TypeExpr, b: ast.TypeExpr):
        a = self.resolve(a)
        b = self.resolve(b)
        if a == b:
            return
        if isinstance(a, ast.TVar):
            if self.occurs(a.name, b):
                raise OccursCheckFailure(
                    ast.type_to_str(a), ast.type_to_str(self.deep_resolve(b)),
                    self.loc)
            self.subst[a.name] = b
            return
        if isinstance(b, ast.TVar):
            self.unify(b, a)
            return
        if isinstance(a, ast.TTuple) and isinstance(b, ast.TTuple) \
                and len(a.items) == len(b.items):
            for x, y in zip(a.items, b.items):
                self.unify(x, y)
            return
        if isinstance(a, ast.TNamed) and isinstance(b, ast.TNamed) \
                and a.name == b.name and len(a.args) == len(b.args):
            for x, y in zip(a.args, b.args):
                self.unify(x, y)
            return
        raise TypeMismatch(ast.type_to_str(self.deep_resolve(a)),
                           ast.type_to_str(self.deep_resolve(b)), self.loc)

    def instantiate(self, types: tuple[ast.TypeExpr, ...]) \
            -> tuple[ast.TypeExpr, ...]:
        """Freshen every type variable in a signature, consistently."""
        mapping: dict[str, ast.TVar] = {}

        def go(t: ast.TypeExpr) -> ast.TypeExpr:
            if isinstance(t, ast.TVar):
                if t.name not in mapping:
                    mapping[t.name] = self.fresh()
                return mapping[t.name]
            if isinstance(t, ast.TTuple):
                return ast.TTuple(tuple(go(i) for i in t.items))
            if isinstance(t, ast.TNamed):
                return ast.TNamed(t.name, tuple(go(a) for a in t.args))
            return t

        return tuple(go(t) for t in types)

    # inference -------------------------------------------------------------

    def _at(self, node) -> None:
        loc = getattr(node, "loc", None)
        if loc is not None:
            self.loc = loc

    def infer_term(self, t: ast.TermAst) -> ast.TypeExpr:
        self._at(t)
        if isinstance(t, ast.Var):
            if t.name not in self.env:
                self.env[t.name] = self.fresh()
            return self.env[t.name]
        if isinstance(t, ast.IntLit):
            return ast.T_I32
        if isinstance(t, ast.StrLit):
            return ast.T_STRING
        if isinstance(t, ast.BoolLit):
            tv = self.fresh()
            self.bool_lits.append((t, tv.name))
            return tv
        if isinstance(t, ast.TupleTerm):
            return ast.TTuple(tuple(self.infer_term(i) for i in t.items))
        if isinstance(t, ast.CtorApp):
            adt_name, arg_sig = self.checker.ctors[t.name]
            adt = self.checker.adts[adt_name]
            params = tuple(ast.TVar(p) for p in adt.type_params)
            inst = self.instantiate(arg_sig + params)
            arg_types, fresh_params = inst[:len(arg_sig)], inst[len(arg_sig):]
            for arg, want in zip(t.args, arg_types):
                got = self.infer_term(arg)
                self._at(arg)
                self.unify(got, want)
            return ast.TNamed(adt_name, fresh_params)
        if isinstance(t, ast.FnCall):
            sig_params, sig_ret = self.checker.fun_sigs[t.name]
            inst = self.instantiate(tuple(sig_params) + (sig_ret,))
            arg_types, ret = inst[:-1], inst[-1]
            for arg, want in zip(t.args, arg_types):
                got = self.infer_term(arg)
                self._at(arg)
                self.unify(got, want)
            return ret
        raise AssertionError(t)

    def infer_pattern(self, p: ast.TermAst) -> ast.TypeExpr:
        """Patterns rebind their variables, shadowing the outer scope."""
        self._at(p)
        if isinstance(p, ast.Var):
            tv = self.fresh()
            self.env[p.name] = tv
            return tv
        if isinstance(p, (ast.IntLit, ast.StrLit, ast.BoolLit,
                          ast.CtorApp, ast.TupleTerm)):
            if isinstance(p, ast.TupleTerm):
                return ast.TTuple(tuple(self.infer_pattern(i)
                                        for i in p.items))
            if isinstance(p, ast.CtorApp):
                adt_name, arg_sig = self.checker.ctors[p.name]
                adt = self.checker.adts[adt_name]
                params = tuple(ast.TVar(x) for x in adt.type_params)
                inst = self.instantiate(arg_sig + params)
                arg_types = inst[:len(arg_sig)]
                fresh_params = inst[len(arg_sig):]
                for arg, want in zip(p.args, arg_types):
                    got = self.infer_pattern(arg)
                    self._at(arg)
                    self.unify(got, want)
                return ast.TNamed(adt_name, fresh_params)
            return self.infer_term(p)
        raise TypeCheckError("invalid pattern", getattr(p, "loc", None))

    def infer_expr(self, e: ast.Expr) -> ast.TypeExpr:
        if isinstance(e, ast.TermExpr):
            return self.infer_term(e.term)
        if isinstance(e, ast.Match):
            self._at(e)
            if isinstance(e.scrutinee, (ast.TermExpr, ast.Match, ast.Let,
                                        ast.If)):
                scrut_t = self.infer_expr(e.scrutinee)
            else:
                scrut_t = self.infer_term(e.scrutinee)
            result = self.fresh()
            for pat, body in e.branches:
                saved = dict(self.env)
                pat_t = self.infer_pattern(pat)
                self._at(pat)
                self.unify(pat_t, scrut_t)
                body_t = self.infer_expr(body)
                self.unify(body_t, result)
                self.env = saved
            return result
        raise AssertionError(f"expression not desugared: {e!r}")

    # literal resolution ------------------------------------------------------

    def finalize_bool_lits(self) -> dict[int, str]:
        kinds: dict[int, str] = {}
        for node, tvname in self.bool_lits:
            t = self.deep_resolve(ast.TVar(tvname))
            if isinstance(t, ast.TVar):
                self.unify(t, ast.T_BOOL)  # unconstrained: default
                t = ast.T_BOOL
            if t == ast.T_BOOL:
                kinds[id(node)] = "bool"
            elif t == ast.T_BOOL_EXP:
                kinds[id(node)] = "bool_exp"
            else:
                raise TypeMismatch("bool or bool_exp", ast.type_to_str(t),
                                   node.loc or self.loc)
        return kinds


class Checker:
    def __init__(self, program: ast.SourceProgram):
        self.program = program
        self.adts: dict[str, ast.AdtDef] = {d.name: d for d in PRELUDE_ADTS}
        self.ctors: dict[str, tuple[str, tuple[ast.TypeExpr, ...]]] = {}
        for d in PRELUDE_ADTS + tuple(program.type_defs):
            self.adts[d.name] = d
            for cname, cargs in d.ctors:
                self.ctors[cname] = (d.name, cargs)
        self.fun_sigs: dict[str, tuple] = dict(BUILTIN_FUNCS)
        for d in program.fun_decls:
            self.fun_sigs[d.name] = (d.param_types, d.return_type)
        self.rels = {d.name: d for d in program.rel_decls}

    def check(self) -> ast.SourceProgram:
        for d in self.program.rel_decls:
            tvs: set[str] = set()
            for t in d.arg_types:
                _collect_tvars(t, tvs)
            if tvs:
                raise TypeCheckError(
                    f"relation {d.name} must be monomorphic; found type "
                    f"variable '{sorted(tvs)[0]}", d.loc)

        fun_defs = tuple(self.check_fun_def(fd) for fd in self.program.fun_defs)
        clauses = tuple(self.check_clause(c) for c in self.program.clauses)
        return ast.SourceProgram(self.program.type_defs, self.program.aliases,
                                 self.program.fun_decls, fun_defs,
                                 self.program.rel_decls, clauses)

    def check_fun_def(self, fd: ast.FunDef) -> ast.FunDef:
        item = _Item(self)
        item.loc = fd.loc
        stray = ast.expr_free_vars(fd.body) - set(fd.params)
        if stray:
            raise TypeCheckError(
                f"variable {sorted(stray)[0]} in the body of function "
                f"{fd.name} is not a parameter or pattern variable", fd.loc)
        params, ret = self.fun_sigs[fd.name]
        rigid_params = tuple(_rigidify(t) for t in params)
        rigid_ret = _rigidify(ret)
        for name, t in zip(fd.params, rigid_params):
            item.env[name] = t
        body_t = item.infer_expr(fd.body)
        item._at(fd)
        item.unify(body_t, rigid_ret)
        kinds = item.finalize_bool_lits()
        return ast.FunDef(fd.name, fd.params, _elab_expr(fd.body, kinds),
                          fd.loc)

    def check_clause(self, c: ast.Clause) -> ast.Clause:
        item = _Item(self)
        item.loc = c.loc
        premises = list(c.body) + [c.head]
        for p in premises:
            if isinstance(p, ast.Atom):
                self._check_atom(item, p)
            elif isinstance(p, ast.NegAtom):
                self._check_atom(item, p.atom)
            elif isinstance(p, ast.Unification):
                lt = item.infer_term(p.lhs)
                rt = item.infer_term(p.rhs)
                item._at(p)
                item.unify(lt, rt)
            else:
                raise AssertionError(p)
        kinds = item.finalize_bool_lits()
        head = _elab_atom(c.head, kinds)
        body = tuple(_elab_premise(p, kinds) for p in c.body)
        return ast.Clause(head, body, c.loc)

    def _check_atom(self, item: _Item, a: ast.Atom):
        decl = self.rels[a.rel]
        for arg, want in zip(a.args, decl.arg_types):
            got = item.infer_term(arg)
            item._at(arg)
            item.unify(got, want)


def _collect_tvars(t: ast.TypeExpr, acc: set[str]):
    if isinstance(t, ast.TVar):
        acc.add(t.name)
    elif isinstance(t, ast.TTuple):
        for i in t.items:
            _collect_tvars(i, acc)
    elif isinstance(t, ast.TNamed):
        for a in t.args:
            _collect_tvars(a, acc)


def _rigidify(t: ast.TypeExpr) -> ast.TypeExpr:
    """Signature variables are opaque while checking the body that owns them,
    so a definition cannot specialize its declared polymorphism."""
    if isinstance(t, ast.TVar):
        return ast.TRigid(t.name)
    if isinstance(t, ast.TTuple):
        return ast.TTuple(tuple(_rigidify(i) for i in t.items))
    if isinstance(t, ast.TNamed):
        return ast.TNamed(t.name, tuple(_rigidify(a) for a in t.args))
    return t


# elaboration: replace each BoolLit with its resolved form -------------------

def _elab_term(t: ast.TermAst, kinds: dict[int, str]) -> ast.TermAst:
    if isinstance(t, ast.BoolLit):
        if kinds.get(id(t)) == "bool_exp":
            return ast.CtorApp("true" if t.value else "false", (), t.loc)
        return t
    if isinstance(t, ast.CtorApp):
        return ast.CtorApp(t.name, tuple(_elab_term(a, kinds)
                                         for a in t.args), t.loc)
    if isinstance(t, ast.TupleTerm):
        return ast.TupleTerm(tuple(_elab_term(a, kinds) for a in t.items),
                             t.loc)
    if isinstance(t, ast.FnCall):
        return ast.FnCall(t.name, tuple(_elab_term(a, kinds)
                                        for a in t.args), t.loc)
    return t


def _elab_expr(e: ast.Expr, kinds: dict[int, str]) -> ast.Expr:
    if isinstance(e, ast.TermExpr):
        return ast.TermExpr(_elab_term(e.term, kinds))
    if isinstance(e, ast.Match):
        if isinstance(e.scrutinee, (ast.TermExpr, ast.Match, ast.Let,
                                    ast.If)):
            scrut = _elab_expr(e.scrutinee, kinds)
        else:
            scrut = _elab_term(e.scrutinee, kinds)
        return ast.Match(scrut, tuple(
            (_elab_term(p, kinds), _elab_expr(b, kinds))
            for p, b in e.branches), e.loc)
    raise AssertionError(f"expression not desugared: {e!r}")


def _elab_atom(a: ast.Atom, kinds: dict[int, str]) -> ast.Atom:
    return ast.Atom(a.rel, tuple(_elab_term(t, kinds) for t in a.args),
                    a.loc)


def _elab_premise(p: ast.Premise, kinds: dict[int, str]) -> ast.Premise:
    if isinstance(p, ast.Atom):
        return _elab_atom(p, kinds)
    if isinstance(p, ast.NegAtom):
        return ast.NegAtom(_elab_atom(p.atom, kinds), p.loc)
    return ast.Unification(_elab_term(p.lhs, kinds),
                           _elab_term(p.rhs, kinds), p.loc)


def check(program: ast.SourceProgram) -> ast.SourceProgram:
    """Type check a desugared program; returns the elaborated program."""
    return Checker(program).check()
