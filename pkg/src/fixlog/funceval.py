"""Interpreter for the pure functional fragment.

Function bodies are compiled to a tiny IR whose leaves are interned term
templates; the evaluator is a defunctionalized stack machine, so deep
recursion in user functions cannot overflow the Python stack.  Every call
consumes ground arguments and produces a ground term.  Results are memoized
in a bounded call cache (sound because functions are pure).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import ast, terms
from .errors import (
    DivisionByZero,
    EvalError,
    MatchFailure,
    NonLinearPattern,
    StepLimitExceeded,
    UnsupportedOperation,
)

DEFAULT_STEP_BUDGET = 10 ** 8
DEFAULT_CACHE_ENTRIES = 1 << 20


# compiled bodies -------------------------------------------------------------

@dataclass(frozen=True)
class Ret:
    template: terms.TermId


@dataclass(frozen=True)
class MatchIR:
    scrutinee: "IR"
    branches: tuple[tuple[terms.TermId, "IR"], ...]
    owner: str


IR = Union[Ret, MatchIR]


@dataclass(frozen=True)
class CompiledFun:
    name: str
    params: tuple[str, ...]
    body: IR


def _intern_pattern(store: terms.TermStore, t: ast.TermAst,
                    seen: set[str], owner: str) -> terms.TermId:
    if isinstance(t, ast.Var):
        if t.name in seen:
            raise NonLinearPattern(
                f"variable {t.name} occurs twice in one pattern of "
                f"function {owner}", t.loc)
        seen.add(t.name)
        return store.mk_var(t.name)
    if isinstance(t, ast.IntLit):
        return store.mk_i32(t.value)
    if isinstance(t, ast.StrLit):
        return store.mk_str(t.value)
    if isinstance(t, ast.BoolLit):
        return store.mk_bool(t.value)
    if isinstance(t, ast.CtorApp):
        return store.mk_ctor(t.name, tuple(
            _intern_pattern(store, a, seen, owner) for a in t.args))
    if isinstance(t, ast.TupleTerm):
        return store.mk_tuple(tuple(
            _intern_pattern(store, a, seen, owner) for a in t.items))
    raise EvalError(f"invalid pattern in function {owner}",
                    getattr(t, "loc", None))


def intern_template(store: terms.TermStore, t: ast.TermAst) -> terms.TermId:
    """Body terms become store terms with Var leaves; apply() instantiates
    them against the environment at run time."""
    if isinstance(t, ast.Var):
        return store.mk_var(t.name)
    if isinstance(t, ast.IntLit):
        return store.mk_i32(t.value)
    if isinstance(t, ast.StrLit):
        return store.mk_str(t.value)
    if isinstance(t, ast.BoolLit):
        return store.mk_bool(t.value)
    if isinstance(t, ast.CtorApp):
        return store.mk_ctor(t.name, tuple(intern_template(store, a)
                                           for a in t.args))
    if isinstance(t, ast.TupleTerm):
        return store.mk_tuple(tuple(intern_template(store, a)
                                    for a in t.items))
    if isinstance(t, ast.FnCall):
        return store.mk_call(t.name, tuple(intern_template(store, a)
                                           for a in t.args))
    raise AssertionError(t)


def _compile_expr(store: terms.TermStore, e: ast.Expr, owner: str) -> IR:
    if isinstance(e, ast.TermExpr):
        return Ret(intern_template(store, e.term))
    if isinstance(e, ast.Match):
        if isinstance(e.scrutinee, (ast.TermExpr, ast.Match, ast.Let,
                                    ast.If)):
            scrut = _compile_expr(store, e.scrutinee, owner)
        else:
            scrut = Ret(intern_template(store, e.scrutinee))
        branches = []
        for pat, body in e.branches:
            seen: set[str] = set()
            pat_tid = _intern_pattern(store, pat, seen, owner)
            branches.append((pat_tid, _compile_expr(store, body, owner)))
        return MatchIR(scrut, tuple(branches), owner)
    raise AssertionError(f"expression not desugared: {e!r}")


class FunctionTable:
    """User functions compiled against one term store."""

    def __init__(self, funcs: dict[str, CompiledFun]):
        self.funcs = funcs

    @staticmethod
    def build(program: ast.SourceProgram,
              store: terms.TermStore) -> "FunctionTable":
        funcs: dict[str, CompiledFun] = {}
        for fd in program.fun_defs:
            body = _compile_expr(store, fd.body, fd.name)
            funcs[fd.name] = CompiledFun(fd.name, fd.params, body)
        return FunctionTable(funcs)


# pattern matching -------------------------------------------------------------

def match_pattern(store: terms.TermStore, pattern: terms.TermId,
                  value: terms.TermId) -> Optional[dict[str, terms.TermId]]:
    """One-way match of a linear pattern against a ground value."""
    bindings: dict[str, terms.TermId] = {}
    stack = [(pattern, value)]
    while stack:
        p, v = stack.pop()
        if p == v:
            continue
        row = store.row(p)
        tag = row[0]
        if tag == terms.VAR:
            bindings[row[1]] = v
            continue
        vrow = store.row(v)
        if tag != vrow[0]:
            return None
        if tag == terms.CTOR:
            if row[1] != vrow[1] or len(row[2]) != len(vrow[2]):
                return None
            stack.extend(zip(row[2], vrow[2]))
        elif tag == terms.TUPLE:
            if len(row[1]) != len(vrow[1]):
                return None
            stack.extend(zip(row[1], vrow[1]))
        else:
            # primitives not interned equal
            return None
    return bindings


# builtin implementations --------------------------------------------------------

def _wrap(v: int) -> int:
    return ((v + 2 ** 31) % 2 ** 32) - 2 ** 31


def _int(store, tid) -> int:
    row = store.row(tid)
    if row[0] != terms.I32:
        raise EvalError(f"expected an i32, got {terms.render(store, tid)}")
    return row[1]


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


class Evaluator:
    """Reduces ground calls to ground terms.

    is_sat_fn plugs in the satisfiability backend; interpolant is declared
    but has no implementation and always raises.
    """

    def __init__(self, store: terms.TermStore, table: FunctionTable,
                 step_budget: int = DEFAULT_STEP_BUDGET,
                 cache_entries: int = DEFAULT_CACHE_ENTRIES,
                 is_sat_fn: Optional[Callable[[terms.TermId], bool]] = None):
        self.store = store
        self.table = table
        self.step_budget = step_budget
        self.cache_entries = cache_entries
        self.is_sat_fn = is_sat_fn
        self.cache: dict[terms.TermId, terms.TermId] = {}
        self.cache_hits = 0
        self.cache_misses = 0

    # builtin dispatch -------------------------------------------------------

    def _builtin(self, name: str, args: list[terms.TermId]) \
            -> Optional[terms.TermId]:
        st = self.store
        if name == "+":
            return st.mk_i32(_wrap(_int(st, args[0]) + _int(st, args[1])))
        if name == "-":
            return st.mk_i32(_wrap(_int(st, args[0]) - _int(st, args[1])))
        if name == "*":
            return st.mk_i32(_wrap(_int(st, args[0]) * _int(st, args[1])))
        if name == "/":
            a, b = _int(st, args[0]), _int(st, args[1])
            if b == 0:
                raise DivisionByZero(f"{a} / 0")
            return st.mk_i32(_wrap(_trunc_div(a, b)))
        if name == "%":
            a, b = _int(st, args[0]), _int(st, args[1])
            if b == 0:
                raise DivisionByZero(f"{a} % 0")
            return st.mk_i32(_wrap(a - b * _trunc_div(a, b)))
        if name == "==":
            # hash-consing makes this constant time
            return st.mk_bool(args[0] == args[1])
        if name == "<":
            return st.mk_bool(_int(st, args[0]) < _int(st, args[1]))
        if name == "<=":
            return st.mk_bool(_int(st, args[0]) <= _int(st, args[1]))
        if name == ">":
            return st.mk_bool(_int(st, args[0]) > _int(st, args[1]))
        if name == ">=":
            return st.mk_bool(_int(st, args[0]) >= _int(st, args[1]))
        if name == "is_sat":
            if self.is_sat_fn is None:
                raise UnsupportedOperation(
                    "is_sat called without a solver backend")
            return st.mk_bool(self.is_sat_fn(args[0]))
        if name == "interpolant":
            raise UnsupportedOperation(
                "interpolant is declared but not implemented")
        if name == "get":
            key, m = args
            while True:
                row = st.row(m)
                if row[0] == terms.CTOR and row[1] == "mcons":
                    k, v, rest = row[2]
                    if k == key:
                        return st.mk_ctor("some", (v,))
                    m = rest
                elif row[0] == terms.CTOR and row[1] == "mnil":
                    return st.mk_ctor("none", ())
                else:
                    raise EvalError(
                        f"get applied to a non-map term "
                        f"{terms.render(st, m)}")
        if name == "put":
            key, val, m = args
            return st.mk_ctor("mcons", (key, val, m))
        if name == "str_cat":
            ra, rb = st.row(args[0]), st.row(args[1])
            if ra[0] != terms.STR or rb[0] != terms.STR:
                raise EvalError("str_cat expects two strings")
            return st.mk_str(ra[1] + rb[1])
        if name == "to_string":
            return st.mk_str(str(_int(st, args[0])))
        return None

    # the machine ------------------------------------------------------------

    def reduce(self, call: terms.TermId) -> terms.TermId:
        """Reduce a FnCall with ground arguments to a ground term."""
        return self.eval_ground(call)

    def eval_ground(self, tid: terms.TermId) -> terms.TermId:
        """Fully reduce any var-free term (calls may nest anywhere)."""
        st = self.store
        if st.is_ground(tid):
            return tid
        values: list[terms.TermId] = []
        control: list[tuple] = [("G", tid)]
        steps = 0
        budget = self.step_budget
        while control:
            steps += 1
            if steps > budget:
                raise StepLimitExceeded(
                    f"function evaluation exceeded {budget} steps")
            ins = control.pop()
            op = ins[0]

            if op == "G":
                t = ins[1]
                if st.is_ground(t):
                    values.append(t)
                    continue
                row = st.row(t)
                tag = row[0]
                if tag == terms.CALL:
                    control.append(("invoke", row[1], len(row[2])))
                    for a in reversed(row[2]):
                        control.append(("G", a))
                elif tag == terms.CTOR:
                    control.append(("mk", "ctor", row[1], len(row[2])))
                    for a in reversed(row[2]):
                        control.append(("G", a))
                elif tag == terms.TUPLE:
                    control.append(("mk", "tuple", None, len(row[1])))
                    for a in reversed(row[1]):
                        control.append(("G", a))
                else:
                    raise EvalError(
                        f"cannot evaluate non-ground term "
                        f"{terms.render(st, t)}")

            elif op == "mk":
                _, what, name, k = ins
                kids = tuple(values[len(values) - k:]) if k else ()
                del values[len(values) - k:]
                values.append(st.mk_ctor(name, kids) if what == "ctor"
                              else st.mk_tuple(kids))

            elif op == "invoke":
                _, name, k = ins
                args = values[len(values) - k:]
                del values[len(values) - k:]
                r = self._builtin(name, args)
                if r is not None:
                    values.append(r)
                    continue
                fn = self.table.funcs.get(name)
                if fn is None:
                    raise EvalError(f"call to undefined function {name}")
                key = st.mk_call(name, tuple(args))
                hit = self.cache.get(key)
                if hit is not None:
                    self.cache_hits += 1
                    values.append(hit)
                    continue
                self.cache_misses += 1
                env = dict(zip(fn.params, args))
                control.append(("memo", key))
                control.append(("e", fn.body, env))

            elif op == "e":
                _, ir, env = ins
                if type(ir) is Ret:
                    t = terms.apply(st, env, ir.template)
                    if st.is_ground(t):
                        values.append(t)
                    else:
                        control.append(("G", t))
                else:
                    control.append(("match", ir, env))
                    control.append(("e", ir.scrutinee, env))

            elif op == "match":
                _, ir, env = ins
                v = values.pop()
                for pat, body in ir.branches:
                    m = match_pattern(st, pat, v)
                    if m is not None:
                        env2 = {**env, **m} if m else env
                        control.append(("e", body, env2))
                        break
                else:
                    raise MatchFailure(
                        f"no branch of function {ir.owner} matches "
                        f"{terms.render(st, v)}")

            else:  # memo
                result = values[-1]
                if len(self.cache) < self.cache_entries:
                    self.cache[ins[1]] = result

        assert len(values) == 1
        return values[0]

    def reducer(self) -> Callable[[terms.TermId], terms.TermId]:
        """The hook unify() uses to reduce call subterms."""
        return self.eval_ground
