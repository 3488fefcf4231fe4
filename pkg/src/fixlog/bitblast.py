"""Built-in satisfiability backend: bit-blasting bool_exp terms to CNF.

Formulas are constant-folded first, then lowered to a hash-consed gate
circuit (Tseitin encoding): ripple-carry adders, a shift-add multiplier,
and a restoring divider whose semantics on zero divisors coincide with the
SMT-LIB bvudiv/bvurem conventions.  Satisfiable verdicts are self-checked
by evaluating the formula under the extracted model.
"""

from __future__ import annotations

from . import terms
from .errors import TranslationError
from .sat import CdclSolver

WIDTH = 32
MASK = (1 << WIDTH) - 1

BOOL_OPS = {"true", "false", "not", "and", "or",
            "bv32_eq", "bv32_slt", "bv32_sgt"}
BV_OPS = {"bv32_const", "bv32_sym", "bv32_neg", "bv32_add", "bv32_sub",
          "bv32_div", "bv32_mul", "bv32_rem"}


def _to_signed(u: int) -> int:
    u &= MASK
    return u - (1 << WIDTH) if u >> (WIDTH - 1) else u


def _to_unsigned(s: int) -> int:
    return s & MASK


def _sdiv(a: int, b: int) -> int:
    """SMT-LIB bvsdiv on signed ints (division by zero follows bvudiv)."""
    if b == 0:
        return -1 if a >= 0 else 1
    q = abs(a) // abs(b)
    return _to_signed(-q if (a < 0) != (b < 0) else q)


def _srem(a: int, b: int) -> int:
    """SMT-LIB bvsrem: remainder takes the dividend's sign."""
    if b == 0:
        return a
    r = abs(a) % abs(b)
    return _to_signed(-r if a < 0 else r)


def _ctor(store: terms.TermStore, tid: terms.TermId) -> tuple:
    row = store.row(tid)
    if row[0] != terms.CTOR:
        raise TranslationError(
            f"not a formula term: {terms.render(store, tid)}")
    return row


# ---------------------------------------------------------------------------
# direct evaluation (used for constant folding checks and model self-check)

def eval_formula(store: terms.TermStore, tid: terms.TermId,
                 env: dict[str, int], default: int | None = None):
    """Evaluate a formula under an assignment of symbol names to signed
    32-bit ints.  Returns bool for bool_exp nodes, signed int for bv32.

    Symbols absent from env evaluate to `default` when one is given;
    otherwise they raise.  A solver model only covers symbols that
    survive constant folding, and any value extends such a model."""
    memo: dict[int, object] = {}
    stack = [(tid, False)]
    while stack:
        t, ready = stack.pop()
        if t in memo:
            continue
        row = _ctor(store, t)
        name, args = row[1], row[2]
        if not ready:
            if name == "bv32_const":
                memo[t] = _to_signed(store.row(args[0])[1])
            elif name == "bv32_sym":
                sym = store.row(args[0])[1]
                if sym not in env:
                    if default is None:
                        raise TranslationError(f"symbol {sym} has no value")
                    memo[t] = _to_signed(default)
                else:
                    memo[t] = _to_signed(env[sym])
            elif name == "true":
                memo[t] = True
            elif name == "false":
                memo[t] = False
            else:
                stack.append((t, True))
                stack.extend((a, False) for a in args)
            continue
        vals = [memo[a] for a in args]
        if name == "not":
            memo[t] = not vals[0]
        elif name == "and":
            memo[t] = vals[0] and vals[1]
        elif name == "or":
            memo[t] = vals[0] or vals[1]
        elif name == "bv32_eq":
            memo[t] = vals[0] == vals[1]
        elif name == "bv32_slt":
            memo[t] = vals[0] < vals[1]
        elif name == "bv32_sgt":
            memo[t] = vals[0] > vals[1]
        elif name == "bv32_neg":
            memo[t] = _to_signed(-vals[0])
        elif name == "bv32_add":
            memo[t] = _to_signed(vals[0] + vals[1])
        elif name == "bv32_sub":
            memo[t] = _to_signed(vals[0] - vals[1])
        elif name == "bv32_mul":
            memo[t] = _to_signed(vals[0] * vals[1])
        elif name == "bv32_div":
            memo[t] = _sdiv(vals[0], vals[1])
        elif name == "bv32_rem":
            memo[t] = _srem(vals[0], vals[1])
        else:
            raise TranslationError(f"unknown formula constructor {name}")
    return memo[tid]


# ---------------------------------------------------------------------------
# constant folding

def fold(store: terms.TermStore, tid: terms.TermId) -> terms.TermId:
    """Bottom-up folding: constant subformulas collapse, and/or/not
    simplify against constant sides."""
    TRUE = store.mk_ctor("true", ())
    FALSE = store.mk_ctor("false", ())

    def const(t):
        row = store.row(t)
        if row[0] == terms.CTOR and row[1] == "bv32_const":
            return _to_signed(store.row(row[2][0])[1])
        return None

    memo: dict[int, int] = {}
    stack = [(tid, False)]
    while stack:
        t, ready = stack.pop()
        if t in memo:
            continue
        row = _ctor(store, t)
        name, args = row[1], row[2]
        if name in ("true", "false", "bv32_sym", "bv32_const"):
            memo[t] = t
            continue
        if not ready:
            stack.append((t, True))
            stack.extend((a, False) for a in args)
            continue
        vs = [memo[a] for a in args]
        out = None
        if name == "not":
            if vs[0] == TRUE:
                out = FALSE
            elif vs[0] == FALSE:
                out = TRUE
        elif name == "and":
            if FALSE in vs:
                out = FALSE
            elif vs[0] == TRUE:
                out = vs[1]
            elif vs[1] == TRUE:
                out = vs[0]
        elif name == "or":
            if TRUE in vs:
                out = TRUE
            elif vs[0] == FALSE:
                out = vs[1]
            elif vs[1] == FALSE:
                out = vs[0]
        elif name in ("bv32_eq", "bv32_slt", "bv32_sgt"):
            ca, cb = const(vs[0]), const(vs[1])
            if ca is not None and cb is not None:
                good = (ca == cb if name == "bv32_eq"
                        else ca < cb if name == "bv32_slt" else ca > cb)
                out = TRUE if good else FALSE
            elif name == "bv32_eq" and vs[0] == vs[1]:
                out = TRUE
        elif name == "bv32_neg":
            ca = const(vs[0])
            if ca is not None:
                out = _mk_const(store, -ca)
        else:  # binary bv ops
            ca, cb = const(vs[0]), const(vs[1])
            if ca is not None and cb is not None:
                if name == "bv32_add":
                    out = _mk_const(store, ca + cb)
                elif name == "bv32_sub":
                    out = _mk_const(store, ca - cb)
                elif name == "bv32_mul":
                    out = _mk_const(store, ca * cb)
                elif name == "bv32_div":
                    out = _mk_const(store, _sdiv(ca, cb))
                elif name == "bv32_rem":
                    out = _mk_const(store, _srem(ca, cb))
        if out is None:
            out = t if tuple(vs) == args else store.mk_ctor(name, tuple(vs))
        memo[t] = out
    return memo[tid]


def _mk_const(store: terms.TermStore, v: int) -> terms.TermId:
    return store.mk_ctor("bv32_const", (store.mk_i32(_to_signed(v)),))


# ---------------------------------------------------------------------------
# circuits

class Circuit:
    """CNF builder with hash-consed gates.  Literals are solver literals;
    TRUE/FALSE are the two phases of a dedicated constant variable."""

    def __init__(self):
        self.solver = CdclSolver()
        self.TRUE = self.solver.new_var()
        self.solver.add_clause([self.TRUE])
        self.FALSE = -self.TRUE
        self._and: dict[tuple[int, int], int] = {}
        self._xor: dict[tuple[int, int], int] = {}

    def new_lit(self) -> int:
        return self.solver.new_var()

    def and2(self, a: int, b: int) -> int:
        if a == self.FALSE or b == self.FALSE or a == -b:
            return self.FALSE
        if a == self.TRUE or a == b:
            return b
        if b == self.TRUE:
            return a
        key = (a, b) if a < b else (b, a)
        g = self._and.get(key)
        if g is None:
            g = self.new_lit()
            self.solver.add_clause([-g, a])
            self.solver.add_clause([-g, b])
            self.solver.add_clause([g, -a, -b])
            self._and[key] = g
        return g

    def or2(self, a: int, b: int) -> int:
        return -self.and2(-a, -b)

    def xor2(self, a: int, b: int) -> int:
        if a == self.FALSE:
            return b
        if b == self.FALSE:
            return a
        if a == self.TRUE:
            return -b
        if b == self.TRUE:
            return -a
        if a == b:
            return self.FALSE
        if a == -b:
            return self.TRUE
        neg = (a < 0) != (b < 0)
        key = (abs(a), abs(b)) if abs(a) < abs(b) else (abs(b), abs(a))
        g = self._xor.get(key)
        if g is None:
            x, y = key
            g = self.new_lit()
            self.solver.add_clause([-g, x, y])
            self.solver.add_clause([-g, -x, -y])
            self.solver.add_clause([g, -x, y])
            self.solver.add_clause([g, x, -y])
            self._xor[key] = g
        return -g if neg else g

    def iff2(self, a: int, b: int) -> int:
        return -self.xor2(a, b)

    def mux(self, sel: int, then_: int, else_: int) -> int:
        return self.or2(self.and2(sel, then_), self.and2(-sel, else_))

    # vector helpers -----------------------------------------------------------

    def const_vec(self, v: int, width: int = WIDTH) -> tuple[int, ...]:
        v &= (1 << width) - 1
        return tuple(self.TRUE if (v >> i) & 1 else self.FALSE
                     for i in range(width))

    def fresh_vec(self, width: int = WIDTH) -> tuple[int, ...]:
        return tuple(self.new_lit() for _ in range(width))

    def add_vec(self, a, b, cin: int):
        """Ripple-carry addition; returns (sum bits, carry out)."""
        out = []
        c = cin
        for ai, bi in zip(a, b):
            axb = self.xor2(ai, bi)
            out.append(self.xor2(axb, c))
            c = self.or2(self.and2(ai, bi), self.and2(axb, c))
        return tuple(out), c

    def not_vec(self, a):
        return tuple(-x for x in a)

    def sub_vec(self, a, b):
        """a - b; carry out means no borrow (a >= b unsigned)."""
        return self.add_vec(a, self.not_vec(b), self.TRUE)

    def neg_vec(self, a):
        s, _ = self.add_vec(self.not_vec(a), self.const_vec(0, len(a)),
                            self.TRUE)
        return s

    def mux_vec(self, sel: int, a, b):
        return tuple(self.mux(sel, x, y) for x, y in zip(a, b))

    def eq_vec(self, a, b) -> int:
        acc = self.TRUE
        for x, y in zip(a, b):
            acc = self.and2(acc, self.iff2(x, y))
        return acc

    def ult_vec(self, a, b) -> int:
        _, carry = self.sub_vec(a, b)
        return -carry

    def slt_vec(self, a, b) -> int:
        sa, sb = a[-1], b[-1]
        return self.or2(self.and2(sa, -sb),
                        self.and2(self.iff2(sa, sb), self.ult_vec(a, b)))

    def mul_vec(self, a, b):
        acc = self.const_vec(0, len(a))
        for i, bi in enumerate(b):
            if bi == self.FALSE:
                continue
            partial = tuple(
                self.FALSE if j < i else self.and2(bi, a[j - i])
                for j in range(len(a)))
            acc, _ = self.add_vec(acc, partial, self.FALSE)
        return acc

    def udivrem_vec(self, a, b):
        """Restoring division.  With a zero divisor every trial subtraction
        succeeds, so the quotient is all ones and the remainder is the
        dividend — exactly the SMT-LIB bvudiv/bvurem convention."""
        width = len(a)
        ext = width + 1
        r = self.const_vec(0, ext)
        b_ext = tuple(b) + (self.FALSE,)
        q = [self.FALSE] * width
        for i in range(width - 1, -1, -1):
            r = (a[i],) + r[:ext - 1]
            diff, carry = self.sub_vec(r, b_ext)
            q[i] = carry  # no borrow: divisor fits
            r = self.mux_vec(carry, diff, r)
        return tuple(q), r[:width]

    def sdivrem_vec(self, a, b):
        sa, sb = a[-1], b[-1]
        abs_a = self.mux_vec(sa, self.neg_vec(a), a)
        abs_b = self.mux_vec(sb, self.neg_vec(b), b)
        q, r = self.udivrem_vec(abs_a, abs_b)
        sdiv = self.mux_vec(self.xor2(sa, sb), self.neg_vec(q), q)
        srem = self.mux_vec(sa, self.neg_vec(r), r)
        return sdiv, srem


# ---------------------------------------------------------------------------
# translation and solving

class Blaster:
    def __init__(self, store: terms.TermStore):
        self.store = store
        self.circuit = Circuit()
        self.symbols: dict[str, tuple[int, ...]] = {}
        self._bool: dict[int, int] = {}
        self._bv: dict[int, tuple[int, ...]] = {}

    def bool_lit(self, tid: terms.TermId) -> int:
        self._translate(tid)
        return self._bool[tid]

    def _sym_vec(self, name: str) -> tuple[int, ...]:
        vec = self.symbols.get(name)
        if vec is None:
            vec = self.circuit.fresh_vec()
            self.symbols[name] = vec
        return vec

    def _translate(self, root: terms.TermId):
        c = self.circuit
        store = self.store
        stack = [(root, False)]
        while stack:
            t, ready = stack.pop()
            if t in self._bool or t in self._bv:
                continue
            row = _ctor(store, t)
            name, args = row[1], row[2]
            if name == "true":
                self._bool[t] = c.TRUE
                continue
            if name == "false":
                self._bool[t] = c.FALSE
                continue
            if name == "bv32_const":
                self._bv[t] = c.const_vec(store.row(args[0])[1])
                continue
            if name == "bv32_sym":
                self._bv[t] = self._sym_vec(store.row(args[0])[1])
                continue
            if name not in BOOL_OPS and name not in BV_OPS:
                raise TranslationError(
                    f"constructor {name} is not part of a formula")
            if not ready:
                stack.append((t, True))
                stack.extend((a, False) for a in args)
                continue
            if name == "not":
                self._bool[t] = -self._bool[args[0]]
            elif name == "and":
                self._bool[t] = c.and2(self._bool[args[0]],
                                       self._bool[args[1]])
            elif name == "or":
                self._bool[t] = c.or2(self._bool[args[0]],
                                      self._bool[args[1]])
            elif name == "bv32_eq":
                self._bool[t] = c.eq_vec(self._bv[args[0]],
                                         self._bv[args[1]])
            elif name == "bv32_slt":
                self._bool[t] = c.slt_vec(self._bv[args[0]],
                                          self._bv[args[1]])
            elif name == "bv32_sgt":
                self._bool[t] = c.slt_vec(self._bv[args[1]],
                                          self._bv[args[0]])
            elif name == "bv32_neg":
                self._bv[t] = c.neg_vec(self._bv[args[0]])
            elif name == "bv32_add":
                self._bv[t], _ = c.add_vec(self._bv[args[0]],
                                           self._bv[args[1]], c.FALSE)
            elif name == "bv32_sub":
                self._bv[t], _ = c.sub_vec(self._bv[args[0]],
                                           self._bv[args[1]])
            elif name == "bv32_mul":
                self._bv[t] = c.mul_vec(self._bv[args[0]],
                                        self._bv[args[1]])
            elif name == "bv32_div":
                self._bv[t], _ = c.sdivrem_vec(self._bv[args[0]],
                                               self._bv[args[1]])
            elif name == "bv32_rem":
                _, self._bv[t] = c.sdivrem_vec(self._bv[args[0]],
                                               self._bv[args[1]])
            else:
                raise TranslationError(f"unhandled constructor {name}")


def check_sat(store: terms.TermStore, tid: terms.TermId,
              conflict_budget: int = 200_000):
    """Decide satisfiability of a ground bool_exp term.

    Returns ("sat", {symbol: signed int}) or ("unsat", None).  Raises
    ResourceLimit when the conflict budget is exhausted.  Satisfiable
    verdicts are re-checked against the direct evaluator.
    """
    folded = fold(store, tid)
    row = _ctor(store, folded)
    if row[1] == "true":
        return "sat", {}
    if row[1] == "false":
        return "unsat", None

    blaster = Blaster(store)
    top = blaster.bool_lit(folded)
    solver = blaster.circuit.solver
    solver.add_clause([top])
    if not solver.solve(conflict_budget):
        return "unsat", None
    bits = solver.model()
    model: dict[str, int] = {}
    for sym, vec in blaster.symbols.items():
        v = 0
        for i, lit in enumerate(vec):
            if (bits[abs(lit)] if lit > 0 else not bits[abs(lit)]):
                v |= 1 << i
        model[sym] = _to_signed(v)
    assert eval_formula(store, tid, model, default=0) is True, \
        "bit-blasting produced a model the evaluator rejects"
    return "sat", model
