"""Hash-consed ground-term store, substitutions, and ordered unification.

Every term is interned: structurally equal terms share one TermId, so
equality and hashing are integer comparisons.  Substitutions map variable
names to TermIds and only ever hold ground terms.  unify() interleaves
function evaluation with matching, scheduling blocked subterm pairs on the
variables they wait for so total work stays linear in the subterm count.
"""

from __future__ import annotations

import threading
from typing import Callable, Optional

from .errors import StuckFunction, UnificationFailure

TermId = int

# row tags
VAR = "var"
I32 = "i32"
STR = "str"
BOOL = "bool"
CTOR = "ctor"
TUPLE = "tuple"
CALL = "call"


class TermStore:
    """Interning table.  Rows are immutable tuples:
    ('var', name) | ('i32', v) | ('str', s) | ('bool', b)
    | ('ctor', name, (child ids)) | ('tuple', (child ids))
    | ('call', name, (child ids)).

    The miss path takes a lock so concurrent threads in one process stay
    consistent; separate processes keep separate stores and exchange terms
    in encoded form.
    """

    def __init__(self):
        self._table: dict[tuple, int] = {}
        self._rows: list[tuple] = []
        self._ground: list[bool] = []
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._rows)

    def _intern(self, row: tuple, ground: bool) -> TermId:
        tid = self._table.get(row)
        if tid is not None:
            return tid
        with self._lock:
            tid = self._table.get(row)
            if tid is None:
                tid = len(self._rows)
                self._rows.append(row)
                self._ground.append(ground)
                self._table[row] = tid
        return tid

    # constructors -----------------------------------------------------------

    def mk_var(self, name: str) -> TermId:
        return self._intern((VAR, name), False)

    def mk_i32(self, v: int) -> TermId:
        return self._intern((I32, v), True)

    def mk_str(self, s: str) -> TermId:
        return self._intern((STR, s), True)

    def mk_bool(self, b: bool) -> TermId:
        return self._intern((BOOL, b), True)

    def mk_ctor(self, name: str, args: tuple[TermId, ...]) -> TermId:
        ground = all(self._ground[a] for a in args)
        return self._intern((CTOR, name, args), ground)

    def mk_tuple(self, items: tuple[TermId, ...]) -> TermId:
        ground = all(self._ground[i] for i in items)
        return self._intern((TUPLE, items), ground)

    def mk_call(self, name: str, args: tuple[TermId, ...]) -> TermId:
        return self._intern((CALL, name, args), False)

    # observers --------------------------------------------------------------

    def row(self, tid: TermId) -> tuple:
        return self._rows[tid]

    def kind(self, tid: TermId) -> str:
        return self._rows[tid][0]

    def is_ground(self, tid: TermId) -> bool:
        return self._ground[tid]

    def children(self, tid: TermId) -> tuple[TermId, ...]:
        row = self._rows[tid]
        if row[0] in (CTOR, CALL):
            return row[2]
        if row[0] == TUPLE:
            return row[1]
        return ()

    def free_vars(self, tid: TermId) -> set[str]:
        out: set[str] = set()
        stack = [tid]
        while stack:
            t = stack.pop()
            if self._ground[t]:
                continue
            row = self._rows[t]
            if row[0] == VAR:
                out.add(row[1])
            else:
                stack.extend(self.children(t))
        return out

    def first_unbound_var(self, tid: TermId,
                          subst: dict[str, TermId]) -> Optional[str]:
        stack = [tid]
        while stack:
            t = stack.pop()
            if self._ground[t]:
                continue
            row = self._rows[t]
            if row[0] == VAR:
                if row[1] not in subst:
                    return row[1]
            else:
                stack.extend(reversed(self.children(t)))
        return None


# substitution ---------------------------------------------------------------

def apply(store: TermStore, subst: dict[str, TermId], tid: TermId) -> TermId:
    """Replace bound variables throughout; FnCall nodes stay unreduced.
    Iterative post-order so deep terms cannot overflow the stack."""
    if store.is_ground(tid) or not subst:
        return tid
    memo: dict[TermId, TermId] = {}
    stack: list[tuple[TermId, bool]] = [(tid, False)]
    while stack:
        t, ready = stack.pop()
        if t in memo:
            continue
        if store.is_ground(t):
            memo[t] = t
            continue
        row = store.row(t)
        if row[0] == VAR:
            memo[t] = subst.get(row[1], t)
            continue
        kids = store.children(t)
        if not ready:
            stack.append((t, True))
            stack.extend((k, False) for k in kids)
            continue
        new_kids = tuple(memo[k] for k in kids)
        if new_kids == kids:
            memo[t] = t
        elif row[0] == CTOR:
            memo[t] = store.mk_ctor(row[1], new_kids)
        elif row[0] == TUPLE:
            memo[t] = store.mk_tuple(new_kids)
        else:
            memo[t] = store.mk_call(row[1], new_kids)
    return memo[tid]


# unification ------------------------------------------------------------------

class _Pair:
    __slots__ = ("a", "b", "done")

    def __init__(self, a: TermId, b: TermId):
        self.a = a
        self.b = b
        self.done = False


class UnifyStats:
    """Subterm-pair visit counter, exposed for the linearity property."""

    def __init__(self):
        self.visits = 0


Reducer = Callable[[TermId], TermId]


def unify(store: TermStore, a: TermId, b: TermId,
          subst: dict[str, TermId], reducer: Optional[Reducer] = None,
          stats: Optional[UnifyStats] = None) -> dict[str, TermId]:
    """Most general extension of subst making a and b equal after reducing
    function calls.  Calls are reduced exactly when all their variables are
    bound; pairs that cannot progress block on an unbound variable and are
    re-enqueued when it is bound.  Bindings are always ground."""
    s = dict(subst)
    waiting: dict[str, list[_Pair]] = {}
    queue: list[_Pair] = [_Pair(a, b)]
    qi = 0

    def walk(t: TermId) -> TermId:
        row = store.row(t)
        while row[0] == VAR and row[1] in s:
            t = s[row[1]]
            row = store.row(t)
        return t

    def bind(name: str, t: TermId):
        assert store.is_ground(t), "binding must be ground"
        s[name] = t
        for p in waiting.pop(name, ()):
            if not p.done:
                queue.append(p)

    def block(p: _Pair, var: str):
        waiting.setdefault(var, []).append(p)

    def side_ready(t: TermId) -> tuple[TermId, Optional[str]]:
        """Reduce a call side if possible; otherwise name a variable to
        wait for."""
        v = store.first_unbound_var(t, s)
        if v is not None:
            return t, v
        if reducer is None:
            raise StuckFunction(
                "function call met during unification but no reducer "
                "was supplied")
        return reducer(apply(store, s, t)), None

    while qi < len(queue):
        p = queue[qi]
        qi += 1
        if p.done:
            continue
        if stats is not None:
            stats.visits += 1
        ta = walk(p.a)
        tb = walk(p.b)
        p.a, p.b = ta, tb
        if ta == tb and store.is_ground(ta):
            p.done = True
            continue
        ra = store.row(ta)
        rb = store.row(tb)

        if ra[0] == CALL:
            ta, wait = side_ready(ta)
            if wait is not None:
                block(p, wait)
                continue
            p.a = ta
            queue.append(p)
            continue
        if rb[0] == CALL:
            tb, wait = side_ready(tb)
            if wait is not None:
                block(p, wait)
                continue
            p.b = tb
            queue.append(p)
            continue

        if ra[0] == VAR or rb[0] == VAR:
            if rb[0] == VAR and ra[0] != VAR:
                ta, tb = tb, ta
                ra, rb = rb, ra
            # ta is an unbound variable
            if rb[0] == VAR:
                # both unbound: wait for either side to become ground
                block(p, ra[1])
                block(p, rb[1])
                continue
            if store.is_ground(tb):
                bind(ra[1], tb)
                p.done = True
                continue
            wait = store.first_unbound_var(tb, s)
            if wait is not None:
                block(p, wait)
                continue
            # every variable bound: substitute, then reduce leftover calls
            tb = apply(store, s, tb)
            if not store.is_ground(tb):
                tb, _ = side_ready(tb)
            p.b = tb
            queue.append(p)
            continue

        if ra[0] == CTOR and rb[0] == CTOR:
            if ra[1] != rb[1] or len(ra[2]) != len(rb[2]):
                raise UnificationFailure(
                    f"cannot unify {render(store, ta)} with "
                    f"{render(store, tb)}")
            p.done = True
            for ca, cb in zip(ra[2], rb[2]):
                queue.append(_Pair(ca, cb))
            continue
        if ra[0] == TUPLE and rb[0] == TUPLE:
            if len(ra[1]) != len(rb[1]):
                raise UnificationFailure(
                    f"cannot unify {render(store, ta)} with "
                    f"{render(store, tb)}: tuple widths differ")
            p.done = True
            for ca, cb in zip(ra[1], rb[1]):
                queue.append(_Pair(ca, cb))
            continue
        raise UnificationFailure(
            f"cannot unify {render(store, ta)} with {render(store, tb)}")

    stuck: list[_Pair] = []
    seen: set[int] = set()
    for pairs in waiting.values():
        for p in pairs:
            if not p.done and id(p) not in seen:
                seen.add(id(p))
                stuck.append(p)
    if stuck:
        p = stuck[0]
        raise StuckFunction(
            f"unification could not make progress on "
            f"{render(store, p.a)} = {render(store, p.b)}: a call or "
            "variable never became ground (validator should have "
            "rejected this rule)")
    return s


# text form --------------------------------------------------------------------

def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def render(store: TermStore, tid: TermId) -> str:
    """Canonical text: ctor(children,...) with no spaces, decimal i32,
    double-quoted strings, (a,b) tuples, true/false booleans."""
    out: list[str] = []
    stack: list[object] = [tid]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        row = store.row(item)
        tag = row[0]
        if tag == VAR:
            out.append(row[1])
        elif tag == I32:
            out.append(str(row[1]))
        elif tag == STR:
            out.append(f'"{_escape(row[1])}"')
        elif tag == BOOL:
            out.append("true" if row[1] else "false")
        elif tag in (CTOR, CALL):
            kids = row[2]
            if not kids:
                out.append(row[1])
            else:
                out.append(row[1] + "(")
                parts: list[object] = [")"]
                for i, k in enumerate(reversed(kids)):
                    parts.append(k)
                    if i != len(kids) - 1:
                        parts.append(",")
                stack.extend(parts)
        else:  # tuple
            kids = row[1]
            out.append("(")
            parts = [")"]
            for i, k in enumerate(reversed(kids)):
                parts.append(k)
                if i != len(kids) - 1:
                    parts.append(",")
            stack.extend(parts)
    return "".join(out)


# cross-process transport --------------------------------------------------------

def encode(store: TermStore, tid: TermId):
    """Self-contained nested-tuple form, independent of any store.
    Iterative post-order: deep terms must not overflow the stack."""
    memo: dict[TermId, tuple] = {}
    stack: list[tuple[TermId, bool]] = [(tid, False)]
    while stack:
        t, ready = stack.pop()
        if t in memo:
            continue
        row = store.row(t)
        tag = row[0]
        if tag in (VAR, I32, STR, BOOL):
            memo[t] = row
            continue
        kids = store.children(t)
        if not ready:
            stack.append((t, True))
            stack.extend((k, False) for k in kids)
            continue
        enc_kids = tuple(memo[k] for k in kids)
        if tag == TUPLE:
            memo[t] = (TUPLE, enc_kids)
        else:
            memo[t] = (tag, row[1], enc_kids)
    return memo[tid]


def decode(store: TermStore, enc) -> TermId:
    memo: dict[int, TermId] = {}
    stack: list[tuple[tuple, bool]] = [(enc, False)]
    while stack:
        e, ready = stack.pop()
        if id(e) in memo:
            continue
        tag = e[0]
        if tag == VAR:
            memo[id(e)] = store.mk_var(e[1])
            continue
        if tag == I32:
            memo[id(e)] = store.mk_i32(e[1])
            continue
        if tag == STR:
            memo[id(e)] = store.mk_str(e[1])
            continue
        if tag == BOOL:
            memo[id(e)] = store.mk_bool(e[1])
            continue
        kids = e[1] if tag == TUPLE else e[2]
        if not ready:
            stack.append((e, True))
            stack.extend((k, False) for k in kids)
            continue
        kid_ids = tuple(memo[id(k)] for k in kids)
        if tag == TUPLE:
            memo[id(e)] = store.mk_tuple(kid_ids)
        elif tag == CTOR:
            memo[id(e)] = store.mk_ctor(e[1], kid_ids)
        else:
            memo[id(e)] = store.mk_call(e[1], kid_ids)
    return memo[id(enc)]
