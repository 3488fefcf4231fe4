"""Reference interpreter for the register-language datasets.

Walks the control flow graph with an explicit worklist instead of a logic
fixpoint.  Semantics mirror the relational encoding exactly: one fuel
unit per branch decision (program entry and either side of a conditional
jump) with straight-line steps free, forking at conditional jumps with
satisfiability pruning, fresh symbols named after the node and a
per-path counter, stores as association lists with shadowing.  States
are rendered to the same canonical text the engine dumps, so results
compare byte for byte.

Terms are plain nested values: int, str, ("#tuple", a, b, ...), and
(ctor_name, args...).
"""

from __future__ import annotations

import dataclasses
from collections import deque
from pathlib import Path
from typing import Callable, Optional


class OracleError(Exception):
    pass


# term text ------------------------------------------------------------------


def render(t) -> str:
    if isinstance(t, int):
        return str(t)
    if isinstance(t, str):
        return '"' + t.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if t[0] == "#tuple":
        return "(" + ",".join(render(a) for a in t[1:]) + ")"
    if len(t) == 1:
        return t[0]
    return t[0] + "(" + ",".join(render(a) for a in t[1:]) + ")"


def _tokenize(text: str) -> list:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "(),":
            toks.append(c)
            i += 1
        elif c == '"':
            i += 1
            buf = []
            while i < n and text[i] != '"':
                if text[i] == "\\":
                    i += 1
                    if i >= n or text[i] not in '"\\':
                        raise OracleError(f"bad escape in {text!r}")
                buf.append(text[i])
                i += 1
            if i >= n:
                raise OracleError(f"unterminated string in {text!r}")
            toks.append(("str", "".join(buf)))
            i += 1
        elif c == "-" or c.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j])))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j]))
            i = j
        else:
            raise OracleError(f"bad character {c!r} in {text!r}")
    return toks


def parse_term(text: str):
    """Parse one ground term in canonical text form."""
    toks = _tokenize(text)
    pos = 0

    def term():
        nonlocal pos
        if pos >= len(toks):
            raise OracleError(f"truncated term {text!r}")
        tok = toks[pos]
        if tok == "(":
            pos += 1
            parts = [term()]
            while pos < len(toks) and toks[pos] == ",":
                pos += 1
                parts.append(term())
            expect(")")
            return ("#tuple", *parts)
        if not isinstance(tok, tuple):
            raise OracleError(f"unexpected {tok!r} in {text!r}")
        pos += 1
        if tok[0] in ("str", "int"):
            return tok[1]
        tok = tok[1]
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            args = [term()]
            while toks[pos] == ",":
                pos += 1
                args.append(term())
            expect(")")
            return (tok, *args)
        return (tok,)

    def expect(tok):
        nonlocal pos
        if pos >= len(toks) or toks[pos] != tok:
            raise OracleError(f"expected {tok!r} in {text!r}")
        pos += 1

    out = term()
    if pos != len(toks):
        raise OracleError(f"trailing tokens in {text!r}")
    return out


# program loading ------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class RegisterProgram:
    stmt: dict
    fall: dict
    entry: int
    init_store: tuple
    init_fuel: int


def _rows(path: Path) -> list[list[str]]:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(line.split("\t"))
    return rows


def load_program(data_dir: str | Path) -> RegisterProgram:
    d = Path(data_dir)
    stmt = {}
    for node, inst in _rows(d / "stmt.tsv"):
        stmt[int(node)] = parse_term(inst)
    fall = {}
    for node, succ in _rows(d / "fall_thru_succ.tsv"):
        fall[int(node)] = int(succ)
    starts = _rows(d / "start.tsv")
    if len(starts) != 1:
        raise OracleError(f"expected one start fact, found {len(starts)}")
    entry, store = starts[0]
    fuels = _rows(d / "init_fuel.tsv")
    if len(fuels) != 1:
        raise OracleError(f"expected one init_fuel fact, found {len(fuels)}")
    return RegisterProgram(stmt, fall, int(entry), parse_term(store),
                           int(fuels[0][0]))


# semantics ------------------------------------------------------------------


def _get(store, key):
    while store[0] == "mcons":
        if store[1] == key:
            return store[2]
        store = store[3]
    return None


def _read(store, reg: str):
    val = _get(store, reg)
    if val is None:
        raise OracleError(f"register {reg!r} read before write")
    return val


_COND = {
    "cond_eq": lambda a, b: ("bv32_eq", a, b),
    "cond_ne": lambda a, b: ("not", ("bv32_eq", a, b)),
    "cond_lt": lambda a, b: ("bv32_slt", a, b),
    "cond_le": lambda a, b: ("not", ("bv32_sgt", a, b)),
    "cond_gt": lambda a, b: ("bv32_sgt", a, b),
    "cond_ge": lambda a, b: ("not", ("bv32_slt", a, b)),
}

_NEGATE = {
    "cond_eq": "cond_ne", "cond_ne": "cond_eq",
    "cond_lt": "cond_ge", "cond_le": "cond_gt",
    "cond_gt": "cond_le", "cond_ge": "cond_lt",
}

_BINOP = {"inst_add": "bv32_add", "inst_sub": "bv32_sub",
          "inst_mul": "bv32_mul"}


def _add_cond(cond: str, reg1: str, reg2: str, state):
    store, cons, count, fuel = state
    c = _COND[cond](_read(store, reg1), _read(store, reg2))
    return (store, ("and", c, cons), count, fuel)


def _set_reg(state, reg: str, val):
    store, cons, count, fuel = state
    return (("mcons", reg, val, store), cons, count, fuel)


@dataclasses.dataclass(frozen=True)
class OracleResult:
    reach: frozenset
    failed: frozenset

    def reach_counts(self) -> dict:
        counts: dict = {}
        for node, _ in self.reach:
            counts[node] = counts.get(node, 0) + 1
        return counts


def run(prog: RegisterProgram, is_sat: Callable[[tuple], bool],
        fuel: Optional[int] = None) -> OracleResult:
    """Execute to exhaustion and collect (node, state text) pairs."""
    if fuel is None:
        fuel = prog.init_fuel
    reach = set()
    failed = set()
    todo = deque([(prog.entry, (prog.init_store, ("true",), 0, fuel))])
    while todo:
        node, state = todo.popleft()
        if state[3] <= 0:
            continue
        state = (state[0], state[1], state[2], state[3] - 1)
        # walk the straight-line segment; only a jump ends it
        while True:
            key = (node, render(("#tuple", *state)))
            if key in reach:
                break
            reach.add(key)
            inst = prog.stmt.get(node)
            if inst is None:
                break
            op = inst[0]
            if op == "inst_fail":
                failed.add(key)
                break
            if op == "inst_jmp":
                _, cond, reg1, reg2, target = inst
                taken = _add_cond(cond[0], reg1, reg2, state)
                if is_sat(taken[1]):
                    todo.append((target, taken))
                succ = prog.fall.get(node)
                if succ is not None:
                    fall = _add_cond(_NEGATE[cond[0]], reg1, reg2, state)
                    if is_sat(fall[1]):
                        todo.append((succ, fall))
                break
            succ = prog.fall.get(node)
            if succ is None:
                break
            if op == "inst_nop":
                pass
            elif op == "inst_mov":
                state = _set_reg(state, inst[1], _read(state[0], inst[2]))
            elif op == "inst_const":
                state = _set_reg(state, inst[1], ("bv32_const", inst[2]))
            elif op == "inst_neg":
                state = _set_reg(state, inst[1],
                                 ("bv32_neg", _read(state[0], inst[2])))
            elif op in _BINOP:
                val = (_BINOP[op], _read(state[0], inst[2]),
                       _read(state[0], inst[3]))
                state = _set_reg(state, inst[1], val)
            elif op == "inst_havoc":
                store, cons, count, fl = state
                sym = ("bv32_sym", f"sym_{node}_{count}")
                state = _set_reg((store, cons, count + 1, fl), inst[1], sym)
            else:
                raise OracleError(f"unknown instruction {op}")
            node = succ
    return OracleResult(frozenset(reach), frozenset(failed))


def dump_lines(result_set) -> list[str]:
    """Tab-separated fact lines, sorted, matching the engine's dump."""
    return sorted(f"{node}\t{text}" for node, text in result_set)


def make_is_sat(store, context) -> Callable[[tuple], bool]:
    """Adapt a solver context to oracle formula trees."""

    def intern(t):
        if isinstance(t, int):
            return store.mk_i32(t)
        if isinstance(t, str):
            return store.mk_str(t)
        if t[0] == "#tuple":
            return store.mk_tuple(tuple(intern(a) for a in t[1:]))
        return store.mk_ctor(t[0], tuple(intern(a) for a in t[1:]))

    return lambda tree: context.is_sat(store, intern(tree))
