"""Translation of ground bool_exp terms to SMT-LIB2 scripts.

One script per query: set-logic QF_BV, one declare-const per distinct
symbol (sorted by name), a single assert, check-sat.  Constants are printed
as 32-bit two's-complement hex literals.
"""

from __future__ import annotations

import re

from . import terms
from .errors import TranslationError

MASK = 0xFFFFFFFF

_BOOL_FORMS = {"true": "true", "false": "false", "not": "not", "and": "and",
               "or": "or", "bv32_eq": "=", "bv32_slt": "bvslt",
               "bv32_sgt": "bvsgt"}
_BV_FORMS = {"bv32_neg": "bvneg", "bv32_add": "bvadd", "bv32_sub": "bvsub",
             "bv32_div": "bvsdiv", "bv32_mul": "bvmul", "bv32_rem": "bvsrem"}

_SIMPLE_SYMBOL = re.compile(r"[A-Za-z_~!@$%^&*+=<>.?/-]"
                            r"[A-Za-z0-9_~!@$%^&*+=<>.?/-]*$")


def smt_symbol(name: str) -> str:
    if _SIMPLE_SYMBOL.match(name):
        return name
    if "|" in name or "\\" in name:
        raise TranslationError(
            f"symbol name {name!r} cannot be written in SMT-LIB")
    return f"|{name}|"


def _hex_const(v: int) -> str:
    return f"#x{v & MASK:08x}"


def collect_symbols(store: terms.TermStore, tid: terms.TermId) -> list[str]:
    names: set[str] = set()
    stack = [tid]
    while stack:
        t = stack.pop()
        row = store.row(t)
        if row[0] != terms.CTOR:
            raise TranslationError(
                f"not a formula term: {terms.render(store, t)}")
        if row[1] == "bv32_sym":
            names.add(store.row(row[2][0])[1])
        elif row[1] != "bv32_const":
            stack.extend(row[2])
    return sorted(names)


def formula_text(store: terms.TermStore, tid: terms.TermId) -> str:
    """The assert body as an s-expression (no surrounding script)."""
    out: list[str] = []
    stack: list[object] = [tid]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        row = store.row(item)
        if row[0] != terms.CTOR:
            raise TranslationError(
                f"not a formula term: {terms.render(store, item)}")
        name, args = row[1], row[2]
        if name == "bv32_const":
            out.append(_hex_const(store.row(args[0])[1]))
        elif name == "bv32_sym":
            out.append(smt_symbol(store.row(args[0])[1]))
        elif name in ("true", "false"):
            out.append(name)
        elif name in _BOOL_FORMS or name in _BV_FORMS:
            form = _BOOL_FORMS.get(name) or _BV_FORMS[name]
            out.append(f"({form}")
            parts: list[object] = [")"]
            for a in reversed(args):
                parts.append(a)
                parts.append(" ")
            stack.extend(parts)
        else:
            raise TranslationError(
                f"constructor {name} is not part of a formula")
    return "".join(out)


def to_smtlib(store: terms.TermStore, tid: terms.TermId) -> str:
    """Complete SMT-LIB2 script deciding the formula."""
    lines = ["(set-logic QF_BV)"]
    for name in collect_symbols(store, tid):
        lines.append(f"(declare-const {smt_symbol(name)} (_ BitVec 32))")
    lines.append(f"(assert {formula_text(store, tid)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"
