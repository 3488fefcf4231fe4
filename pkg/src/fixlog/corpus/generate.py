"""Random input generators: graphs, programs, formulae.

Everything here is deterministic in the seed, so test failures reproduce.
"""

from __future__ import annotations

import random
from pathlib import Path

from .. import terms

# directed graphs ------------------------------------------------------------


def gen_graph(n: int, p: float, seed: int) -> list[tuple[int, int]]:
    """Edge list of a random directed graph on nodes 0..n-1.

    Each ordered pair (u, v) with u != v is an edge with probability p.
    """
    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                edges.append((u, v))
    return edges


def write_graph(out_dir: str | Path, n: int, p: float, seed: int) -> Path:
    """Write the edge relation of a random graph as a fact file e.tsv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "e.tsv"
    lines = [f"{u}\t{v}\n" for u, v in gen_graph(n, p, seed)]
    path.write_text("".join(lines), encoding="utf-8")
    return path


# random programs ------------------------------------------------------------
#
# Small stratified programs over i32 relations, used to cross-check the
# pipelined engine against a naive evaluator.  The generator proposes a
# program and the caller is expected to reject proposals that fail
# validation; values stay in -7..7 (arithmetic is taken mod 8) so every
# program has a finite least model.

_VALUE_MOD = 8


def _gen_atom_args(rng: random.Random, arity: int, pool: list[str]) -> list[str]:
    args = []
    for _ in range(arity):
        if rng.random() < 0.8:
            args.append(rng.choice(pool))
        else:
            args.append(str(rng.randrange(_VALUE_MOD)))
    return args


def gen_program(seed: int) -> str:
    """Propose one random program as source text.

    Shape: up to 2 input relations with inline facts, up to 3 derived
    relations, up to 8 rules with joins, constants, negation on input
    relations, and bounded arithmetic in unification premises.  Not every
    proposal validates; callers sample seeds and keep the survivors.
    """
    rng = random.Random(seed)
    n_edb = rng.randint(1, 2)
    n_idb = rng.randint(1, 3)
    edb = [(f"e{i}", rng.randint(1, 2)) for i in range(n_edb)]
    idb = [(f"r{i}", rng.randint(1, 2)) for i in range(n_idb)]
    out = []
    for name, arity in edb:
        cols = ", ".join(["i32"] * arity)
        out.append(f"declare input {name}({cols}).")
    for name, arity in idb:
        cols = ", ".join(["i32"] * arity)
        out.append(f"declare output {name}({cols}).")
    out.append("")
    n_facts = rng.randint(3, 25)
    seen = set()
    for _ in range(n_facts):
        name, arity = rng.choice(edb)
        vals = tuple(rng.randrange(_VALUE_MOD) for _ in range(arity))
        if (name, vals) in seen:
            continue
        seen.add((name, vals))
        out.append(f"{name}({', '.join(str(v) for v in vals)}).")
    out.append("")
    pool = ["X", "Y", "Z", "W"]
    n_rules = rng.randint(1, 8)
    for _ in range(n_rules):
        head_name, head_arity = rng.choice(idb)
        body = []
        body_vars: list[str] = []
        for _ in range(rng.randint(1, 3)):
            rel, arity = rng.choice(edb + idb)
            args = _gen_atom_args(rng, arity, pool)
            body.append(f"{rel}({', '.join(args)})")
            body_vars.extend(a for a in args if a in pool)
        if body_vars and rng.random() < 0.25:
            rel, arity = rng.choice(edb)
            args = [rng.choice(body_vars) for _ in range(arity)]
            body.append(f"!{rel}({', '.join(args)})")
        if body_vars and rng.random() < 0.4:
            fresh = rng.choice([v for v in pool if v not in body_vars]
                               or body_vars)
            src = rng.choice(body_vars)
            k = rng.randrange(_VALUE_MOD)
            form = rng.randrange(3)
            if form == 0:
                body.append(f"{fresh} = ({src} + {k}) % {_VALUE_MOD}")
                body_vars.append(fresh)
            elif form == 1:
                body.append(f"{fresh} = {src}")
                body_vars.append(fresh)
            else:
                body.append(f"{src} = {k}")
        head_pool = body_vars or [str(rng.randrange(_VALUE_MOD))]
        head_args = [rng.choice(head_pool) for _ in range(head_arity)]
        rng.shuffle(body)
        out.append(f"{head_name}({', '.join(head_args)}) :- "
                   f"{', '.join(body)}.")
    out.append("")
    return "\n".join(out)


# random formulae ------------------------------------------------------------
#
# Bitvector constraint terms for cross-checking satisfiability backends.
# Multiplication, division, and remainder are biased toward constant
# operands: fully symbolic instances of those are the expensive circuits,
# and a check corpus should spend its time on breadth, not on a handful
# of hard multiplies.

_CMP_OPS = ("bv32_eq", "bv32_slt", "bv32_sgt")
_BOOL_OPS = ("not", "and", "or")


def _gen_bv(store: terms.TermStore, rng: random.Random, depth: int,
            syms: list[str]) -> terms.TermId:
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.55:
            return store.mk_ctor("bv32_sym", (store.mk_str(rng.choice(syms)),))
        return store.mk_ctor(
            "bv32_const", (store.mk_i32(rng.randrange(-64, 65)),))
    op = rng.choices(("bv32_add", "bv32_sub", "bv32_neg", "bv32_mul",
                      "bv32_div", "bv32_rem"),
                     weights=(30, 25, 10, 8, 4, 4))[0]
    if op == "bv32_neg":
        return store.mk_ctor(op, (_gen_bv(store, rng, depth - 1, syms),))
    a = _gen_bv(store, rng, depth - 1, syms)
    if op in ("bv32_mul", "bv32_div", "bv32_rem") and rng.random() < 0.9:
        # constant right operand; zero divisors stay in to cover the
        # total-division semantics
        lo = 0 if op != "bv32_mul" else -16
        b = store.mk_ctor("bv32_const", (store.mk_i32(rng.randrange(lo, 17)),))
    else:
        b = _gen_bv(store, rng, depth - 1, syms)
    return store.mk_ctor(op, (a, b))


def gen_formula(store: terms.TermStore, seed: int, max_depth: int = 5,
                n_syms: int = 3) -> terms.TermId:
    """One random bool_exp term with depth <= max_depth."""
    rng = random.Random(seed)
    syms = ["x", "y", "z"][:n_syms]

    def bexp(depth: int) -> terms.TermId:
        if depth <= 0:
            return store.mk_ctor("true" if rng.random() < 0.5 else "false", ())
        if rng.random() < 0.45:
            op = rng.choice(_CMP_OPS)
            # keep arithmetic shallow: deep circuits under a comparison
            # dominate solving time without adding verdict coverage
            d = min(depth - 1, 3)
            return store.mk_ctor(op, (_gen_bv(store, rng, d, syms),
                                      _gen_bv(store, rng, d, syms)))
        op = rng.choice(_BOOL_OPS)
        if op == "not":
            return store.mk_ctor(op, (bexp(depth - 1),))
        return store.mk_ctor(op, (bexp(depth - 1), bexp(depth - 1)))

    return bexp(max_depth)
