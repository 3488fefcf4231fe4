"""Predeclared types and builtin function signatures.

The formula vocabulary (bool_exp, bv32_exp) plus option and map are available
to every program without declaration, as are the builtin functions below.
"""

from __future__ import annotations

from .ast import (AdtDef, T_BOOL, T_BOOL_EXP, T_BV32_EXP, T_I32, T_STRING,
                  TNamed, TVar, TypeExpr)

BOOL_EXP_DEF = AdtDef("bool_exp", (), (
    ("true", ()),
    ("false", ()),
    ("not", (T_BOOL_EXP,)),
    ("and", (T_BOOL_EXP, T_BOOL_EXP)),
    ("or", (T_BOOL_EXP, T_BOOL_EXP)),
    ("bv32_eq", (T_BV32_EXP, T_BV32_EXP)),
    ("bv32_slt", (T_BV32_EXP, T_BV32_EXP)),
    ("bv32_sgt", (T_BV32_EXP, T_BV32_EXP)),
))

BV32_EXP_DEF = AdtDef("bv32_exp", (), (
    ("bv32_const", (T_I32,)),
    ("bv32_sym", (T_STRING,)),
    ("bv32_neg", (T_BV32_EXP,)),
    ("bv32_add", (T_BV32_EXP, T_BV32_EXP)),
    ("bv32_sub", (T_BV32_EXP, T_BV32_EXP)),
    ("bv32_div", (T_BV32_EXP, T_BV32_EXP)),
    ("bv32_mul", (T_BV32_EXP, T_BV32_EXP)),
    ("bv32_rem", (T_BV32_EXP, T_BV32_EXP)),
))

OPTION_DEF = AdtDef("option", ("A",), (
    ("none", ()),
    ("some", (TVar("A"),)),
))

_MAP_KV = TNamed("map", (TVar("K"), TVar("V")))
MAP_DEF = AdtDef("map", ("K", "V"), (
    ("mnil", ()),
    ("mcons", (TVar("K"), TVar("V"), _MAP_KV)),
))

PRELUDE_ADTS = (BOOL_EXP_DEF, BV32_EXP_DEF, OPTION_DEF, MAP_DEF)

_OPT_A = TNamed("option", (TVar("A"),))
_OPT_V = TNamed("option", (TVar("V"),))

# name -> (parameter types, return type); type variables are per-use schemas
BUILTIN_FUNCS: dict[str, tuple[tuple[TypeExpr, ...], TypeExpr]] = {
    "+": ((T_I32, T_I32), T_I32),
    "-": ((T_I32, T_I32), T_I32),
    "*": ((T_I32, T_I32), T_I32),
    "/": ((T_I32, T_I32), T_I32),
    "%": ((T_I32, T_I32), T_I32),
    "==": ((TVar("A"), TVar("A")), T_BOOL),
    "<": ((T_I32, T_I32), T_BOOL),
    "<=": ((T_I32, T_I32), T_BOOL),
    ">": ((T_I32, T_I32), T_BOOL),
    ">=": ((T_I32, T_I32), T_BOOL),
    "is_sat": ((T_BOOL_EXP,), T_BOOL),
    "interpolant": ((T_BOOL_EXP, T_BOOL_EXP),
                    TNamed("option", (T_BOOL_EXP,))),
    "get": ((TVar("K"), _MAP_KV), _OPT_V),
    "put": ((TVar("K"), TVar("V"), _MAP_KV), _MAP_KV),
    "str_cat": ((T_STRING, T_STRING), T_STRING),
    "to_string": ((T_I32,), T_STRING),
}

BASE_TYPE_NAMES = {"i32", "string", "bool"}

INT_MIN = -(2 ** 31)
INT_MAX = 2 ** 31 - 1
