from __future__ import annotations

import os
import shutil

import pytest

from fixlog import smt

from _support import REF_SOLVER

WELL_KNOWN_SOLVERS = ("z3", "cvc5", "cvc4", "bitwuzla", "boolector",
                      "yices-smt2", "mathsat")


def _discover_solver() -> str:
    """An SMT-LIB2 solver executable: an explicit override wins, then
    anything installed, then the bundled reference solver."""
    override = os.environ.get(smt.SOLVER_ENV_VAR)
    if override:
        return override
    for name in WELL_KNOWN_SOLVERS:
        found = shutil.which(name)
        if found:
            return found
    return str(REF_SOLVER)


@pytest.fixture(scope="session")
def solver_path() -> str:
    path = _discover_solver()
    if not os.path.exists(path):
        pytest.skip(f"no SMT solver available at {path}")
    return path


@pytest.fixture(scope="session")
def external_backend(solver_path) -> smt.ExternalBackend:
    return smt.ExternalBackend(solver_path)


@pytest.fixture(scope="session")
def builtin_backend() -> smt.BuiltinBackend:
    return smt.BuiltinBackend()
