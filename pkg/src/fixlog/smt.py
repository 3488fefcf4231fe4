"""Satisfiability backends and the query cache.

Two interchangeable backends answer is_sat queries: the built-in
bit-blaster, and an external SMT-LIB2 solver process (one process per
query, script on stdin, sat/unsat/unknown on stdout).  Verdicts are cached
per formula term; purity of satisfiability makes the cache transparent.
"""

from __future__ import annotations

import os
import subprocess

from . import bitblast, smtlib, terms
from .errors import BackendUnavailable

SOLVER_ENV_VAR = "FIXLOG_SMT_SOLVER"


class BuiltinBackend:
    name = "builtin"
    supports_interpolants = False

    def __init__(self, conflict_budget: int = 200_000):
        self.conflict_budget = conflict_budget

    def check_sat(self, store: terms.TermStore, tid: terms.TermId) -> str:
        result, _ = bitblast.check_sat(store, tid, self.conflict_budget)
        return result


class ExternalBackend:
    name = "external"
    supports_interpolants = False

    def __init__(self, path: str):
        self.path = path

    def check_sat(self, store: terms.TermStore, tid: terms.TermId) -> str:
        script = smtlib.to_smtlib(store, tid)
        try:
            proc = subprocess.run(
                [self.path], input=script, text=True, capture_output=True)
        except OSError as e:
            raise BackendUnavailable(
                f"cannot run solver {self.path}: {e}") from e
        answer = ""
        for line in proc.stdout.splitlines():
            line = line.strip()
            if line:
                answer = line
                break
        if answer in ("sat", "unsat"):
            return answer
        if answer == "unknown":
            raise BackendUnavailable(
                f"solver {self.path} answered unknown")
        detail = (proc.stderr or proc.stdout or "").strip()
        raise BackendUnavailable(
            f"solver {self.path} produced no verdict "
            f"(exit {proc.returncode}): {detail[:200]}")


def make_backend(spec: str):
    """Parse a backend selector: 'builtin', 'external', 'external:PATH'."""
    if spec == "builtin":
        return BuiltinBackend()
    if spec == "external":
        path = os.environ.get(SOLVER_ENV_VAR)
        if not path:
            raise BackendUnavailable(
                f"--smt external needs a solver path in ${SOLVER_ENV_VAR} "
                "or use --smt external:PATH")
        return ExternalBackend(path)
    if spec.startswith("external:"):
        return ExternalBackend(spec[len("external:"):])
    raise ValueError(f"unknown SMT backend {spec!r}; "
                     "expected builtin, external, or external:PATH")


class SmtContext:
    """is_sat entry point with a per-formula verdict cache."""

    def __init__(self, backend=None, cache_enabled: bool = True):
        self.backend = backend or BuiltinBackend()
        self.cache_enabled = cache_enabled
        self.cache: dict[terms.TermId, bool] = {}
        self.hits = 0
        self.misses = 0

    def is_sat(self, store: terms.TermStore, tid: terms.TermId) -> bool:
        if self.cache_enabled:
            hit = self.cache.get(tid)
            if hit is not None:
                self.hits += 1
                return hit
        self.misses += 1
        result = self.backend.check_sat(store, tid) == "sat"
        if self.cache_enabled:
            self.cache[tid] = result
        return result
