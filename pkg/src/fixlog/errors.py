"""Error taxonomy for the whole pipeline.

Every user-facing failure is a FixlogError.  Each class carries the pipeline
stage it belongs to, which the CLI maps to a distinct exit code.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Loc:
    """Source position, 1-based."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class FixlogError(Exception):
    """Base class for all diagnosable failures."""

    stage = "internal"

    def __init__(self, message: str, loc: Loc | None = None):
        super().__init__(message)
        self.message = message
        self.loc = loc

    def __str__(self) -> str:
        if self.loc is not None:
            return f"{self.loc}: {self.message}"
        return self.message


# parse stage

class ParseError(FixlogError):
    """Malformed source text."""

    stage = "parse"


class ResolutionError(FixlogError):
    """An identifier could not be resolved, or declarations conflict."""

    stage = "parse"


# typecheck stage

class TypeCheckError(FixlogError):
    stage = "typecheck"


class TypeMismatch(TypeCheckError):
    """Two types failed to unify; carries both sides rendered as text."""

    def __init__(self, expected: str, actual: str, loc: Loc | None = None,
                 context: str = ""):
        msg = f"type mismatch: {expected} vs {actual}"
        if context:
            msg += f" ({context})"
        super().__init__(msg, loc)
        self.expected = expected
        self.actual = actual


class OccursCheckFailure(TypeCheckError):
    def __init__(self, var: str, ty: str, loc: Loc | None = None):
        super().__init__(f"occurs check failed: {var} occurs in {ty}", loc)
        self.var = var
        self.ty = ty


# validate stage

class ValidationError(FixlogError):
    stage = "validate"


class UnboundHeadVariable(ValidationError):
    """Range restriction: a head variable is not bound by the body."""

    def __init__(self, name: str, loc: Loc | None = None):
        super().__init__(f"head variable {name} is not bound by the rule body",
                         loc)
        self.name = name


class UnboundFunctionArgument(ValidationError):
    """A variable occurs only inside function-call arguments."""

    def __init__(self, name: str, loc: Loc | None = None):
        super().__init__(
            f"variable {name} appears only inside function arguments and is "
            f"never bound elsewhere in the clause", loc)
        self.name = name


class UnstratifiableNegation(ValidationError):
    """Negation through a recursive cycle."""

    def __init__(self, cycle: list[str], loc: Loc | None = None):
        super().__init__(
            "negation inside a recursive cycle: " + " -> ".join(cycle), loc)
        self.cycle = cycle


class NoValidOrder(ValidationError):
    """No premise ordering makes the rule evaluable left to right."""

    stage = "rewrite"


# term store / unification

class UnificationFailure(FixlogError):
    stage = "evaluate"


class StuckFunction(FixlogError):
    """A function call never became ground during unification."""

    stage = "evaluate"


# function evaluation

class EvalError(FixlogError):
    stage = "evaluate"


class MatchFailure(EvalError):
    """No match branch accepted the scrutinee."""


class NonLinearPattern(EvalError):
    """A pattern binds the same variable twice."""


class StepLimitExceeded(EvalError):
    """The reduction step budget ran out."""


class DivisionByZero(EvalError):
    pass


class UnsupportedOperation(EvalError):
    pass


# smt

class SmtError(FixlogError):
    stage = "evaluate"


class BackendUnavailable(SmtError):
    """External solver missing, dead, or answering unknown."""


class TranslationError(SmtError):
    """A term outside the formula vocabulary reached the translator."""


class ResourceLimit(SmtError):
    """The builtin solver exceeded its conflict budget."""


# external fact files

class FactFileError(FixlogError):
    stage = "facts"


class ArityMismatch(FactFileError):
    pass


class TermParseError(FactFileError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# exit codes per stage, used by the CLI (2 is taken by argparse usage errors)
STAGE_EXIT_CODES = {
    "parse": 3,
    "typecheck": 4,
    "validate": 5,
    "rewrite": 6,
    "facts": 7,
    "evaluate": 8,
    "internal": 1,
}
