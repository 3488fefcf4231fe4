"""Well-formedness checks and the premise-reordering rewrite.

The validate stage enforces three restrictions on every clause:

  * range restriction: every head variable must be derivable from the
    positive body premises,
  * function-argument binding: a variable used inside a function-call
    argument must also occur outside all call positions in the clause,
  * stratified negation: the relation dependency graph must have no cycle
    through a negated premise.

The rewrite stage then reorders each rule body so the premises can be
evaluated left to right, choosing the order that is lexicographically
minimal in original premise positions.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast
from .errors import (
    NoValidOrder,
    UnboundFunctionArgument,
    UnboundHeadVariable,
    UnstratifiableNegation,
    ValidationError,
)


@dataclass(frozen=True)
class StratifiedProgram:
    """Checked program with relations assigned to evaluation strata.

    strata covers every output relation exactly once; input relations are
    conceptually below stratum 0 and never appear.  rules_by_stratum holds
    the rules whose head lives in the corresponding stratum; facts are kept
    separate since they seed the database directly.
    """

    program: ast.SourceProgram
    strata: tuple[frozenset[str], ...]
    rules_by_stratum: tuple[tuple[ast.Clause, ...], ...]
    facts: tuple[ast.Clause, ...]
    input_rels: frozenset[str]
    output_rels: frozenset[str]


@dataclass(frozen=True)
class OrderedRule:
    """A rule body permuted into left-to-right evaluable order.

    binding_plan[i] is the set of variables bound before ordered_body[i]
    runs: every function-call argument variable and every variable of a
    negated premise is contained in it (calls may additionally rely on
    sibling subterms of their own premise, mirroring what unification
    supports at run time).
    """

    head: ast.Atom
    ordered_body: tuple[ast.Premise, ...]
    binding_plan: tuple[frozenset[str], ...]
    source: ast.Clause


@dataclass(frozen=True)
class RewrittenProgram:
    program: ast.SourceProgram
    strata: tuple[frozenset[str], ...]
    rules_by_stratum: tuple[tuple[OrderedRule, ...], ...]
    facts: tuple[ast.Clause, ...]
    input_rels: frozenset[str]
    output_rels: frozenset[str]


# ---------------------------------------------------------------------------
# binding closure

def _vars_in_order(t: ast.TermAst, acc: list[str]):
    if isinstance(t, ast.Var):
        if t.name not in acc:
            acc.append(t.name)
    elif isinstance(t, (ast.CtorApp, ast.FnCall)):
        for a in t.args:
            _vars_in_order(a, acc)
    elif isinstance(t, ast.TupleTerm):
        for a in t.items:
            _vars_in_order(a, acc)


def _call_vars_in_order(t: ast.TermAst, acc: list[str], inside: bool):
    if isinstance(t, ast.Var):
        if inside and t.name not in acc:
            acc.append(t.name)
    elif isinstance(t, ast.CtorApp):
        for a in t.args:
            _call_vars_in_order(a, acc, inside)
    elif isinstance(t, ast.TupleTerm):
        for a in t.items:
            _call_vars_in_order(a, acc, inside)
    elif isinstance(t, ast.FnCall):
        for a in t.args:
            _call_vars_in_order(a, acc, True)


def _atom_ready(a: ast.Atom, bound: set[str]) -> bool:
    """A positive atom can run once its call arguments are available, either
    from earlier premises or from sibling subterms of the same atom."""
    callv: set[str] = set()
    sibling: set[str] = set()
    for arg in a.args:
        ast.call_arg_vars(arg, callv)
        sibling |= ast.outside_call_vars(arg)
    return callv <= bound | sibling


def _unif_ready(u: ast.Unification, bound: set[str]) -> bool:
    """s = t can run when one side is fully bound and the other side's call
    arguments are available (earlier premises or sibling subterms)."""
    for known, pattern in ((u.lhs, u.rhs), (u.rhs, u.lhs)):
        if ast.term_vars(known) <= bound:
            callv = ast.call_arg_vars(pattern)
            if callv <= bound | ast.outside_call_vars(pattern):
                return True
    return False


def _premise_ready(p: ast.Premise, bound: set[str]) -> bool:
    if isinstance(p, ast.Atom):
        return _atom_ready(p, bound)
    if isinstance(p, ast.NegAtom):
        return ast.premise_vars(p) <= bound
    return _unif_ready(p, bound)


def _premise_binds(p: ast.Premise) -> set[str]:
    if isinstance(p, ast.NegAtom):
        return set()
    return ast.premise_vars(p)


def binding_closure(body: tuple[ast.Premise, ...]) -> set[str]:
    """Fixpoint of variables derivable from the positive body premises."""
    bound: set[str] = set()
    pending = [p for p in body if not isinstance(p, ast.NegAtom)]
    progress = True
    while progress and pending:
        progress = False
        rest = []
        for p in pending:
            if _premise_ready(p, bound):
                bound |= _premise_binds(p)
                progress = True
            else:
                rest.append(p)
        pending = rest
    return bound


# ---------------------------------------------------------------------------
# per-clause checks

def check_range_restriction(c: ast.Clause):
    """Every head variable must be bound by the positive body premises."""
    bound = binding_closure(c.body)
    head_vars: list[str] = []
    for t in c.head.args:
        _vars_in_order(t, head_vars)
    for v in head_vars:
        if v not in bound:
            raise UnboundHeadVariable(v, c.loc)


def check_function_binding(c: ast.Clause):
    """A variable inside a call argument must occur outside all call
    positions somewhere in the clause."""
    call_vars: list[str] = []
    outside: set[str] = set()

    def scan(t: ast.TermAst):
        _call_vars_in_order(t, call_vars, False)
        outside.update(ast.outside_call_vars(t))

    for t in c.head.args:
        scan(t)
    for p in c.body:
        if isinstance(p, ast.Atom):
            for t in p.args:
                scan(t)
        elif isinstance(p, ast.NegAtom):
            for t in p.atom.args:
                scan(t)
        else:
            scan(p.lhs)
            scan(p.rhs)
    for v in call_vars:
        if v not in outside:
            raise UnboundFunctionArgument(v, c.loc)


def check_fact(c: ast.Clause):
    for t in c.head.args:
        if ast.has_call(t):
            raise ValidationError(
                f"fact for relation {c.head.rel} contains a function call; "
                "facts must be ground terms", c.loc)
        if ast.term_vars(t):
            v: list[str] = []
            _vars_in_order(t, v)
            raise UnboundHeadVariable(v[0], c.loc)


def check_negation_safety(c: ast.Clause):
    """Negated premises may only mention variables the positive premises
    can bind (safe negation)."""
    bound = binding_closure(c.body)
    for p in c.body:
        if isinstance(p, ast.NegAtom):
            unbound = sorted(ast.premise_vars(p) - bound)
            if unbound:
                raise ValidationError(
                    f"variable {unbound[0]} under negation of "
                    f"{p.atom.rel} is never bound by a positive premise",
                    p.loc)


# ---------------------------------------------------------------------------
# stratification

def stratify(program: ast.SourceProgram) -> StratifiedProgram:
    input_rels = frozenset(d.name for d in program.rel_decls if d.kind == "input")
    output_rels = frozenset(d.name for d in program.rel_decls
                            if d.kind != "input")

    facts = tuple(c for c in program.clauses if c.is_fact)
    rules = tuple(c for c in program.clauses if not c.is_fact)

    for r in rules:
        if r.head.rel in input_rels:
            raise ValidationError(
                f"rule derives into input relation {r.head.rel}; only "
                "facts and fact files may populate input relations",
                r.loc)

    # dependency graph over output relations: head -> body relation
    pos_edges: dict[str, set[str]] = {r: set() for r in output_rels}
    neg_edges: dict[str, set[str]] = {r: set() for r in output_rels}
    for r in rules:
        for p in r.body:
            if isinstance(p, ast.Atom) and p.rel in output_rels:
                pos_edges[r.head.rel].add(p.rel)
            elif isinstance(p, ast.NegAtom) and p.atom.rel in output_rels:
                neg_edges[r.head.rel].add(p.atom.rel)

    sccs = _tarjan(sorted(output_rels),
                   lambda n: sorted(pos_edges[n] | neg_edges[n]))
    comp_of = {}
    for i, comp in enumerate(sccs):
        for n in comp:
            comp_of[n] = i

    for head, targets in neg_edges.items():
        for t in targets:
            if comp_of[head] == comp_of[t]:
                cycle = sorted(sccs[comp_of[head]])
                raise UnstratifiableNegation(cycle)

    # minimal strata: longest path in the condensation where negative
    # edges cost 1 and positive edges cost 0
    level: dict[int, int] = {}

    def comp_level(ci: int) -> int:
        if ci in level:
            return level[ci]
        best = 0
        for n in sccs[ci]:
            for t in pos_edges[n]:
                if comp_of[t] != ci:
                    best = max(best, comp_level(comp_of[t]))
            for t in neg_edges[n]:
                best = max(best, comp_level(comp_of[t]) + 1)
        level[ci] = best
        return best

    for ci in range(len(sccs)):
        comp_level(ci)

    n_strata = max(level.values(), default=-1) + 1 if sccs else 0
    if output_rels and n_strata == 0:
        n_strata = 1
    strata_sets: list[set[str]] = [set() for _ in range(n_strata)]
    for ci, comp in enumerate(sccs):
        strata_sets[level[ci]].update(comp)

    rel_stratum = {}
    for i, s in enumerate(strata_sets):
        for rel in s:
            rel_stratum[rel] = i
    grouped: list[list[ast.Clause]] = [[] for _ in range(n_strata)]
    for r in rules:
        grouped[rel_stratum[r.head.rel]].append(r)

    return StratifiedProgram(
        program=program,
        strata=tuple(frozenset(s) for s in strata_sets),
        rules_by_stratum=tuple(tuple(g) for g in grouped),
        facts=facts,
        input_rels=input_rels,
        output_rels=output_rels,
    )


def _tarjan(nodes, successors):
    """Strongly connected components, returned in reverse topological order
    (callees before callers).  Iterative to keep deep graphs safe."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = [0]

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(successors(succ))))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return sccs


# ---------------------------------------------------------------------------
# entry points

def validate(program: ast.SourceProgram) -> StratifiedProgram:
    """All validate-stage checks; returns the stratified program."""
    for c in program.clauses:
        if c.is_fact:
            check_fact(c)
        else:
            check_function_binding(c)
            check_range_restriction(c)
            check_negation_safety(c)
    return stratify(program)


def reorder_premises(c: ast.Clause) -> OrderedRule:
    """Greedy smallest-original-index order over evaluable premises; this
    is the lexicographically minimal valid order in original positions."""
    remaining = list(enumerate(c.body))
    bound: set[str] = set()
    ordered: list[ast.Premise] = []
    plan: list[frozenset[str]] = []
    while remaining:
        pick = None
        for slot, (idx, p) in enumerate(remaining):
            if _premise_ready(p, bound):
                pick = slot
                break
        if pick is None:
            rels = ", ".join(
                p.atom.rel if isinstance(p, ast.NegAtom) else "="
                for _, p in remaining)
            raise NoValidOrder(
                f"no evaluable order for rule at {c.loc}: stuck on "
                f"premises [{rels}]", c.loc)
        idx, p = remaining.pop(pick)
        plan.append(frozenset(bound))
        ordered.append(p)
        bound |= _premise_binds(p)
    return OrderedRule(c.head, tuple(ordered), tuple(plan), c)


def rewrite(sp: StratifiedProgram) -> RewrittenProgram:
    """The rewrite stage: reorder every rule body for left-to-right
    evaluation."""
    grouped = tuple(tuple(reorder_premises(r) for r in rules)
                    for rules in sp.rules_by_stratum)
    return RewrittenProgram(sp.program, sp.strata, grouped, sp.facts,
                            sp.input_rels, sp.output_rels)
