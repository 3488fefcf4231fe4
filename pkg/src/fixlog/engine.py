"""Fixpoint evaluation over an indexed fact database.

Two evaluators share the premise-matching machinery.  `evaluate` is the
pipelined semi-naive engine: every fact that survives deduplication spawns
work items, one per rule premise the fact can feed, and each work item
fully evaluates its rule with the trigger premise pinned to that fact.
With workers > 1 the items of each round are distributed over forked
worker processes that hold read-only database mirrors; the parent owns the
canonical database and is the only deduplicator.  `naive_evaluate`
recomputes the same fixpoint by brute-force iteration in original premise
order and exists purely as a differential-testing oracle.
"""

from __future__ import annotations

import multiprocessing
from collections import deque
from dataclasses import dataclass

from . import ast, errors, funceval, terms, validate
from .errors import (EvalError, FixlogError, SmtError, StuckFunction,
                     UnificationFailure)

Atom = tuple  # of TermId, one per argument position

_EMPTY = frozenset()


class FactDatabase:
    """Per-relation sets of ground atoms with lazily built join indexes.

    An index maps a tuple of argument positions to a table keyed by the
    values at those positions.  Indexes are created on first lookup and
    maintained incrementally by add(), so they stay consistent with the
    base sets at quiescence.
    """

    def __init__(self):
        self.rels: dict[str, set[Atom]] = {}
        self._indexes: dict[str, dict[tuple[int, ...],
                                      dict[Atom, list[Atom]]]] = {}

    def relation(self, rel: str):
        return self.rels.get(rel, _EMPTY)

    def add(self, rel: str, atom: Atom) -> bool:
        """Insert one ground atom; False if it was already present."""
        s = self.rels.setdefault(rel, set())
        if atom in s:
            return False
        s.add(atom)
        for positions, table in self._indexes.get(rel, {}).items():
            key = tuple(atom[j] for j in positions)
            table.setdefault(key, []).append(atom)
        return True

    def lookup(self, rel: str, positions: tuple[int, ...], key: Atom):
        """Atoms of rel whose arguments at `positions` equal `key`."""
        if not positions:
            return self.relation(rel)
        tables = self._indexes.setdefault(rel, {})
        table = tables.get(positions)
        if table is None:
            table = {}
            for atom in self.rels.get(rel, ()):
                k = tuple(atom[j] for j in positions)
                table.setdefault(k, []).append(atom)
            tables[positions] = table
        return table.get(key, ())

    def count(self) -> int:
        return sum(len(s) for s in self.rels.values())

    def copy(self) -> FactDatabase:
        out = FactDatabase()
        out.rels = {rel: set(s) for rel, s in self.rels.items()}
        return out


# ---------------------------------------------------------------------------
# prepared rules

@dataclass(frozen=True)
class PreparedPremise:
    kind: str                      # "atom" | "neg" | "unif"
    rel: str | None = None
    arg_tids: tuple[terms.TermId, ...] = ()
    tuple_tid: terms.TermId | None = None
    key_positions: tuple[int, ...] = ()
    lhs: terms.TermId | None = None
    rhs: terms.TermId | None = None


@dataclass(frozen=True)
class PreparedRule:
    head_rel: str
    head_args: tuple[terms.TermId, ...]
    premises: tuple[PreparedPremise, ...]
    text: str
    stratum: int
    index: int


@dataclass(frozen=True)
class WorkItem:
    """One partially evaluated rule instance: the trigger premise is pinned
    to a concrete ground atom.  premise_idx None means whole-rule (seed)
    evaluation with no pinned premise."""

    rule: PreparedRule
    premise_idx: int | None
    atom: Atom | None


def _prepare_rule(store: terms.TermStore, rule: validate.OrderedRule,
                  stratum: int, index: int) -> PreparedRule:
    prems = []
    for i, p in enumerate(rule.ordered_body):
        bound = rule.binding_plan[i]
        if isinstance(p, ast.Atom):
            arg_tids = tuple(funceval.intern_template(store, a)
                             for a in p.args)
            # an argument is usable as an index key when everything in it
            # is already bound before this premise runs
            keyp = tuple(j for j, a in enumerate(p.args)
                         if ast.term_vars(a) <= bound)
            prems.append(PreparedPremise(
                "atom", rel=p.rel, arg_tids=arg_tids,
                tuple_tid=store.mk_tuple(arg_tids), key_positions=keyp))
        elif isinstance(p, ast.NegAtom):
            arg_tids = tuple(funceval.intern_template(store, a)
                             for a in p.atom.args)
            prems.append(PreparedPremise("neg", rel=p.atom.rel,
                                         arg_tids=arg_tids))
        else:
            prems.append(PreparedPremise(
                "unif",
                lhs=funceval.intern_template(store, p.lhs),
                rhs=funceval.intern_template(store, p.rhs)))
    return PreparedRule(
        head_rel=rule.head.rel,
        head_args=tuple(funceval.intern_template(store, a)
                        for a in rule.head.args),
        premises=tuple(prems),
        text=ast.clause_to_str(rule.source),
        stratum=stratum,
        index=index)


class PreparedProgram:
    """Rewritten program with premises interned into a term store, plus a
    map from each relation to the positive premise occurrences it feeds."""

    def __init__(self, rewritten: validate.RewrittenProgram,
                 store: terms.TermStore, evaluator: funceval.Evaluator):
        self.rewritten = rewritten
        self.store = store
        self.evaluator = evaluator
        self.rules_by_stratum: list[list[PreparedRule]] = []
        self.feeds: list[dict[str, list[tuple[PreparedRule, int]]]] = []
        for si, rules in enumerate(rewritten.rules_by_stratum):
            prepared = []
            feeds: dict[str, list[tuple[PreparedRule, int]]] = {}
            for ri, rule in enumerate(rules):
                pr = _prepare_rule(store, rule, si, ri)
                prepared.append(pr)
                for i, prem in enumerate(pr.premises):
                    if prem.kind == "atom":
                        feeds.setdefault(prem.rel, []).append((pr, i))
            self.rules_by_stratum.append(prepared)
            self.feeds.append(feeds)

    def seed_facts(self, db: FactDatabase) -> None:
        """Insert the program's in-source facts."""
        for fact in self.rewritten.facts:
            atom = tuple(funceval.intern_template(self.store, a)
                         for a in fact.head.args)
            db.add(fact.head.rel, atom)


def prepare(rewritten: validate.RewrittenProgram, store: terms.TermStore,
            evaluator: funceval.Evaluator) -> PreparedProgram:
    return PreparedProgram(rewritten, store, evaluator)


# ---------------------------------------------------------------------------
# rule evaluation

def _with_context(e: FixlogError, text: str, subst: dict,
                  store: terms.TermStore) -> FixlogError:
    binds = ", ".join(f"{v} = {terms.render(store, t)}"
                      for v, t in sorted(subst.items()))
    where = f"while evaluating rule {text}"
    if binds:
        where += f" with {binds}"
    err = type(e)(f"{e.message} ({where})")
    err.rule_text = text
    err.bindings = binds
    return err


def _ground_arg(store, reducer, subst, tid):
    t = terms.apply(store, subst, tid)
    if not store.is_ground(t):
        t = reducer(t)
    return t


def _run_rule(prep: PreparedProgram, db: FactDatabase, rule: PreparedRule,
              trigger_idx: int | None, trigger_atom: Atom | None):
    """All head atoms derivable with the trigger premise pinned (or with no
    pin for seed runs).  Raises evaluation errors with rule context."""
    store = prep.store
    reducer = prep.evaluator.reducer()
    prems = rule.premises
    n = len(prems)
    derived: list[tuple[str, Atom]] = []

    def finish(subst):
        try:
            atom = tuple(_ground_arg(store, reducer, subst, a)
                         for a in rule.head_args)
        except (EvalError, SmtError, StuckFunction) as e:
            raise _with_context(e, rule.text, subst, store) from e
        derived.append((rule.head_rel, atom))

    def step(i, subst):
        if i == n:
            finish(subst)
            return
        if i == trigger_idx:
            step(i + 1, subst)
            return
        p = prems[i]
        if p.kind == "unif":
            try:
                s2 = terms.unify(store, p.lhs, p.rhs, subst, reducer)
            except UnificationFailure:
                return
            except (EvalError, SmtError, StuckFunction) as e:
                raise _with_context(e, rule.text, subst, store) from e
            step(i + 1, s2)
            return
        if p.kind == "neg":
            try:
                atom = tuple(_ground_arg(store, reducer, subst, a)
                             for a in p.arg_tids)
            except (EvalError, SmtError, StuckFunction) as e:
                raise _with_context(e, rule.text, subst, store) from e
            if atom not in db.relation(p.rel):
                step(i + 1, subst)
            return
        try:
            key = tuple(_ground_arg(store, reducer, subst, p.arg_tids[j])
                        for j in p.key_positions)
        except (EvalError, SmtError, StuckFunction) as e:
            raise _with_context(e, rule.text, subst, store) from e
        for fact in db.lookup(p.rel, p.key_positions, key):
            try:
                s2 = terms.unify(store, p.tuple_tid, store.mk_tuple(fact),
                                 subst, reducer)
            except UnificationFailure:
                continue
            except (EvalError, SmtError, StuckFunction) as e:
                raise _with_context(e, rule.text, subst, store) from e
            step(i + 1, s2)

    if trigger_idx is None:
        step(0, {})
    else:
        p = prems[trigger_idx]
        try:
            s0 = terms.unify(store, p.tuple_tid,
                             store.mk_tuple(trigger_atom), {}, reducer)
        except UnificationFailure:
            return derived
        except (EvalError, SmtError, StuckFunction) as e:
            raise _with_context(e, rule.text, {}, store) from e
        step(0, s0)
    return derived


def join_step(prep: PreparedProgram, item: WorkItem,
              db: FactDatabase) -> set[tuple[str, Atom]]:
    """Fully evaluate one work item against db; the set of derived head
    atoms as (relation, argument tuple) pairs.  A trigger atom that does
    not match its premise yields the empty set."""
    return set(_run_rule(prep, db, item.rule, item.premise_idx, item.atom))


# ---------------------------------------------------------------------------
# pipelined semi-naive evaluation

def evaluate(prep: PreparedProgram, db: FactDatabase,
             workers: int = 1, batch_size: int = 1) -> FactDatabase:
    """Grow db to the least fixpoint, stratum by stratum.

    Each stratum is seeded by evaluating its rules once against the full
    database; afterwards every newly inserted fact spawns one work item
    per positive premise occurrence of its relation within the stratum.
    A stratum is complete when no work remains.  Negated premises only
    ever consult relations of strictly lower strata (guaranteed by
    stratification), which are complete by then.

    batch_size groups that many work items into one queue message; it
    trades scheduling overhead against work-stealing granularity and
    never affects the result.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if workers == 1:
        return _evaluate_sequential(prep, db)
    return _evaluate_parallel(prep, db, workers, batch_size)


def _evaluate_sequential(prep: PreparedProgram,
                         db: FactDatabase) -> FactDatabase:
    for si, rules in enumerate(prep.rules_by_stratum):
        feeds = prep.feeds[si]
        queue: deque = deque()

        def insert(rel, atom):
            if db.add(rel, atom):
                for rule, i in feeds.get(rel, ()):
                    queue.append((rule, i, atom))

        for rule in rules:
            for rel, atom in _run_rule(prep, db, rule, None, None):
                insert(rel, atom)
        while queue:
            rule, i, atom = queue.popleft()
            for rel, derived in _run_rule(prep, db, rule, i, atom):
                insert(rel, derived)
    return db


def _worker_main(prep: PreparedProgram, db: FactDatabase, ctrl_q, task_q,
                 result_q):
    """Worker process: mirror the parent's inserts at round boundaries,
    then drain work items until the round-end marker."""
    store = prep.store
    try:
        while True:
            msg = ctrl_q.get()
            if msg[0] == "exit":
                return
            for rel, enc_args in msg[1]:
                db.add(rel, tuple(terms.decode(store, e) for e in enc_args))
            while True:
                batch = task_q.get()
                if batch == "end":
                    break
                for task in batch:
                    si, ri, pi, enc_atom = task
                    rule = prep.rules_by_stratum[si][ri]
                    try:
                        if pi is None:
                            got = _run_rule(prep, db, rule, None, None)
                        else:
                            atom = tuple(terms.decode(store, e)
                                         for e in enc_atom)
                            got = _run_rule(prep, db, rule, pi, atom)
                    except FixlogError as e:
                        result_q.put(("error", type(e).__name__, str(e)))
                    except Exception as e:  # never hang the parent on a bug
                        result_q.put(("error", "EvalError",
                                      f"worker crashed: {e!r}"))
                    else:
                        if got:
                            result_q.put(("derived", [
                                (rel, tuple(terms.encode(store, t)
                                            for t in a))
                                for rel, a in got]))
            result_q.put(("done",))
    except (KeyboardInterrupt, EOFError):
        pass


def _evaluate_parallel(prep: PreparedProgram, db: FactDatabase,
                       workers: int, batch_size: int = 1) -> FactDatabase:
    # Workers are forked once and inherit the store, the prepared rules and
    # the database as of this point.  Term ids diverge after the fork, so
    # every atom that crosses a process boundary travels in encoded tree
    # form and is re-interned on arrival.  The parent performs every
    # canonical insert; workers only read.
    ctx = multiprocessing.get_context("fork")
    store = prep.store
    task_q = ctx.Queue()
    result_q = ctx.Queue()
    ctrl_qs = [ctx.Queue() for _ in range(workers)]
    procs = [ctx.Process(target=_worker_main,
                         args=(prep, db, cq, task_q, result_q), daemon=True)
             for cq in ctrl_qs]
    for p in procs:
        p.start()
    try:
        fresh: list = []  # inserts not yet mirrored to workers, encoded
        for si, rules in enumerate(prep.rules_by_stratum):
            feeds = prep.feeds[si]
            pending = [(si, r.index, None, None) for r in rules]
            while pending:
                for q in ctrl_qs:
                    q.put(("sync", fresh))
                fresh = []
                for i in range(0, len(pending), batch_size):
                    task_q.put(pending[i:i + batch_size])
                for _ in range(workers):
                    task_q.put("end")
                pending = []
                done = 0
                err = None
                while done < workers:
                    msg = result_q.get()
                    if msg[0] == "done":
                        done += 1
                    elif msg[0] == "derived":
                        for rel, enc_args in msg[1]:
                            atom = tuple(terms.decode(store, e)
                                         for e in enc_args)
                            if db.add(rel, atom):
                                fresh.append((rel, enc_args))
                                for rule, i in feeds.get(rel, ()):
                                    pending.append(
                                        (si, rule.index, i, enc_args))
                    elif err is None:
                        err = msg
                if err is not None:
                    cls = getattr(errors, err[1], EvalError)
                    raise cls(err[2])
    finally:
        for q in ctrl_qs:
            q.put(("exit",))
        for p in procs:
            p.join(timeout=30)
            if p.is_alive():
                p.terminate()
    return db


# ---------------------------------------------------------------------------
# naive oracle

@dataclass(frozen=True)
class _NaivePremise:
    kind: str
    rel: str | None
    arg_tids: tuple
    tuple_tid: terms.TermId | None
    lhs: terms.TermId | None
    rhs: terms.TermId | None
    vars: frozenset
    ready_needs: tuple  # data for the readiness test, see _ready


@dataclass(frozen=True)
class _NaiveRule:
    head_rel: str
    head_args: tuple
    premises: tuple[_NaivePremise, ...]
    text: str


def _naive_premise(store, p: ast.Premise) -> _NaivePremise:
    if isinstance(p, ast.Atom):
        arg_tids = tuple(funceval.intern_template(store, a) for a in p.args)
        callvars: set = set()
        outside: set = set()
        for a in p.args:
            ast.call_arg_vars(a, callvars)
            outside |= ast.outside_call_vars(a)
        return _NaivePremise(
            "atom", p.rel, arg_tids, store.mk_tuple(arg_tids), None, None,
            frozenset(ast.premise_vars(p)),
            (frozenset(callvars), frozenset(outside)))
    if isinstance(p, ast.NegAtom):
        arg_tids = tuple(funceval.intern_template(store, a)
                         for a in p.atom.args)
        return _NaivePremise(
            "neg", p.atom.rel, arg_tids, None, None, None,
            frozenset(ast.premise_vars(p)), ())
    lv, rv = ast.term_vars(p.lhs), ast.term_vars(p.rhs)
    lcv, rcv = ast.call_arg_vars(p.lhs), ast.call_arg_vars(p.rhs)
    lo, ro = ast.outside_call_vars(p.lhs), ast.outside_call_vars(p.rhs)
    return _NaivePremise(
        "unif", None, (),
        None,
        funceval.intern_template(store, p.lhs),
        funceval.intern_template(store, p.rhs),
        frozenset(lv | rv),
        (frozenset(lv), frozenset(lcv), frozenset(lo),
         frozenset(rv), frozenset(rcv), frozenset(ro)))


def _ready(p: _NaivePremise, bound: frozenset) -> bool:
    if p.kind == "atom":
        callvars, outside = p.ready_needs
        return callvars <= bound | outside
    if p.kind == "neg":
        return p.vars <= bound
    lv, lcv, lo, rv, rcv, ro = p.ready_needs
    return ((lv <= bound and rcv <= bound | ro)
            or (rv <= bound and lcv <= bound | lo))


def naive_evaluate(prep: PreparedProgram, db: FactDatabase) -> FactDatabase:
    """Oracle evaluator: iterate every rule of a stratum against the full
    database until nothing new appears.  Premises are taken from the
    original (pre-rewrite) body, picking at each step the first premise
    that can run under the current bindings, so a join-order bug in the
    pipelined engine cannot cancel out here."""
    store = prep.store
    for rules in prep.rewritten.rules_by_stratum:
        compiled = [
            _NaiveRule(r.head.rel,
                       tuple(funceval.intern_template(store, a)
                             for a in r.head.args),
                       tuple(_naive_premise(store, p) for p in r.source.body),
                       ast.clause_to_str(r.source))
            for r in rules]
        changed = True
        while changed:
            changed = False
            for nr in compiled:
                for rel, atom in _naive_run(prep, db, nr):
                    if db.add(rel, atom):
                        changed = True
    return db


def _naive_run(prep: PreparedProgram, db: FactDatabase, nr: _NaiveRule):
    store = prep.store
    reducer = prep.evaluator.reducer()
    derived: list[tuple[str, Atom]] = []

    def go(remaining: tuple[int, ...], subst: dict):
        if not remaining:
            try:
                atom = tuple(_ground_arg(store, reducer, subst, a)
                             for a in nr.head_args)
            except (EvalError, SmtError, StuckFunction) as e:
                raise _with_context(e, nr.text, subst, store) from e
            derived.append((nr.head_rel, atom))
            return
        bound = frozenset(subst)
        pick = None
        for i in remaining:
            if _ready(nr.premises[i], bound):
                pick = i
                break
        assert pick is not None, f"no evaluable premise left in {nr.text}"
        rest = tuple(i for i in remaining if i != pick)
        p = nr.premises[pick]
        try:
            if p.kind == "unif":
                try:
                    s2 = terms.unify(store, p.lhs, p.rhs, subst, reducer)
                except UnificationFailure:
                    return
                go(rest, s2)
            elif p.kind == "neg":
                atom = tuple(_ground_arg(store, reducer, subst, a)
                             for a in p.arg_tids)
                if atom not in db.relation(p.rel):
                    go(rest, subst)
            else:
                for fact in db.relation(p.rel):
                    try:
                        s2 = terms.unify(store, p.tuple_tid,
                                         store.mk_tuple(fact), subst,
                                         reducer)
                    except UnificationFailure:
                        continue
                    go(rest, s2)
        except (EvalError, SmtError, StuckFunction) as e:
            if getattr(e, "rule_text", None) is None:
                raise _with_context(e, nr.text, subst, store) from e
            raise
    go(tuple(range(len(nr.premises))), {})
    return derived


# ---------------------------------------------------------------------------
# dumps

def dump_lines(store: terms.TermStore, db: FactDatabase,
               rel: str) -> list[str]:
    """Canonical dump: one tab-separated line per atom, sorted by text, so
    equal fact sets give byte-identical files."""
    return sorted("\t".join(terms.render(store, t) for t in atom)
                  for atom in db.relation(rel))
