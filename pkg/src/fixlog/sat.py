"""Conflict-driven SAT solver used by the built-in bit-blasting backend.

Standard CDCL over integer literals (DIMACS convention: variable v has
literals v and -v): two watched literals per clause, first-UIP conflict
learning, VSIDS-style activity with phase saving, and Luby restarts.  A
conflict budget bounds the search; exceeding it raises ResourceLimit rather
than returning a wrong answer.
"""

from __future__ import annotations

from .errors import ResourceLimit

UNASSIGNED = -1


def _luby(i: int) -> int:
    """Luby restart sequence 1,1,2,1,1,2,4,... (1-indexed)."""
    x = i - 1
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) // 2
        seq -= 1
        x %= size
    return 1 << seq


class CdclSolver:
    def __init__(self):
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.assign: list[int] = [UNASSIGNED]  # 1-indexed by variable
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]  # clause index or -1
        self.phase: list[bool] = [False]
        self.activity: list[float] = [0.0]
        self.var_inc = 1.0
        self.var_decay = 0.95
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.unsat = False

    # variables and clauses ----------------------------------------------------

    def new_var(self) -> int:
        self.nvars += 1
        self.assign.append(UNASSIGNED)
        self.level.append(0)
        self.reason.append(-1)
        self.phase.append(False)
        self.activity.append(0.0)
        return self.nvars

    def value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        if v == UNASSIGNED:
            return UNASSIGNED
        return v if lit > 0 else 1 - v

    def add_clause(self, lits: list[int]):
        if self.unsat:
            return
        seen = set()
        out = []
        for lit in lits:
            if -lit in seen:
                return  # tautology
            if lit in seen:
                continue
            if self.value(lit) == 1 and self.level[abs(lit)] == 0:
                return  # already satisfied forever
            if self.value(lit) == 0 and self.level[abs(lit)] == 0:
                continue  # falsified forever; drop literal
            seen.add(lit)
            out.append(lit)
        if not out:
            self.unsat = True
            return
        if len(out) == 1:
            if not self._enqueue(out[0], -1):
                self.unsat = True
            elif self._propagate() != -1:
                self.unsat = True
            return
        ci = len(self.clauses)
        self.clauses.append(out)
        self.watches.setdefault(out[0], []).append(ci)
        self.watches.setdefault(out[1], []).append(ci)

    # propagation ------------------------------------------------------------------

    def _enqueue(self, lit: int, reason: int) -> bool:
        v = self.value(lit)
        if v == 0:
            return False
        if v == 1:
            return True
        var = abs(lit)
        self.assign[var] = 1 if lit > 0 else 0
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)
        return True

    def _propagate(self) -> int:
        """Returns conflicting clause index, or -1."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            watch = self.watches.get(false_lit)
            if not watch:
                continue
            i = 0
            while i < len(watch):
                ci = watch[i]
                clause = self.clauses[ci]
                # normalize: watched literals sit at positions 0 and 1
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                if self.value(clause[0]) == 1:
                    i += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self.value(clause[k]) != 0:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(ci)
                        watch[i] = watch[-1]
                        watch.pop()
                        moved = True
                        break
                if moved:
                    continue
                # unit or conflicting
                if not self._enqueue(clause[0], ci):
                    return ci
                i += 1
        return -1

    # conflict analysis ---------------------------------------------------------------

    def _bump(self, var: int):
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.nvars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        """First-UIP learning: resolve backwards along the trail until one
        literal of the current decision level remains."""
        cur_level = len(self.trail_lim)
        rest: list[int] = []
        seen: set[int] = set()
        counter = 0
        idx = len(self.trail) - 1
        implied_var = 0  # variable whose reason clause is being resolved
        while True:
            for q in self.clauses[confl]:
                var = abs(q)
                if var == implied_var or var in seen \
                        or self.level[var] == 0:
                    continue
                seen.add(var)
                self._bump(var)
                if self.level[var] == cur_level:
                    counter += 1
                else:
                    rest.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            lit = self.trail[idx]
            var = abs(lit)
            seen.discard(var)
            counter -= 1
            idx -= 1
            if counter == 0:
                learnt = [-lit] + rest
                break
            confl = self.reason[var]
            implied_var = var
        back = 0
        if len(learnt) > 1:
            back = max(self.level[abs(q)] for q in learnt[1:])
            # watch a literal of the backtrack level in second position so
            # the watch invariant holds right after backtracking
            for k in range(1, len(learnt)):
                if self.level[abs(learnt[k])] == back:
                    learnt[1], learnt[k] = learnt[k], learnt[1]
                    break
        return learnt, back

    def _backtrack(self, level: int):
        while len(self.trail_lim) > level:
            bound = self.trail_lim.pop()
            while len(self.trail) > bound:
                lit = self.trail.pop()
                var = abs(lit)
                self.phase[var] = self.assign[var] == 1
                self.assign[var] = UNASSIGNED
                self.reason[var] = -1
        self.qhead = min(self.qhead, len(self.trail))

    def _decide(self) -> int:
        best = 0
        best_act = -1.0
        for v in range(1, self.nvars + 1):
            if self.assign[v] == UNASSIGNED and self.activity[v] > best_act:
                best = v
                best_act = self.activity[v]
        if best == 0:
            return 0
        return best if self.phase[best] else -best

    # main loop ----------------------------------------------------------------------

    def solve(self, conflict_budget: int = 200_000) -> bool:
        if self.unsat:
            return False
        conflicts = 0
        restart_n = 1
        next_restart = 64 * _luby(restart_n)
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl != -1:
                conflicts += 1
                since_restart += 1
                if conflicts > conflict_budget:
                    raise ResourceLimit(
                        f"sat search exceeded {conflict_budget} conflicts")
                if not self.trail_lim:
                    return False
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    if not self._enqueue(learnt[0], -1):
                        return False
                else:
                    ci = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches.setdefault(learnt[0], []).append(ci)
                    self.watches.setdefault(learnt[1], []).append(ci)
                    self._enqueue(learnt[0], ci)
                self.var_inc /= self.var_decay
                continue
            if since_restart >= next_restart and self.trail_lim:
                since_restart = 0
                restart_n += 1
                next_restart = 64 * _luby(restart_n)
                self._backtrack(0)
                continue
            lit = self._decide()
            if lit == 0:
                return True
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, -1)

    def model(self) -> list[bool]:
        """Variable assignment after a satisfiable solve; index 0 unused."""
        return [a == 1 for a in self.assign]
