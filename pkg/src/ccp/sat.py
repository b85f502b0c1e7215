"""
sat.py - A small CDCL solver over integer clauses.

Literals are non-zero ints (DIMACS convention).  The solver keeps its clause
database between calls, so a background theory can be loaded once and then
queried repeatedly under different assumption sets.  Learned clauses are
consequences of the database alone (assumptions are ordinary decisions), so
they are kept across calls.
"""

from __future__ import annotations

from typing import Iterable, Optional


class Solver:
    def __init__(self) -> None:
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.units: list[int] = []
        self.inconsistent = False
        self.activity: list[float] = [0.0]
        self._bump = 1.0

    def new_var(self) -> int:
        self.nvars += 1
        self.activity.append(0.0)
        self.watches[self.nvars] = []
        self.watches[-self.nvars] = []
        return self.nvars

    def add_clause(self, lits: Iterable[int]) -> None:
        clause = sorted(set(lits), key=abs)
        seen = set(clause)
        if any(-l in seen for l in clause):
            return
        if not clause:
            self.inconsistent = True
            return
        for l in clause:
            self.activity[abs(l)] += 1.0
        if len(clause) == 1:
            self.units.append(clause[0])
            return
        idx = len(self.clauses)
        self.clauses.append(clause)
        self.watches[clause[0]].append(idx)
        self.watches[clause[1]].append(idx)

    # ── search ──────────────────────────────────────────────────────────

    def solve(self, assumptions: Iterable[int] = ()) -> Optional[list[int]]:
        """Return a model (list of true literals) or None if unsatisfiable."""
        if self.inconsistent:
            return None
        n = self.nvars
        value = [0] * (n + 1)          # 1 true, -1 false, 0 unassigned
        level = [0] * (n + 1)
        reason: list[Optional[list[int]]] = [None] * (n + 1)
        trail: list[int] = []
        lim: list[int] = []            # trail index at each decision level
        watches, clauses, activity = self.watches, self.clauses, self.activity

        def assign(lit: int, why) -> bool:
            v = abs(lit)
            want = 1 if lit > 0 else -1
            if value[v]:
                return value[v] == want
            value[v] = want
            level[v] = len(lim)
            reason[v] = why
            trail.append(lit)
            return True

        def propagate(head: int):
            while head < len(trail):
                lit = trail[head]
                head += 1
                false_lit = -lit
                wl = watches[false_lit]
                i = 0
                while i < len(wl):
                    ci = wl[i]
                    c = clauses[ci]
                    if c[0] == false_lit:
                        c[0], c[1] = c[1], c[0]
                    first = c[0]
                    fv = value[abs(first)]
                    if fv and (fv > 0) == (first > 0):
                        i += 1
                        continue
                    for k in range(2, len(c)):
                        l = c[k]
                        lv = value[abs(l)]
                        if not lv or (lv > 0) == (l > 0):
                            c[1], c[k] = l, false_lit
                            watches[l].append(ci)
                            wl[i] = wl[-1]
                            wl.pop()
                            break
                    else:
                        if fv:
                            return head, c
                        assign(first, c)
                        i += 1
            return head, None

        def analyze(conflict: list[int]) -> tuple[list[int], int]:
            cur = len(lim)
            seen = set()
            learnt: list[int] = []
            count = 0
            clause = conflict
            idx = len(trail) - 1
            p = 0
            while True:
                for l in clause:
                    if l == p:
                        continue
                    v = abs(l)
                    if v in seen or level[v] == 0:
                        continue
                    seen.add(v)
                    activity[v] += self._bump
                    if level[v] == cur:
                        count += 1
                    else:
                        learnt.append(l)
                while abs(trail[idx]) not in seen:
                    idx -= 1
                p = trail[idx]
                idx -= 1
                seen.discard(abs(p))
                count -= 1
                if count == 0:
                    break
                clause = reason[abs(p)]
            learnt.insert(0, -p)
            back = max((level[abs(l)] for l in learnt[1:]), default=0)
            if len(learnt) > 1:
                j = max(range(1, len(learnt)), key=lambda k: level[abs(learnt[k])])
                learnt[1], learnt[j] = learnt[j], learnt[1]
            self._bump *= 1.05
            return learnt, back

        def backjump(to_level: int) -> int:
            if len(lim) <= to_level:
                return len(trail)
            start = lim[to_level]
            for lit in trail[start:]:
                v = abs(lit)
                value[v] = 0
                reason[v] = None
            del trail[start:]
            del lim[to_level:]
            return start

        for u in self.units:
            if not assign(u, None):
                return None
        head, confl = propagate(0)
        if confl is not None:
            return None

        assumptions = list(assumptions)
        order = None
        while True:
            if confl is not None:
                if len(lim) == 0:
                    return None
                learnt, back = analyze(confl)
                # never backjump below the assumption levels being re-established
                head = backjump(back)
                if len(learnt) == 1:
                    self.units.append(learnt[0])
                    head = backjump(0)
                    assign(learnt[0], None)
                else:
                    ci = len(clauses)
                    clauses.append(learnt)
                    watches[learnt[0]].append(ci)
                    watches[learnt[1]].append(ci)
                    assign(learnt[0], learnt)
                head, confl = propagate(head)
                order = None
                continue
            # decide: assumptions first, in order
            decision = 0
            while len(lim) < len(assumptions):
                a = assumptions[len(lim)]
                av = value[abs(a)]
                if av and (av > 0) != (a > 0):
                    return None
                if av:
                    lim.append(len(trail))   # dummy level keeps indices aligned
                    continue
                decision = a
                break
            if not decision:
                if order is None:
                    order = sorted(range(1, n + 1), key=lambda v: -activity[v])
                for v in order:
                    if not value[v]:
                        decision = -v
                        break
                if not decision:
                    return [v if value[v] > 0 else -v for v in range(1, n + 1)]
            lim.append(len(trail))
            assign(decision, None)
            head, confl = propagate(head)
