"""
oracle.py - Brute-force semantics check for compiled actions.

Enumerates the initial states allowed by the domain constraints and the
action's precondition, then, for each, every successor state that satisfies
the pseudo successor state axioms read as plain constraints.  Nothing here
calls the SAT solver, forgetting, or any other part of the compiler's
solving machinery; formulas are evaluated by a small three-valued
evaluator so that partial assignments can prune the search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import proplogic as pl
from .compiler import ActionTheory, CompiledAction, StripsEntry, bounds
from .grounder import GroundAtom


class OracleRefused(Exception):
    """The vocabulary is larger than the configured cap."""


DEFAULT_CAP = 20


# ── Three-valued evaluation ─────────────────────────────────────────────────

def kleene(f: pl.Formula, value) -> Optional[bool]:
    """Evaluate with `value(atom)` returning True/False/None (unknown)."""
    if isinstance(f, pl.Const):
        return f.value
    if isinstance(f, pl.Var):
        return value(f.atom)
    if isinstance(f, pl.Not):
        v = kleene(f.arg, value)
        return None if v is None else not v
    if isinstance(f, pl.And):
        unknown = False
        for a in f.args:
            v = kleene(a, value)
            if v is False:
                return False
            unknown = unknown or v is None
        return None if unknown else True
    if isinstance(f, pl.Or):
        unknown = False
        for a in f.args:
            v = kleene(a, value)
            if v is True:
                return True
            unknown = unknown or v is None
        return None if unknown else False
    left, right = kleene(f.left, value), kleene(f.right, value)
    if isinstance(f, pl.Implies):
        if left is False or right is True:
            return True
        return None if left is None or right is None else False
    if left is None or right is None:
        return None
    return left == right


def _search(atoms: list, constraints: list, fixed: dict) -> list[dict]:
    """All total assignments to `atoms` (extending `fixed`) under which no
    constraint evaluates to false.

    constraints: list of (atoms the constraint depends on, check function).
    A constraint is re-checked whenever one of its atoms is assigned, so
    partial assignments that already falsify it are pruned.
    """
    out = []
    assign = dict(fixed)
    watch: dict = {a: [] for a in atoms}
    for i, (deps, check) in enumerate(constraints):
        hit = [a for a in deps if a in watch]
        if not hit and check(assign) is False:
            return []
        for a in hit:
            watch[a].append(check)

    def rec(k: int) -> None:
        if k == len(atoms):
            out.append(dict(assign))
            return
        a = atoms[k]
        for v in (False, True):
            assign[a] = v
            if all(check(assign) is not False for check in watch[a]):
                rec(k + 1)
        del assign[a]

    rec(0)
    return out


# ── State enumeration ───────────────────────────────────────────────────────

@dataclass
class _Model:
    primitives: list[GroundAtom]
    complex: list[GroundAtom]
    statics: list[GroundAtom]
    defined: dict


def _collect(at: ActionTheory) -> _Model:
    statics = set()
    formulas: list[pl.Formula] = [at.precondition] + list(at.defined.values())
    for p in at.succ.values():
        formulas += p.pos_init + p.neg_init + p.pos_succ + p.neg_succ
    for f in at.init_axioms:
        statics |= {a.atom for a in f.atoms() if a.time == "static"}
    for f in formulas:
        statics |= {a for a in f.atoms() if a.kind == "static"}
    return _Model(list(at.succ), list(at.defined),
                  sorted(statics, key=lambda a: a.sort_key), at.defined)


def _ground_value(model: _Model, state: dict):
    """Value function for ground atoms; complex atoms via their definitions."""
    def value(a: GroundAtom) -> Optional[bool]:
        if a.kind == "complex":
            return kleene(model.defined[a], value)
        return state.get(a)
    return value


def _deps(model: _Model, f: pl.Formula) -> set:
    out = set()
    for a in f.atoms():
        if a.kind == "complex":
            out |= _deps(model, model.defined[a])
        else:
            out.add(a)
    return out


def init_constraints(at: ActionTheory) -> list[pl.Formula]:
    """Domain constraints over ground atoms, read at a single time point:
    axioms, causal rules as implications, and the precondition."""
    out = [pl.map_atoms(ax, lambda p: pl.Var(p.atom)) for ax in _axioms(at)]
    for fl, p in at.succ.items():
        for c in p.pos_succ:
            out.append(pl.implies(c, pl.Var(fl)))
        for c in p.neg_succ:
            out.append(pl.implies(c, pl.neg(pl.Var(fl))))
    out.append(at.precondition)
    return out


def _axioms(at: ActionTheory) -> list[pl.Formula]:
    # domain axioms mention only static atoms; the rest of Init is rebuilt here
    return [f for f in at.init_axioms
            if all(a.time == "static" for a in f.atoms())]


def legal_init_states(at: ActionTheory, cap: int = DEFAULT_CAP) -> list[dict]:
    """All initial states (primitive fluents and static atoms) satisfying the
    constraints.  States map GroundAtom -> bool."""
    model = _collect(at)
    vocab = model.primitives + model.statics
    if len(vocab) > cap:
        raise OracleRefused(f"{at.action}: {len(vocab)} init atoms exceed cap {cap}")
    constraints = []
    for f in init_constraints(at):
        constraints.append((_deps(model, f), _checker(model, f)))
    return _search(vocab, constraints, {})


def _checker(model: _Model, f: pl.Formula):
    def check(state: dict) -> Optional[bool]:
        return kleene(f, _ground_value(model, state))
    return check


def successor_states(at: ActionTheory, m: dict, cap: int = DEFAULT_CAP) -> list[dict]:
    """All successor states (primitive fluents) satisfying every pseudo
    successor state axiom under initial state m.

    Search with forward evaluation: whenever the right-hand side of a
    fluent's axiom is already determined by the partial state, the fluent
    takes that value.
    """
    model = _collect(at)
    if len(model.primitives) > cap:
        raise OracleRefused(f"{at.action}: {len(model.primitives)} succ atoms exceed cap {cap}")
    init_value = _ground_value(model, m)
    statics = {a: m[a] for a in model.statics}
    rhs = {}
    for fl, p in at.succ.items():
        pos_now = any(kleene(c, init_value) for c in p.pos_init)
        neg_now = any(kleene(c, init_value) for c in p.neg_init)
        rhs[fl] = _succ_rhs(model, p, pos_now, neg_now, m[fl])
    out: list[dict] = []

    def rec(state: dict) -> None:
        changed = True
        while changed:
            changed = False
            for fl in model.primitives:
                v = rhs[fl](state)
                if v is None:
                    continue
                have = state.get(fl)
                if have is None:
                    state[fl] = v
                    changed = True
                elif have != v:
                    return
        free = [fl for fl in model.primitives if fl not in state]
        if not free:
            out.append({a: state[a] for a in model.primitives})
            return
        for v in (False, True):
            rec({**state, free[0]: v})

    rec(dict(statics))
    return sorted(out, key=lambda s: [s[a] for a in model.primitives])


def _succ_rhs(model, p, pos_now, neg_now, was):
    """Three-valued right-hand side of one pseudo successor state axiom."""
    def rhs(state: dict) -> Optional[bool]:
        if pos_now:
            return True
        value = _ground_value(model, state)
        pos = _any3(kleene(c, value) for c in p.pos_succ)
        if pos is True:
            return True
        neg = True if neg_now else _any3(kleene(c, value) for c in p.neg_succ)
        return _or3(pos, _and3(was, _not3(neg)))
    return rhs


def _any3(vals: Iterable[Optional[bool]]) -> Optional[bool]:
    unknown = False
    for v in vals:
        if v is True:
            return True
        unknown = unknown or v is None
    return None if unknown else False


def _not3(v):
    return None if v is None else not v


def _and3(a, b):
    if a is False or b is False:
        return False
    return None if a is None or b is None else True


def _or3(a, b):
    if a is True or b is True:
        return True
    return None if a is None or b is None else False


# ── Verification ────────────────────────────────────────────────────────────

@dataclass
class Witness:
    init: dict[str, bool]
    fluent: Optional[str]
    detail: str

    def __str__(self) -> str:
        true_atoms = ", ".join(sorted(k for k, v in self.init.items() if v))
        where = f" on {self.fluent}" if self.fluent else ""
        return f"{self.detail}{where} in init state {{{true_atoms}}}"


@dataclass
class OracleReport:
    action: str
    init_states: int = 0
    mismatches: list[Witness] = field(default_factory=list)
    skipped: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.skipped is None and not self.mismatches


def _init_value(model: _Model, m: dict):
    """Value function for init/static PropAtoms under initial state m."""
    ground = _ground_value(model, m)

    def value(a) -> Optional[bool]:
        return ground(a.atom)
    return value


def _named(m: dict) -> dict[str, bool]:
    return {str(a): v for a, v in m.items()}


def verify_action(at: ActionTheory, ca: CompiledAction, cap: int = DEFAULT_CAP) -> OracleReport:
    """Compare the compiled per-fluent results with direct enumeration.

    For every legal initial state m and every fluent F:
      * the necessary condition holds in m iff some successor makes F true;
      * the sufficient condition holds in m iff every successor makes F true;
    and the set of successors equals the set of states allowed by the
    compiled bounds.  Determinate results have equal bounds, so for them
    this is the statement that succ(F) <-> SSA is exactly right.
    """
    report = OracleReport(str(ca.action))
    if not ca.ok:
        report.skipped = "; ".join(ca.diagnostics)
        return report
    try:
        states = legal_init_states(at, cap)
    except OracleRefused as e:
        report.skipped = str(e)
        return report
    report.init_states = len(states)
    model = _collect(at)
    fluents = list(ca.fluents)
    for m in states:
        succs = successor_states(at, m, cap)
        if not succs:
            report.mismatches.append(Witness(_named(m), None, "no successor state"))
            continue
        init_value = _init_value(model, m)
        oracle_rows = set()
        for s in succs:
            value = _ground_value(model, {**s, **{a: m[a] for a in model.statics}})
            oracle_rows.add(tuple(value(f) for f in fluents))
        allowed = []
        for k, f in enumerate(fluents):
            nec, suf = bounds(f, ca.fluents[f])
            nv, sv = kleene(nec, init_value), kleene(suf, init_value)
            some = any(row[k] for row in oracle_rows)
            every = all(row[k] for row in oracle_rows)
            if nv != some:
                report.mismatches.append(Witness(_named(m), str(f),
                                                 f"necessary condition is {nv}, oracle says {some}"))
            if sv != every:
                report.mismatches.append(Witness(_named(m), str(f),
                                                 f"sufficient condition is {sv}, oracle says {every}"))
            allowed.append((nv, sv))
        # the compiled model set: successor rows within every fluent's bounds
        boxed = {row for row in _box_rows(model, m, allowed, fluents)}
        if boxed != oracle_rows:
            report.mismatches.append(Witness(_named(m), None,
                                             f"compiled output allows {len(boxed)} successor "
                                             f"states, oracle finds {len(oracle_rows)}"))
    return report


def _box_rows(model: _Model, m: dict, allowed, fluents):
    """Successor rows (primitive choices, complex derived) whose every fluent
    lies between its sufficient and necessary condition."""
    index = {f: k for k, f in enumerate(fluents)}
    prims = model.primitives
    statics = {a: m[a] for a in model.statics}

    def fits(f, v) -> bool:
        nv, sv = allowed[index[f]]
        return (v or not sv) and (not v or nv)

    choices = []
    for p in prims:
        choices.append([v for v in (False, True) if fits(p, v)])
    out = []

    def rec(k: int, state: dict) -> None:
        if k == len(prims):
            value = _ground_value(model, {**state, **statics})
            row = tuple(value(f) for f in fluents)
            if all(fits(f, row[index[f]]) for f in model.complex):
                out.append(row)
            return
        for v in choices[k]:
            state[prims[k]] = v
            rec(k + 1, state)
        state.pop(prims[k], None)

    rec(0, {})
    return out


def verify_strips(at: ActionTheory, se: StripsEntry, cap: int = DEFAULT_CAP) -> OracleReport:
    """For context-free actions: add/delete applied to each legal initial
    state must give the unique successor."""
    report = OracleReport(str(at.action))
    if not se.context_free:
        report.skipped = "action has conditional or indeterminate effects"
        return report
    if not isinstance(se.preconditions, list):
        report.skipped = "precondition is not a conjunction of literals"
        return report
    try:
        states = legal_init_states(at, cap)
    except OracleRefused as e:
        report.skipped = str(e)
        return report
    report.init_states = len(states)
    model = _collect(at)
    fluents = model.primitives + model.complex
    add, delete = set(se.add), set(se.delete)
    for m in states:
        before = _ground_value(model, m)
        for lit in se.preconditions:
            if before(lit.atom) != lit.positive:
                report.mismatches.append(Witness(_named(m), str(lit.atom),
                                                 "legal init state violates a listed precondition"))
        succs = successor_states(at, m, cap)
        if len(succs) != 1:
            report.mismatches.append(Witness(_named(m), None,
                                             f"{len(succs)} successor states, expected 1"))
            continue
        after = _ground_value(model, {**succs[0], **{a: m[a] for a in model.statics}})
        for f in fluents:
            expect = True if f in add else False if f in delete else before(f)
            if after(f) != expect:
                report.mismatches.append(Witness(_named(m), str(f),
                                                 f"STRIPS predicts {expect}, oracle says {after(f)}"))
    return report


def verify_domain(compiled: list[CompiledAction], cap: int = DEFAULT_CAP) -> list[OracleReport]:
    return [verify_action(ca.theory, ca, cap) for ca in compiled]
