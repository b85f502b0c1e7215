"""
compiler.py - Per-action successor state axioms and STRIPS-like entries.

For every action instance A the compiler builds three formula sets over
timed atoms:

  Init   domain axioms, causal rules and definitions at the initial time,
         plus A's precondition;
  Succ   one pseudo successor state axiom per primitive fluent F,
           succ(F) <-> pos effects | pos rules | (init(F) & -(neg effects | neg rules))
         where effect conditions are read at the initial time and rule
         conditions at the successor time;
  Succ1  succ(G) <-> succ(body) for each complex fluent G.

It then solves Succ for every succ(F) in terms of init/static atoms:
unit-simplify, resolve axioms that are already solved, detect frame axioms
by unit resolution, and fall back to strongest necessary / weakest
sufficient conditions obtained by forgetting the successor atoms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from . import proplogic as pl
from .grounder import ActionInstance, GroundAtom, GroundTheory
from .proplogic import Formula, PropAtom, init_atom, succ_atom


# ── Lifting ground formulas to a time point ─────────────────────────────────

def lift(f: Formula, time: str, defined: Optional[dict] = None) -> Formula:
    """Wrap the ground atoms of f as init(.)/succ(.) atoms.

    Static atoms stay situation independent.  When `defined` is given,
    complex fluent atoms are replaced by their (lifted) definitions.
    """
    def at(a: GroundAtom) -> Formula:
        if a.kind == "static":
            return pl.Var(pl.static_atom(a))
        if defined is not None and a.kind == "complex":
            return lift(defined[a], time)
        return pl.Var(PropAtom(time, a))
    return pl.map_atoms(f, at)


def succ_atoms(f: Formula) -> set:
    return {a for a in f.atoms() if isinstance(a, PropAtom) and a.time == "succ"}


# ── Action theories ─────────────────────────────────────────────────────────

@dataclass
class PseudoSSA:
    """The pseudo successor state axiom of one primitive fluent.

    Condition lists hold ground formulas; pos_init/neg_init are read at the
    initial time, pos_succ/neg_succ at the successor time.
    """
    fluent: GroundAtom
    pos_init: list[Formula] = field(default_factory=list)
    neg_init: list[Formula] = field(default_factory=list)
    pos_succ: list[Formula] = field(default_factory=list)
    neg_succ: list[Formula] = field(default_factory=list)

    def rhs(self, defined: Optional[dict] = None) -> Formula:
        pos = [lift(c, "init", defined) for c in self.pos_init] + \
              [lift(c, "succ", defined) for c in self.pos_succ]
        neg = [lift(c, "init", defined) for c in self.neg_init] + \
              [lift(c, "succ", defined) for c in self.neg_succ]
        return pl.disj(*pos, pl.conj(pl.Var(init_atom(self.fluent)), pl.neg(pl.disj(*neg))))

    def formula(self, defined: Optional[dict] = None) -> Formula:
        return pl.iff(pl.Var(succ_atom(self.fluent)), self.rhs(defined))


@dataclass
class ActionTheory:
    action: ActionInstance
    init_axioms: list[Formula]
    succ: dict[GroundAtom, PseudoSSA]
    succ1: dict[GroundAtom, Formula]
    neg_effect_implications: list[Formula]
    defined: dict[GroundAtom, Formula]
    precondition: Formula                       # ground, unlifted
    succ_constraints: list[Formula] = field(default_factory=list)

    def init_theory(self) -> list[Formula]:
        """Init with complex atoms replaced by their definitions."""
        out = []
        for f in self.init_axioms:
            g = pl.map_atoms(f, self._expand_atom)
            if g != pl.TRUE:
                out.append(g)
        return out

    def succ_theory(self) -> list[Formula]:
        """Succ with complex atoms replaced by their definitions (this makes
        Succ1 redundant)."""
        return [p.formula(self.defined) for p in self.succ.values()]

    def successor_constraints(self) -> list[Formula]:
        """Domain axioms and rules lifted to the successor state, complex
        atoms expanded."""
        return [pl.map_atoms(f, self._expand_atom) for f in self.succ_constraints]

    def full_theory(self) -> list[Formula]:
        return self.init_axioms + [p.formula() for p in self.succ.values()] + \
            list(self.succ1.values())

    def _expand_atom(self, a) -> Formula:
        if isinstance(a, PropAtom) and a.time != "static" and a.atom.kind == "complex":
            return lift(self.defined[a.atom], a.time)
        return pl.Var(a)

    def init_vocabulary(self) -> list[PropAtom]:
        """Primitive init atoms and static atoms, canonical order."""
        prims = [init_atom(f) for f in self.succ]
        statics = set()
        for f in self.init_theory() + self.succ_theory():
            statics |= {a for a in f.atoms() if a.time == "static"}
        return prims + sorted(statics, key=pl.atom_key)


def build_action_theory(gt: GroundTheory, a: ActionInstance) -> ActionTheory:
    succ = {f: PseudoSSA(f) for f in gt.primitive_atoms}
    neg_impl = []
    for e in gt.effects.get(a, []):
        p = succ[e.atom]
        (p.pos_init if e.positive else p.neg_init).append(e.condition)
        if not e.positive:
            neg_impl.append(pl.implies(lift(e.condition, "init"), pl.neg(pl.Var(succ_atom(e.atom)))))
    init_axioms = [lift(ax, "init") for ax in gt.axioms]
    succ_constraints = [lift(ax, "succ") for ax in gt.axioms]
    for r in gt.causes:
        p = succ[r.atom]
        (p.pos_succ if r.positive else p.neg_succ).append(r.condition)
        for time, out in (("init", init_axioms), ("succ", succ_constraints)):
            head = pl.Var(PropAtom(time, r.atom))
            out.append(pl.implies(lift(r.condition, time), head if r.positive else pl.neg(head)))
    for g, body in gt.defined.items():
        init_axioms.append(pl.iff(pl.Var(init_atom(g)), lift(body, "init")))
    init_axioms.append(lift(gt.preconds[a], "init"))
    succ1 = {g: pl.iff(pl.Var(succ_atom(g)), lift(body, "succ")) for g, body in gt.defined.items()}
    return ActionTheory(a, init_axioms, succ, succ1, neg_impl, dict(gt.defined), gt.preconds[a],
                        succ_constraints)


def check_action_consistency(at: ActionTheory) -> bool:
    """Init, Succ, Succ1 and init(cond) -> -succ(F) for each negative
    effect are jointly satisfiable."""
    return pl.Theory(at.full_theory() + at.neg_effect_implications).satisfiable()


class CapExceeded(Exception):
    pass


def check_init_extendability(at: ActionTheory, cap: int = 24) -> bool:
    """Every complete init state allowed by Init extends to a model of
    Succ and Succ1 in which the domain axioms and rules also hold at the
    successor state.  Enumerates the Init models over the primitive
    init + static vocabulary; refuses above `cap` atoms."""
    vocab = at.init_vocabulary()
    if len(vocab) > cap:
        raise CapExceeded(f"init vocabulary has {len(vocab)} atoms (cap {cap})")
    init_th = pl.Theory(at.init_theory())
    rows = init_th.projected_models(vocab)
    succ_th = pl.Theory(at.succ_theory() + at.successor_constraints())
    for row in rows:
        lits = [pl.Var(a) if v else pl.neg(pl.Var(a)) for a, v in zip(vocab, row)]
        if not succ_th.satisfiable(*lits):
            return False
    return True


# ── Compiled results ────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ConstantTrue:
    pass


@dataclass(frozen=True)
class ConstantFalse:
    pass


@dataclass(frozen=True)
class Frame:
    pass


@dataclass(frozen=True)
class Determinate:
    ssa: Formula


@dataclass(frozen=True)
class Indeterminate:
    nec: Formula
    suf: Formula


CompiledFluent = Union[ConstantTrue, ConstantFalse, Frame, Determinate, Indeterminate]


def bounds(fluent: GroundAtom, r: CompiledFluent) -> tuple[Formula, Formula]:
    """(necessary, sufficient) condition of succ(fluent) over init atoms."""
    if isinstance(r, ConstantTrue):
        return pl.TRUE, pl.TRUE
    if isinstance(r, ConstantFalse):
        return pl.FALSE, pl.FALSE
    if isinstance(r, Frame):
        v = pl.Var(init_atom(fluent))
        return v, v
    if isinstance(r, Determinate):
        return r.ssa, r.ssa
    return r.nec, r.suf


def ssa_of(fluent: GroundAtom, r: CompiledFluent) -> Optional[Formula]:
    """The right-hand side of succ(fluent) <-> ..., or None if indeterminate."""
    if isinstance(r, Indeterminate):
        return None
    return bounds(fluent, r)[0]


@dataclass
class StripsEntry:
    preconditions: Union[list[pl.Lit], Formula]
    add: list[GroundAtom]
    delete: list[GroundAtom]
    conditional: dict[GroundAtom, Formula]
    indeterminate: dict[GroundAtom, tuple[Formula, Formula]]

    @property
    def context_free(self) -> bool:
        return not self.conditional and not self.indeterminate


@dataclass
class CompiledAction:
    action: ActionInstance
    fluents: dict[GroundAtom, CompiledFluent]
    strips: Optional[StripsEntry] = None
    diagnostics: list[str] = field(default_factory=list)
    theory: Optional[ActionTheory] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


@dataclass
class CompileOptions:
    check_init: bool = False
    init_cap: int = 24
    minimize_atoms: int = 10


class SolveError(Exception):
    pass


# ── The solver ──────────────────────────────────────────────────────────────

class _Solver:
    def __init__(self, at: ActionTheory, options: CompileOptions):
        self.at = at
        self.options = options
        self.init = at.init_theory()
        self.init_th = pl.Theory(self.init)
        self.vocab = set(at.init_vocabulary())
        self.init_clauses = list(pl.clausify(self.init))
        units = pl.unit_closure(self.init_clauses)
        if units is pl.CONFLICT:
            raise SolveError("precondition is inconsistent with the domain constraints")
        self.units = [l for l in units if not isinstance(l.atom, pl.Aux)]
        self.pending: dict[GroundAtom, Formula] = {}
        self.subst: dict[PropAtom, Formula] = {}
        self.solved: dict[GroundAtom, tuple[str, Formula]] = {}   # how, rhs
        self.indeterminate: dict[GroundAtom, tuple[Formula, Formula]] = {}

    # ---- helpers

    def entails(self, f: Formula) -> bool:
        return self.init_th.entails(f)

    def tidy(self, f: Formula) -> Formula:
        f = pl.simplify(f, self.units)
        if len(f.atoms()) <= self.options.minimize_atoms:
            return pl.minimize(f, self.init_th, self.options.minimize_atoms)
        return pl.canonicalize(f)

    def resolve(self, fl: GroundAtom, how: str, rhs: Formula) -> None:
        self.solved[fl] = (how, rhs)
        self.subst[succ_atom(fl)] = rhs
        self.pending.pop(fl, None)

    # ---- substitution and frame detection

    def propagate(self) -> None:
        changed = True
        while changed:
            changed = False
            for fl in list(self.pending):
                rhs = pl.simplify(pl.substitute(self.pending[fl], self.subst), self.units)
                self.pending[fl] = rhs
                if not succ_atoms(rhs):
                    how = "const" if isinstance(rhs, pl.Const) else \
                        "frame" if rhs == pl.Var(init_atom(fl)) else "solved"
                    self.resolve(fl, how, rhs)
                    changed = True
            if changed:
                continue
            for fl in self.frame_candidates():
                self.resolve(fl, "frame", pl.Var(init_atom(fl)))
                changed = True
                break

    def frame_candidates(self) -> list[GroundAtom]:
        cands = []
        for fl, rhs in self.pending.items():
            if fl in self.indeterminate:
                continue
            v = pl.Var(init_atom(fl))
            if isinstance(rhs, pl.And) and v in rhs.args:
                cands.append(fl)
        if not cands:
            return []
        succ_clauses = list(pl.clausify([pl.iff(pl.Var(succ_atom(g)), r)
                                         for g, r in self.pending.items()]))
        base = self.init_clauses + succ_clauses
        out = []
        theory = None
        for fl in cands:
            closure = pl.unit_closure(base + [frozenset([pl.Lit(init_atom(fl), True)])])
            if closure is not pl.CONFLICT and pl.Lit(succ_atom(fl), True) not in closure:
                continue
            # unit resolution is sound, but confirm the frame axiom outright
            if theory is None:
                theory = pl.Theory(self.init + [pl.iff(pl.Var(succ_atom(g)), r)
                                                for g, r in self.pending.items()])
            if theory.entails(pl.iff(pl.Var(succ_atom(fl)), pl.Var(init_atom(fl)))):
                out.append(fl)
        return out

    # ---- necessary and sufficient conditions

    def component(self, start_atoms: set) -> list[Formula]:
        """Pending axioms connected to the given succ atoms."""
        by_atom = {succ_atom(g): g for g in self.pending}
        todo = [a for a in start_atoms if a in by_atom]
        seen = set(todo)
        out = []
        while todo:
            a = todo.pop()
            g = by_atom[a]
            rhs = self.pending[g]
            out.append(pl.iff(pl.Var(a), rhs))
            for b in succ_atoms(rhs):
                if b in by_atom and b not in seen:
                    seen.add(b)
                    todo.append(b)
        return sorted(out, key=pl.sort_key)

    def conditions(self, target: Formula) -> tuple[Formula, Formula, bool]:
        """(snc, wsc under Init plus snc, whether the two coincide)."""
        comp = self.component(succ_atoms(target))
        hidden = set(succ_atoms(target))
        for c in comp:
            hidden |= succ_atoms(c)
        alpha = pl.forget(comp + [target], hidden)
        beta = pl.neg(pl.forget(comp + [alpha, pl.neg(target)], hidden))
        alpha = pl.simplify(alpha, self.units)
        beta = pl.simplify(beta, self.units)
        return alpha, beta, self.entails(beta)

    def condition_next(self) -> bool:
        for fl in self.pending:
            if fl in self.indeterminate:
                continue
            alpha, beta, determinate = self.conditions(pl.Var(succ_atom(fl)))
            if determinate:
                self.resolve(fl, "solved", alpha)
            else:
                self.indeterminate[fl] = (alpha, pl.conj(alpha, beta))
            return True
        return False

    # ---- classification

    def classify(self, fl: GroundAtom, how: str, rhs: Formula) -> CompiledFluent:
        init_f = pl.Var(init_atom(fl))
        if how == "frame":
            return Frame()
        if rhs == pl.TRUE:
            return ConstantTrue()
        if rhs == pl.FALSE:
            return ConstantFalse()
        if how == "const":
            raise AssertionError("constant with non-constant rhs")
        if self.entails(rhs):
            return ConstantTrue()
        if self.entails(pl.neg(rhs)):
            return ConstantFalse()
        if self.entails(pl.iff(rhs, init_f)):
            return Frame()
        return Determinate(self.tidy(rhs))

    def changed(self, fl: GroundAtom, results: dict) -> bool:
        r = results[fl]
        if isinstance(r, Frame):
            return False
        if isinstance(r, Indeterminate):
            return True
        return not self.entails(pl.iff(ssa_of(fl, r), pl.Var(init_atom(fl))))

    def run(self) -> dict[GroundAtom, CompiledFluent]:
        at = self.at
        for fl, p in at.succ.items():
            self.pending[fl] = p.rhs(at.defined)
        self.propagate()
        while self.condition_next():
            self.propagate()

        results: dict[GroundAtom, CompiledFluent] = {}
        for fl in at.succ:
            if fl in self.solved:
                how, rhs = self.solved[fl]
                results[fl] = self.classify(fl, how, rhs)
            else:
                nec, suf = self.indeterminate[fl]
                results[fl] = Indeterminate(self.tidy(nec), self.tidy(suf))

        for g, body in at.defined.items():
            prims = {a for a in body.atoms() if a.kind != "static"}
            if not any(self.changed(p, results) for p in prims):
                results[g] = Frame()
                continue
            if all(not isinstance(results[p], Indeterminate) for p in prims):
                rhs = pl.map_atoms(body, lambda a: pl.Var(pl.static_atom(a)) if a.kind == "static"
                                   else ssa_of(a, results[a]))
                results[g] = self.classify(g, "solved", pl.simplify(rhs, self.units))
                continue
            target = pl.substitute(lift(body, "succ"), self.subst)
            alpha, beta, determinate = self.conditions(target)
            if determinate:
                results[g] = self.classify(g, "solved", alpha)
            else:
                results[g] = Indeterminate(self.tidy(alpha), self.tidy(pl.conj(alpha, beta)))
        return {fl: results[fl] for fl in sorted(results, key=lambda a: a.sort_key)}


def solve(at: ActionTheory, options: Optional[CompileOptions] = None) -> CompiledAction:
    """Solve the pseudo successor state axioms of one action."""
    options = options or CompileOptions()
    try:
        fluents = _Solver(at, options).run()
    except SolveError as e:
        return CompiledAction(at.action, {}, None, [str(e)], at)
    return CompiledAction(at.action, fluents, None, [], at)


# ── STRIPS extraction ───────────────────────────────────────────────────────

def precondition_literals(pre: Formula) -> Optional[list[pl.Lit]]:
    """The literals of a conjunction of literals (None otherwise)."""
    parts = pl.conjuncts(pre)
    if not all(pl.is_literal(p) for p in parts):
        return None
    lits = [pl.literal_of(p) for p in parts]
    return sorted(lits, key=lambda l: (l.atom.sort_key, not l.positive))


def extract_strips(ca: CompiledAction, init_axioms: list[Formula]) -> StripsEntry:
    th = pl.Theory(init_axioms)
    add, delete, cond, indet = [], [], {}, {}
    for fl, r in ca.fluents.items():
        v = pl.Var(init_atom(fl))
        if isinstance(r, ConstantTrue):
            if not th.entails(v):
                add.append(fl)
        elif isinstance(r, ConstantFalse):
            if not th.entails(pl.neg(v)):
                delete.append(fl)
        elif isinstance(r, Determinate):
            cond[fl] = r.ssa
        elif isinstance(r, Indeterminate):
            indet[fl] = (r.nec, r.suf)
    pre = ca.theory.precondition if ca.theory is not None else pl.TRUE
    lits = precondition_literals(pre)
    return StripsEntry(lits if lits is not None else pre, add, delete, cond, indet)


# ── Whole domains ───────────────────────────────────────────────────────────

def compile_action(gt: GroundTheory, a: ActionInstance,
                   options: Optional[CompileOptions] = None) -> CompiledAction:
    options = options or CompileOptions()
    at = build_action_theory(gt, a)
    if not check_action_consistency(at):
        return CompiledAction(a, {}, None, [f"{a}: action theory is inconsistent "
                                            "(contradictory effects or rules)"], at)
    if options.check_init:
        try:
            if not check_init_extendability(at, options.init_cap):
                return CompiledAction(a, {}, None, [f"{a}: some initial states allowed by "
                                                    "the constraints have no successor"], at)
        except CapExceeded as e:
            return CompiledAction(a, {}, None, [f"{a}: init extendability check refused: {e}"], at)
    ca = solve(at, options)
    if ca.ok:
        ca.strips = extract_strips(ca, at.init_theory())
    else:
        ca.diagnostics = [f"{a}: {d}" for d in ca.diagnostics]
    return ca


def compile_domain(gt: GroundTheory, options: Optional[CompileOptions] = None
                   ) -> list[CompiledAction]:
    """Compile every action instance in canonical order.  A failing action
    carries diagnostics and does not stop the others."""
    return [compile_action(gt, a, options) for a in gt.actions]
