"""
grounder.py - Instantiate a description over its finite type domains.

Produces the legal fluent/static atoms, the action instances, and ground
versions of every effect, causal rule, definition, precondition and axiom.
Ground formulas are ``proplogic`` formulas whose atoms are ``GroundAtom``s.

Two different policies for ill-formed atoms:
  * instantiating the free variables of an effect or causal rule skips any
    substitution that produces an atom outside the legal set;
  * expanding a quantifier, or grounding a definition/precondition/axiom,
    that produces such an atom is a coherence error.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from . import proplogic as pl
from . import syntax as sx


# ── Ground objects ──────────────────────────────────────────────────────────

def _render(name: str, args: tuple[str, ...]) -> str:
    return f"{name}({','.join(args)})" if args else name


@dataclass(frozen=True)
class GroundAtom:
    predicate: str
    args: tuple[str, ...] = ()
    kind: str = field(default="fluent", compare=False)   # fluent | complex | static | illegal
    rank: tuple[int, ...] = field(default=(), compare=False)

    def __str__(self) -> str:
        return _render(self.predicate, self.args)

    @property
    def sort_key(self) -> tuple:
        return (self.predicate, self.rank, self.args)


@dataclass(frozen=True)
class ActionInstance:
    action: str
    args: tuple[str, ...] = ()
    rank: tuple[int, ...] = field(default=(), compare=False)

    def __str__(self) -> str:
        return _render(self.action, self.args)

    @property
    def sort_key(self) -> tuple:
        return (self.action, self.rank, self.args)


@dataclass(frozen=True)
class GroundEffect:
    action: ActionInstance
    condition: pl.Formula
    atom: GroundAtom
    positive: bool


@dataclass(frozen=True)
class GroundRule:
    condition: pl.Formula
    atom: GroundAtom
    positive: bool


class CoherenceError(sx.DescriptionError):
    """Grounding produced atoms that are not legal fluent or static atoms."""


@dataclass
class GroundTheory:
    fluent_atoms: list[GroundAtom]          # primitive then complex, canonical order
    static_atoms: list[GroundAtom]
    actions: list[ActionInstance]
    effects: dict[ActionInstance, list[GroundEffect]]
    causes: list[GroundRule]
    defined: dict[GroundAtom, pl.Formula]
    preconds: dict[ActionInstance, pl.Formula]
    axioms: list[pl.Formula]
    types: dict[str, tuple[str, ...]] = field(default_factory=dict)
    illegal: list[tuple[GroundAtom, str]] = field(default_factory=list)

    @property
    def primitive_atoms(self) -> list[GroundAtom]:
        return [a for a in self.fluent_atoms if a.kind == "fluent"]

    @property
    def complex_atoms(self) -> list[GroundAtom]:
        return [a for a in self.fluent_atoms if a.kind == "complex"]

    def atom_table(self) -> dict[str, GroundAtom]:
        return {str(a): a for a in self.fluent_atoms + self.static_atoms}

    def action(self, text: str) -> ActionInstance:
        for a in self.actions:
            if str(a) == text.replace(" ", ""):
                return a
        raise KeyError(text)

    def to_json(self) -> dict:
        """Plain-data form used by ``--dump-ground``."""
        def fs(f: pl.Formula) -> str:
            return pl.to_text(f)
        return {
            "fluent_atoms": [{"atom": str(a), "kind": a.kind} for a in self.fluent_atoms],
            "static_atoms": [str(a) for a in self.static_atoms],
            "actions": [str(a) for a in self.actions],
            "preconditions": {str(a): fs(self.preconds[a]) for a in self.actions},
            "effects": [
                {"action": str(e.action), "condition": fs(e.condition),
                 "head": str(e.atom) if e.positive else f"-{e.atom}"}
                for a in self.actions for e in self.effects.get(a, [])
            ],
            "causes": [
                {"condition": fs(r.condition),
                 "head": str(r.atom) if r.positive else f"-{r.atom}"}
                for r in self.causes
            ],
            "defined": {str(a): fs(f) for a, f in self.defined.items()},
            "axioms": [fs(f) for f in self.axioms],
        }


# ── Enumeration ─────────────────────────────────────────────────────────────

def _guard_instances(schema: sx.Atom, guard, types: dict[str, tuple[str, ...]]
                     ) -> Iterator[tuple[tuple[str, ...], tuple[int, ...]]]:
    """Yield (args, rank) for every guard-satisfying instance of a schema."""
    names = [v.name for v in schema.args]
    doms: dict[str, Optional[list[str]]] = {n: None for n in names}
    first_type: dict[str, str] = {}
    for g in guard:
        if isinstance(g, sx.TypeGuard):
            consts = list(types.get(g.type, ()))
            first_type.setdefault(g.var.name, g.type)
            cur = doms.get(g.var.name)
            doms[g.var.name] = consts if cur is None else [c for c in cur if c in set(consts)]
    neqs = [g for g in guard if isinstance(g, sx.Neq)]
    lists = [doms[n] or [] for n in names]
    for combo in itertools.product(*lists):
        env = dict(zip(names, combo))

        def val(t):
            return env.get(t.name) if isinstance(t, sx.Variable) else t.name
        if all(val(g.left) != val(g.right) for g in neqs):
            index = [types[first_type[n]].index(c) for n, c in zip(names, combo)]
            yield tuple(combo), tuple(index)


def _atoms_of_kind(desc: sx.SourceDescription, kinds, label: str) -> list[GroundAtom]:
    types = desc.types()
    out = []
    for s in desc.of_kind(kinds):
        for args, rank in _guard_instances(s.schema, s.guard, types):
            out.append(GroundAtom(s.schema.predicate, args, label, rank))
    return sorted(out, key=lambda a: a.sort_key)


def enumerate_fluent_atoms(desc: sx.SourceDescription) -> list[GroundAtom]:
    """Legal primitive and complex fluent atoms in canonical order."""
    atoms = _atoms_of_kind(desc, sx.FluentDef, "fluent") + \
        _atoms_of_kind(desc, sx.ComplexDef, "complex")
    return sorted(atoms, key=lambda a: a.sort_key)


def enumerate_static_atoms(desc: sx.SourceDescription) -> list[GroundAtom]:
    return _atoms_of_kind(desc, sx.StaticDef, "static")


def enumerate_action_instances(desc: sx.SourceDescription) -> list[ActionInstance]:
    types = desc.types()
    out = []
    for s in desc.of_kind(sx.ActionDef):
        for args, rank in _guard_instances(s.schema, s.guard, types):
            out.append(ActionInstance(s.schema.predicate, args, rank))
    return sorted(out, key=lambda a: a.sort_key)


# ── Formula grounding ───────────────────────────────────────────────────────

class _Context:
    def __init__(self, desc: sx.SourceDescription):
        self.desc = desc
        self.types = desc.types()
        self.objects = [c for cs in self.types.values() for c in cs]
        self.objects = list(dict.fromkeys(self.objects))
        fluents = enumerate_fluent_atoms(desc)
        statics = enumerate_static_atoms(desc)
        self.legal: dict[tuple[str, tuple[str, ...]], GroundAtom] = {
            (a.predicate, a.args): a for a in fluents + statics}
        self.fluents = fluents
        self.statics = statics
        self.predicates = {s.schema.predicate for s in desc.of_kind(
            (sx.FluentDef, sx.ComplexDef, sx.StaticDef))}
        self.positions = sx.variable_positions(desc)
        self.illegal: dict[GroundAtom, str] = {}

    def constant(self, t: sx.Term, env: dict[str, str]) -> str:
        if isinstance(t, sx.Variable):
            try:
                return env[t.name]
            except KeyError:
                raise sx.DescriptionError([sx.Diagnostic(f"unbound variable {t.name}")]) from None
        return t.name

    def atom(self, a: sx.Atom, env: dict[str, str]) -> tuple[Optional[GroundAtom], tuple]:
        args = tuple(self.constant(t, env) for t in a.args)
        return self.legal.get((a.predicate, args)), args


def ground_formula(f: sx.Formula, subst: dict[str, str], desc_or_ctx,
                   where: str = "") -> pl.Formula:
    """Ground f under subst, expanding quantifiers over their type domains.

    An atom that is not legal is a coherence error; it is recorded on the
    context (and raised by the caller in strict mode) and kept in the
    formula as an atom of kind "illegal".
    """
    ctx = desc_or_ctx if isinstance(desc_or_ctx, _Context) else _Context(desc_or_ctx)
    return _ground(f, dict(subst), ctx, where, strict_atoms=True)


def _ground(f: sx.Formula, env: dict[str, str], ctx: _Context, where: str,
            strict_atoms: bool) -> Optional[pl.Formula]:
    """Returns None (only when strict_atoms is False) if an atom is illegal."""
    if isinstance(f, sx.Top):
        return pl.TRUE
    if isinstance(f, sx.Bottom):
        return pl.FALSE
    if isinstance(f, sx.Atom):
        if f.predicate in ctx.types and f.predicate not in ctx.predicates:
            c = ctx.constant(f.args[0], env)
            return pl.TRUE if c in ctx.types[f.predicate] else pl.FALSE
        g, args = ctx.atom(f, env)
        if g is not None:
            return pl.Var(g)
        if not strict_atoms:
            return None
        bad = GroundAtom(f.predicate, args, "illegal")
        ctx.illegal.setdefault(bad, where)
        return pl.Var(bad)
    if isinstance(f, (sx.Eq, sx.Neq)):
        same = ctx.constant(f.left, env) == ctx.constant(f.right, env)
        return pl.TRUE if same == isinstance(f, sx.Eq) else pl.FALSE
    if isinstance(f, (sx.Forall, sx.Exists)):
        parts = []
        for c in ctx.types.get(f.type, ()):
            # atoms produced by quantifier expansion are always checked
            g = _ground(f.body, {**env, f.var: c}, ctx, where, strict_atoms=True)
            parts.append(g)
        return pl.conj(*parts) if isinstance(f, sx.Forall) else pl.disj(*parts)
    kids = [f.arg] if isinstance(f, sx.Not) else \
        list(f.args) if isinstance(f, (sx.And, sx.Or)) else [f.left, f.right]
    parts = []
    for k in kids:
        g = _ground(k, env, ctx, where, strict_atoms)
        if g is None:
            return None
        parts.append(g)
    if isinstance(f, sx.Not):
        return pl.neg(parts[0])
    if isinstance(f, sx.And):
        return pl.conj(*parts)
    if isinstance(f, sx.Or):
        return pl.disj(*parts)
    if isinstance(f, sx.Implies):
        return pl.implies(*parts)
    return pl.iff(*parts)


# ── Statement grounding ─────────────────────────────────────────────────────

def _variable_domains(ctx: _Context, names: Iterable[str], *formulas_and_atoms
                      ) -> dict[str, list[str]]:
    """Domain for each free variable, inferred from the typed argument
    positions it occupies; untyped variables range over all objects."""
    seen: dict[str, list[str]] = {n: [] for n in names}
    for item in formulas_and_atoms:
        atoms = [item] if isinstance(item, sx.Atom) else sx.atoms_of(item)
        for a in atoms:
            if a.predicate in ctx.types and a.predicate not in ctx.predicates:
                types = [a.predicate]
            else:
                types = ctx.positions.get(a.predicate, [])
            for t, ty in zip(a.args, types):
                if isinstance(t, sx.Variable) and t.name in seen and ty:
                    seen[t.name].append(ty)
    out = {}
    for n, tys in seen.items():
        if not tys:
            out[n] = list(ctx.objects)
            continue
        dom = list(ctx.types.get(tys[0], ()))
        for ty in tys[1:]:
            allowed = set(ctx.types.get(ty, ()))
            dom = [c for c in dom if c in allowed]
        out[n] = dom
    return out


def _substitutions(names: list[str], domains: dict[str, list[str]]) -> Iterator[dict[str, str]]:
    for combo in itertools.product(*(domains[n] for n in names)):
        yield dict(zip(names, combo))


def _rule_instances(ctx: _Context, stmt, base_env: dict[str, str], bound: set[str]
                    ) -> Iterator[tuple[pl.Formula, GroundAtom, bool]]:
    head = stmt.head
    free = sorted((sx.free_variables(stmt.condition) | {t.name for t in head.atom.args
                                                        if isinstance(t, sx.Variable)}) - bound)
    doms = _variable_domains(ctx, free, stmt.condition, head.atom)
    where = sx.render_statement(stmt)
    for extra in _substitutions(free, doms):
        env = {**base_env, **extra}
        atom, _ = ctx.atom(head.atom, env)
        if atom is None or atom.kind != "fluent":
            continue
        cond = _ground(stmt.condition, env, ctx, where, strict_atoms=False)
        if cond is None or cond == pl.FALSE:
            continue
        yield cond, atom, head.positive


def ground_statements(desc: sx.SourceDescription, strict: bool = True) -> GroundTheory:
    """Ground every statement of a (validated) description.

    With strict=True an incoherent description raises CoherenceError listing
    each offending atom; with strict=False the atoms are kept (kind
    "illegal") and reported by check_coherence.
    """
    ctx = _Context(desc)
    actions = enumerate_action_instances(desc)
    action_defs = {s.schema.predicate: s for s in desc.of_kind(sx.ActionDef)}
    precond_defs = {s.schema.predicate: s for s in desc.of_kind(sx.PrecondDef)}

    preconds: dict[ActionInstance, pl.Formula] = {}
    missing = []
    for a in actions:
        p = precond_defs.get(a.action)
        if p is None:
            missing.append(sx.Diagnostic(f"no precondition for action instance {a}"))
            continue
        env = {v.name: c for v, c in zip(p.schema.args, a.args)}
        preconds[a] = _ground(p.body, env, ctx, sx.render_statement(p), True)
    if missing:
        raise sx.DescriptionError(missing)

    effects: dict[ActionInstance, list[GroundEffect]] = {a: [] for a in actions}
    for s in desc.of_kind(sx.EffectStmt):
        adef = action_defs.get(s.action.predicate)
        if adef is None:
            continue
        for a in actions:
            if a.action != s.action.predicate:
                continue
            env: dict[str, str] = {}
            ok = True
            for t, c in zip(s.action.args, a.args):
                if isinstance(t, sx.Constant):
                    ok = ok and t.name == c
                elif env.setdefault(t.name, c) != c:
                    ok = False
            if not ok:
                continue
            for cond, atom, positive in _rule_instances(ctx, s, env, set(env)):
                effects[a].append(GroundEffect(a, cond, atom, positive))

    causes = []
    for s in desc.of_kind(sx.CausesStmt):
        for cond, atom, positive in _rule_instances(ctx, s, {}, set()):
            causes.append(GroundRule(cond, atom, positive))

    defined: dict[GroundAtom, pl.Formula] = {}
    def_stmts = {s.schema.predicate: s for s in desc.of_kind(sx.DefinedDef)}
    for a in ctx.fluents:
        if a.kind != "complex":
            continue
        d = def_stmts[a.predicate]
        env = {v.name: c for v, c in zip(d.schema.args, a.args)}
        defined[a] = _ground(d.body, env, ctx, sx.render_statement(d), True)

    axioms = []
    for s in desc.of_kind(sx.AxiomStmt):
        free = sorted(sx.free_variables(s.formula))
        doms = _variable_domains(ctx, free, s.formula)
        for env in _substitutions(free, doms):
            g = _ground(s.formula, env, ctx, sx.render_statement(s), True)
            if g != pl.TRUE:
                axioms.append(g)

    illegal = sorted(ctx.illegal.items(), key=lambda kv: (kv[0].predicate, kv[0].args))
    if strict and illegal:
        raise CoherenceError([
            sx.Diagnostic(f"incoherent description: {atom} is not a legal atom (in {where})")
            for atom, where in illegal])
    return GroundTheory(
        fluent_atoms=ctx.fluents, static_atoms=ctx.statics, actions=actions,
        effects=effects, causes=causes, defined=defined, preconds=preconds,
        axioms=axioms, types=dict(ctx.types), illegal=illegal)


def check_coherence(gt: GroundTheory) -> list[sx.Diagnostic]:
    """One diagnostic per atom that is neither a legal fluent nor static atom."""
    legal = set(gt.fluent_atoms) | set(gt.static_atoms)
    formulas = list(gt.axioms) + list(gt.preconds.values()) + list(gt.defined.values())
    formulas += [r.condition for r in gt.causes]
    formulas += [e.condition for es in gt.effects.values() for e in es]
    bad = set()
    for f in formulas:
        bad |= {a for a in f.atoms() if a not in legal}
    bad |= {a for a, _ in gt.illegal}
    return [sx.Diagnostic(f"incoherent description: {a} is not a legal atom")
            for a in sorted(bad, key=lambda a: (a.predicate, a.args))]


def ground(text_or_desc, strict: bool = True) -> GroundTheory:
    """Parse (if needed), validate and ground."""
    desc = text_or_desc if isinstance(text_or_desc, sx.SourceDescription) \
        else sx.parse_description(text_or_desc)
    errors = sx.errors_only(sx.validate_description(desc))
    if errors:
        raise sx.DescriptionError(errors)
    return ground_statements(desc, strict=strict)
