"""
lifting.py - Syntactic classes of descriptions whose compiled results carry
over to larger type domains, and an empirical check of that carry-over.

A description is *simple-I* when preconditions are universally quantified
quantifier-free formulas, effect conditions are quantifier-free and only
use the action's variables, and rule conditions are quantifier-free and
only use the head's variables.  It is *simple-II* when the precondition and
effect conditions are as above, there are no positive rules, and every
negative rule condition is a fluent-free part conjoined with one fluent
atom.  For such descriptions, anything Init + Succ entails for an action
also holds for the renamed action after an injective, type-respecting
renaming of objects (an embedding) into bigger domains.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from . import proplogic as pl
from . import syntax as sx
from .compiler import (ActionTheory, CompiledAction, Indeterminate, build_action_theory,
                       compile_action, ssa_of)
from .grounder import ActionInstance, GroundAtom, GroundTheory, ground
from .proplogic import PropAtom


# ── Inlining complex fluents ────────────────────────────────────────────────

def _fresh(base: str, used: set[str]) -> str:
    n = 1
    while f"{base}{n}" in used:
        n += 1
    name = f"{base}{n}"
    used.add(name)
    return name


def _rename_bound(f: sx.Formula, used: set[str], env: Optional[dict] = None) -> sx.Formula:
    """Rename quantified variables apart from `used` (and from each other);
    a name is kept when it is still free to use."""
    env = env or {}
    if isinstance(f, (sx.Forall, sx.Exists)):
        if f.var in used:
            new = _fresh(f.var.rstrip("0123456789") or "V", used)
        else:
            new = f.var
            used.add(new)
        body = _rename_bound(f.body, used, {**env, f.var: sx.Variable(new)})
        return type(f)(new, f.type, body)
    if isinstance(f, (sx.Atom, sx.Eq, sx.Neq)):
        return sx.substitute_terms(f, env)
    if isinstance(f, sx.Not):
        return sx.Not(_rename_bound(f.arg, used, env))
    if isinstance(f, (sx.And, sx.Or)):
        return type(f)(tuple(_rename_bound(a, used, env) for a in f.args))
    if isinstance(f, (sx.Implies, sx.Iff)):
        return type(f)(_rename_bound(f.left, used, env), _rename_bound(f.right, used, env))
    return f


def _inline(f: sx.Formula, defs: dict[str, sx.DefinedDef], used: set[str]) -> sx.Formula:
    if isinstance(f, sx.Atom) and f.predicate in defs:
        d = defs[f.predicate]
        if len(d.schema.args) != len(f.args):
            raise sx.DescriptionError([sx.Diagnostic(
                f"complex fluent {f.predicate!r} used with arity {len(f.args)}")])
        body = _rename_bound(d.body, used)
        subst = {v.name: t for v, t in zip(d.schema.args, f.args)}
        return sx.substitute_terms(body, subst)
    if isinstance(f, sx.Not):
        return sx.Not(_inline(f.arg, defs, used))
    if isinstance(f, (sx.And, sx.Or)):
        return type(f)(tuple(_inline(a, defs, used) for a in f.args))
    if isinstance(f, (sx.Implies, sx.Iff)):
        return type(f)(_inline(f.left, defs, used), _inline(f.right, defs, used))
    if isinstance(f, (sx.Forall, sx.Exists)):
        return type(f)(f.var, f.type, _inline(f.body, defs, used))
    return f


def _statement_vars(s) -> set[str]:
    out = set()
    for name in ("schema", "action"):
        a = getattr(s, name, None)
        if a is not None:
            out |= {t.name for t in a.args if isinstance(t, sx.Variable)}
    for name in ("body", "condition", "formula"):
        f = getattr(s, name, None)
        if f is not None:
            out |= sx.all_variables(f)
    head = getattr(s, "head", None)
    if head is not None:
        out |= {t.name for t in head.atom.args if isinstance(t, sx.Variable)}
    return out


def inline_complex(desc: sx.SourceDescription) -> sx.SourceDescription:
    """Replace complex fluent atoms outside their definitions by the defining
    formulas; quantified variables of the definitions are renamed apart."""
    defs = {s.schema.predicate: s for s in desc.of_kind(sx.DefinedDef)}
    if not defs:
        return desc
    out = []
    for s in desc.statements:
        used = _statement_vars(s)
        if isinstance(s, sx.PrecondDef):
            s = sx.PrecondDef(s.schema, _inline(s.body, defs, used), s.pos)
        elif isinstance(s, sx.EffectStmt):
            s = sx.EffectStmt(s.action, _inline(s.condition, defs, used), s.head, s.pos)
        elif isinstance(s, sx.CausesStmt):
            s = sx.CausesStmt(_inline(s.condition, defs, used), s.head, s.pos)
        elif isinstance(s, sx.AxiomStmt):
            s = sx.AxiomStmt(_inline(s.formula, defs, used), s.pos)
        out.append(s)
    return sx.SourceDescription(tuple(out))


# ── Normal forms over the source syntax ─────────────────────────────────────

def nnf(f: sx.Formula, positive: bool = True) -> sx.Formula:
    if isinstance(f, sx.Not):
        return nnf(f.arg, not positive)
    if isinstance(f, (sx.And, sx.Or)):
        parts = tuple(nnf(a, positive) for a in f.args)
        keep = isinstance(f, sx.And) == positive
        return sx.And(parts) if keep else sx.Or(parts)
    if isinstance(f, sx.Implies):
        return nnf(sx.Or((sx.Not(f.left), f.right)), positive)
    if isinstance(f, sx.Iff):
        both = sx.And((sx.Or((sx.Not(f.left), f.right)), sx.Or((f.left, sx.Not(f.right)))))
        return nnf(both, positive)
    if isinstance(f, (sx.Forall, sx.Exists)):
        keep = isinstance(f, sx.Forall) == positive
        body = nnf(f.body, positive)
        return sx.Forall(f.var, f.type, body) if keep else sx.Exists(f.var, f.type, body)
    if positive:
        return f
    if isinstance(f, sx.Top):
        return sx.FALSE
    if isinstance(f, sx.Bottom):
        return sx.TRUE
    if isinstance(f, sx.Eq):
        return sx.Neq(f.left, f.right)
    if isinstance(f, sx.Neq):
        return sx.Eq(f.left, f.right)
    return sx.Not(f)


def prenex(f: sx.Formula) -> tuple[list[tuple[str, str, str]], sx.Formula]:
    """Prefix [(quantifier, var, type)] and quantifier-free matrix of the
    negation normal form of f.  Quantifiers are pulled out of conjunctions
    and disjunctions left to right; bound variables are renamed apart."""
    g = _rename_bound(nnf(f), set(sx.free_variables(f)))

    def pull(h: sx.Formula):
        if isinstance(h, (sx.Forall, sx.Exists)):
            prefix, m = pull(h.body)
            q = "forall" if isinstance(h, sx.Forall) else "exists"
            return [(q, h.var, h.type)] + prefix, m
        if isinstance(h, (sx.And, sx.Or)):
            prefix, parts = [], []
            for a in h.args:
                p, m = pull(a)
                prefix += p
                parts.append(m)
            return prefix, type(h)(tuple(parts))
        return [], h

    return pull(g)


def render_prenex(prefix, matrix: sx.Formula) -> str:
    out = sx.render_formula(matrix)
    for q, v, t in reversed(prefix):
        out = f"{q}({v}, {t}, {out})"
    return out


# ── Classification ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Violation:
    condition: str          # e.g. "I.2", "II.4", "complex"
    statement: str
    reason: str

    def __str__(self) -> str:
        return f"[{self.condition}] {self.statement}: {self.reason}"


@dataclass
class ClassReport:
    simple_I: bool
    simple_II: bool
    violations: list[Violation] = field(default_factory=list)


def _vars(f: sx.Formula) -> set[str]:
    return sx.free_variables(f)


def _atom_vars(a: sx.Atom) -> set[str]:
    return {t.name for t in a.args if isinstance(t, sx.Variable)}


def _mentions(f: sx.Formula, preds: set[str]) -> list[str]:
    return sorted({a.predicate for a in sx.atoms_of(f) if a.predicate in preds})


def classify(desc: sx.SourceDescription) -> ClassReport:
    """Decide simple-I and simple-II membership.

    Run this on an inlined description (``inline_complex``); complex fluents
    mentioned outside their definitions are reported as violations of both
    classes.
    """
    fluents = {s.schema.predicate for s in desc.of_kind(sx.FluentDef)}
    complexes = {s.schema.predicate for s in desc.of_kind(sx.ComplexDef)}
    one: list[Violation] = []       # conditions shared by both classes
    only_I: list[Violation] = []
    only_II: list[Violation] = []

    for s in desc.statements:
        text = sx.render_statement(s).rstrip(".")
        formula = getattr(s, "body", None) if isinstance(s, sx.PrecondDef) else \
            getattr(s, "condition", None) or getattr(s, "formula", None)
        if formula is not None and not isinstance(s, sx.DefinedDef):
            for p in _mentions(formula, complexes):
                one.append(Violation("complex", text, f"mentions complex fluent {p!r}"))

        if isinstance(s, sx.PrecondDef):
            prefix, _ = prenex(s.body)
            if any(q == "exists" for q, _, _ in prefix):
                one.append(Violation("1", text, "precondition is not universally quantified "
                                                "over a quantifier-free formula"))
        elif isinstance(s, sx.EffectStmt):
            if sx.has_quantifier(s.condition):
                one.append(Violation("2", text, "effect condition has quantifiers"))
            extra = (_vars(s.condition) | _atom_vars(s.head.atom)) - _atom_vars(s.action)
            if extra:
                one.append(Violation("2", text, f"variables {sorted(extra)} are not "
                                                "action arguments"))
        elif isinstance(s, sx.CausesStmt):
            if sx.has_quantifier(s.condition):
                only_I.append(Violation("I.3", text, "rule condition has quantifiers"))
            extra = _vars(s.condition) - _atom_vars(s.head.atom)
            if extra:
                only_I.append(Violation("I.3", text, f"condition variables {sorted(extra)} "
                                                     "are not in the head"))
            if s.head.positive:
                only_II.append(Violation("II.3", text, "positive domain rule"))
            else:
                reason = _binary_rule_problem(s.condition, fluents | complexes)
                if reason:
                    only_II.append(Violation("II.4", text, reason))

    violations = one + only_I + only_II
    return ClassReport(simple_I=not (one or only_I), simple_II=not (one or only_II),
                       violations=violations)


def _binary_rule_problem(cond: sx.Formula, fluents: set[str]) -> Optional[str]:
    parts = list(cond.args) if isinstance(cond, sx.And) else [cond]
    with_fluents = [p for p in parts if _mentions(p, fluents)]
    if len(with_fluents) != 1:
        return f"condition mentions fluents in {len(with_fluents)} conjuncts, expected 1"
    if not isinstance(with_fluents[0], sx.Atom):
        return "the fluent part of the condition is not a single fluent atom"
    return None


# ── Embeddings ──────────────────────────────────────────────────────────────

class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class Embedding:
    """Injective, type-respecting map from the objects of one set of type
    domains into those of another."""
    mapping: tuple[tuple[str, str], ...]
    source: tuple[tuple[str, tuple[str, ...]], ...]
    target: tuple[tuple[str, tuple[str, ...]], ...]

    @classmethod
    def make(cls, mapping: dict, source: dict, target: dict) -> "Embedding":
        tau = cls(tuple(sorted((str(k), str(v)) for k, v in mapping.items())),
                  tuple(sorted((t, tuple(map(str, cs))) for t, cs in source.items())),
                  tuple(sorted((t, tuple(map(str, cs))) for t, cs in target.items())))
        tau.validate()
        return tau

    @property
    def table(self) -> dict[str, str]:
        return dict(self.mapping)

    def validate(self) -> None:
        m = self.table
        src, tgt = dict(self.source), dict(self.target)
        if set(src) != set(tgt):
            raise EmbeddingError("source and target declare different types")
        values = list(m.values())
        if len(set(values)) != len(values):
            raise EmbeddingError("mapping is not one-to-one")
        for ty, consts in src.items():
            for c in consts:
                if c not in m:
                    raise EmbeddingError(f"object {c} of type {ty} is not mapped")
                if m[c] not in tgt[ty]:
                    raise EmbeddingError(f"{c} -> {m[c]} leaves type {ty}")
        objects = {c for cs in src.values() for c in cs}
        stray = sorted(set(m) - objects)
        if stray:
            raise EmbeddingError(f"mapping covers non-objects {stray}")

    def __call__(self, expr):
        return apply_embedding(expr, self)


def apply_embedding(expr: Any, tau: Embedding) -> Any:
    """Rename objects inside an action instance, ground atom, timed atom or
    formula.  Constants that are not objects of the source types are kept."""
    m = tau.table
    objects = {c for _, cs in tau.source for c in cs}

    def const(c: str) -> str:
        if c in objects:
            return m[c]
        return c

    def go(x):
        if isinstance(x, ActionInstance):
            return ActionInstance(x.action, tuple(const(c) for c in x.args))
        if isinstance(x, GroundAtom):
            return GroundAtom(x.predicate, tuple(const(c) for c in x.args), x.kind)
        if isinstance(x, PropAtom):
            return PropAtom(x.time, go(x.atom))
        if isinstance(x, pl.Formula):
            return pl.rename(x, go)
        if isinstance(x, str):
            return const(x)
        raise TypeError(f"cannot embed {type(x).__name__}")

    return go(expr)


def _same_but_types(d: sx.SourceDescription, dp: sx.SourceDescription) -> bool:
    rest = [s for s in d.statements if not isinstance(s, sx.TypeDef)]
    rest_p = [s for s in dp.statements if not isinstance(s, sx.TypeDef)]
    return rest == rest_p and set(d.types()) == set(dp.types())


# ── Transport check ─────────────────────────────────────────────────────────

@dataclass
class TransportReport:
    checked: int = 0
    entailed: int = 0
    counterexamples: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def _theory(at: ActionTheory) -> pl.Theory:
    return pl.Theory(at.full_theory())


def check_transport(desc: sx.SourceDescription, desc_p: sx.SourceDescription,
                    tau: Embedding, action: ActionInstance | str,
                    psis: Iterable[pl.Formula],
                    grounded: Optional[tuple[GroundTheory, GroundTheory]] = None
                    ) -> TransportReport:
    """For every psi entailed by Init + Succ (+ definitions) for `action` in
    desc, check that tau(psi) is entailed for tau(action) in desc_p."""
    if not _same_but_types(desc, desc_p):
        raise EmbeddingError("descriptions differ in more than their type definitions")
    if dict(tau.source) != {k: tuple(v) for k, v in desc.types().items()} or \
            dict(tau.target) != {k: tuple(v) for k, v in desc_p.types().items()}:
        raise EmbeddingError("embedding does not match the descriptions' types")
    gt, gt_p = grounded or (ground(desc), ground(desc_p))
    a = gt.action(action) if isinstance(action, str) else action
    a_p = apply_embedding(a, tau)
    if a_p not in gt_p.actions:
        raise EmbeddingError(f"{a_p} is not an action instance of the target description")
    th = _theory(build_action_theory(gt, a))
    th_p = _theory(build_action_theory(gt_p, next(x for x in gt_p.actions if x == a_p)))
    report = TransportReport()
    for psi in psis:
        report.checked += 1
        if not th.entails(psi):
            continue
        report.entailed += 1
        image = apply_embedding(psi, tau)
        if not th_p.entails(image):
            report.counterexamples.append((pl.to_text(psi), pl.to_text(image)))
    return report


def sample_entailed(ca: CompiledAction, n: int, seed: int = 0) -> list[pl.Formula]:
    """Formulas entailed by the compiled action: its successor state axioms
    over primitive fluents and random Boolean combinations of them."""
    rng = random.Random(seed)
    base: list[pl.Formula] = []
    for f, r in ca.fluents.items():
        if f.kind != "fluent":
            continue
        if isinstance(r, Indeterminate):
            base.append(pl.implies(r.suf, pl.Var(pl.succ_atom(f))))
            base.append(pl.implies(pl.Var(pl.succ_atom(f)), r.nec))
            continue
        rhs = ssa_of(f, r)
        base.append(pl.iff(pl.Var(pl.succ_atom(f)), rhs))
        if rhs in (pl.TRUE, pl.FALSE):
            base.append(pl.Var(pl.succ_atom(f)) if rhs == pl.TRUE
                        else pl.neg(pl.Var(pl.succ_atom(f))))
    if not base:
        return []
    atoms = sorted({a for f in ca.fluents if f.kind == "fluent"
                    for a in (pl.init_atom(f), pl.succ_atom(f))}, key=pl.atom_key)
    out = []
    while len(out) < n:
        kind = rng.randrange(4)
        x = rng.choice(base)
        if kind == 0:
            out.append(x)
        elif kind == 1:
            out.append(pl.conj(x, rng.choice(base)))
        elif kind == 2:
            other = pl.Var(rng.choice(atoms))
            out.append(pl.disj(x, other if rng.random() < 0.5 else pl.neg(other)))
        else:
            other = pl.Var(rng.choice(atoms))
            out.append(pl.implies(other if rng.random() < 0.5 else pl.neg(other), x))
    return out


def transport_suite(desc: sx.SourceDescription, desc_p: sx.SourceDescription,
                    tau: Embedding, n: int = 100, seed: int = 0) -> TransportReport:
    """Sample n entailed formulas spread over all actions of desc and check
    each transports along tau."""
    gt, gt_p = ground(desc), ground(desc_p)
    total = TransportReport()
    per_action = max(1, -(-n // max(1, len(gt.actions))))
    for k, a in enumerate(gt.actions):
        if total.checked >= n:
            break
        ca = compile_action(gt, a)
        if not ca.ok:
            continue
        psis = sample_entailed(ca, min(per_action, n - total.checked), seed + k)
        r = check_transport(desc, desc_p, tau, a, psis, (gt, gt_p))
        total.checked += r.checked
        total.entailed += r.entailed
        total.counterexamples += r.counterexamples
    return total
