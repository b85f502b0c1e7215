"""
test_grounder.py - Atom and instance enumeration, formula grounding, coherence.
"""

from __future__ import annotations

import itertools

import pytest

from ccp import BUNDLED, bundled_domain
from ccp import proplogic as pl
from ccp import syntax as sx
from ccp.grounder import (CoherenceError, GroundAtom, check_coherence, enumerate_action_instances,
                          enumerate_fluent_atoms, ground, ground_formula)

from conftest import grounded

INCOHERENT = """
domain(block, [1,2,3]).
fluent(on(X,Y), [block(X), block(Y), neq(X,Y)]).
complex(clear(X), [block(X)]).
defined(clear(X), not(exists(Y, block, on(Y,X)))).
"""


def on(a, b):
    return GroundAtom("on", (str(a), str(b)))


# ── Enumeration ─────────────────────────────────────────────────────────────

def test_guarded_fluent_atoms():
    desc = sx.parse_description("domain(block, [1,2,3]). "
                                "fluent(on(X,Y), [block(X), block(Y), neq(X,Y)]).")
    atoms = enumerate_fluent_atoms(desc)
    assert [str(a) for a in atoms] == ["on(1,2)", "on(1,3)", "on(2,1)", "on(2,3)",
                                       "on(3,1)", "on(3,2)"]


def test_example_world_counts(blocks3):
    assert len(blocks3.fluent_atoms) == 15
    by_pred = {p: sum(1 for a in blocks3.fluent_atoms if a.predicate == p)
               for p in ("on", "clear", "ontable")}
    assert by_pred == {"on": 9, "clear": 3, "ontable": 3}
    assert len(blocks3.actions) == 18
    assert sorted({a.action for a in blocks3.actions}) == ["move", "stack", "unstack"]
    assert all(sum(1 for a in blocks3.actions if a.action == n) == 6
               for n in ("move", "stack", "unstack"))


def test_empty_domain_gives_no_atoms():
    desc = sx.parse_description("domain(block, []). fluent(on(X,Y), [block(X), block(Y)]).")
    assert enumerate_fluent_atoms(desc) == []


def test_zero_arity_action_has_one_instance():
    desc = sx.parse_description("action(wait). precond(wait, true).")
    assert [str(a) for a in enumerate_action_instances(desc)] == ["wait"]


def test_monkey_counts():
    gt = grounded("monkey")
    assert len(gt.actions) == 27
    assert len(gt.fluent_atoms) == 26


def test_four_action_world_counts():
    gt = grounded("blocks4ops")
    assert len(gt.fluent_atoms) == 19
    assert len(gt.actions) == 18


def test_canonical_order_follows_declared_constants():
    gt = ground("domain(t, [zz, aa]). fluent(p(X), [t(X)]).")
    assert [str(a) for a in gt.fluent_atoms] == ["p(zz)", "p(aa)"]


@pytest.mark.parametrize("name", BUNDLED)
def test_atom_counts_match_guard_products(name):
    desc = sx.parse_description(bundled_domain(name))
    types = {s.type: [c.name for c in s.constants] for s in desc.statements
             if isinstance(s, sx.TypeDef)}
    expect = 0
    for s in desc.statements:
        if not isinstance(s, (sx.FluentDef, sx.ComplexDef)):
            continue
        vars_ = [v.name for v in s.schema.args]
        doms = {}
        for g in s.guard:
            if isinstance(g, sx.TypeGuard):
                doms[g.var.name] = types[g.type]
        neqs = [g for g in s.guard if isinstance(g, sx.Neq)]
        for combo in itertools.product(*(doms[v] for v in vars_)):
            env = dict(zip(vars_, combo))
            val = lambda t: env.get(t.name, t.name)
            if all(val(n.left) != val(n.right) for n in neqs):
                expect += 1
    assert len(grounded(name).fluent_atoms) == expect


@pytest.mark.parametrize("name", BUNDLED)
def test_enumeration_is_deterministic(name):
    a, b = ground(bundled_domain(name)), ground(bundled_domain(name))
    assert [str(x) for x in a.fluent_atoms] == [str(x) for x in b.fluent_atoms]
    assert [str(x) for x in a.actions] == [str(x) for x in b.actions]
    keys = [x.sort_key for x in a.fluent_atoms if x.kind == "fluent"]
    assert keys == sorted(keys)


# ── Formula grounding ───────────────────────────────────────────────────────

def test_quantifier_expansion(blocks3):
    desc = sx.parse_description(bundled_domain("blocks3"))
    body = sx.parse_formula("not(exists(Y, block, on(Y,X)))")
    got = ground_formula(body, {"X": "1"}, desc)
    assert got == pl.Not(pl.Or(pl.Var(on(1, 1)), pl.Var(on(2, 1)), pl.Var(on(3, 1))))


def test_quantifier_over_empty_domain():
    desc = sx.parse_description("domain(t, []). fluent(p(X), [t(X)]).")
    assert ground_formula(sx.parse_formula("forall(X, t, p(X))"), {}, desc) == pl.TRUE
    assert ground_formula(sx.parse_formula("exists(X, t, p(X))"), {}, desc) == pl.FALSE


def test_ground_equality_folds():
    desc = sx.parse_description("domain(t, [a, b]).")
    assert ground_formula(sx.parse_formula("neq(X, Y)"), {"X": "a", "Y": "b"}, desc) == pl.TRUE
    assert ground_formula(sx.parse_formula("eq(X, Y)"), {"X": "a", "Y": "b"}, desc) == pl.FALSE
    assert ground_formula(sx.parse_formula("and(eq(X,X), false)"), {"X": "a"}, desc) == pl.FALSE


# ── Statement grounding ─────────────────────────────────────────────────────

def test_rules_about_on_1_2(blocks3):
    conds = sorted(pl.to_text(r.condition) for r in blocks3.causes
                   if r.atom == on(1, 2) and not r.positive)
    assert conds == ["on(1,1)", "on(1,3)", "on(2,2)", "on(3,2)", "ontable(1)"]


def test_one_positive_effect_per_stack(blocks3):
    for a in blocks3.actions:
        if a.action != "stack":
            continue
        effs = blocks3.effects[a]
        pos = [e for e in effs if e.positive and e.atom == on(*a.args)]
        assert len(pos) == 1 and pos[0].condition == pl.TRUE


@pytest.mark.parametrize("name", BUNDLED)
def test_ground_instances_respect_guards(name):
    gt = grounded(name)
    legal = set(gt.fluent_atoms) | set(gt.static_atoms)
    for r in gt.causes:
        assert r.atom in legal and r.condition.atoms() <= legal
    for effs in gt.effects.values():
        for e in effs:
            assert e.atom in legal and e.condition.atoms() <= legal
            assert e.condition != pl.FALSE
    for f in list(gt.preconds.values()) + list(gt.defined.values()) + gt.axioms:
        assert f.atoms() <= legal
    assert set(gt.preconds) == set(gt.actions)


@pytest.mark.parametrize("name", BUNDLED)
def test_definitions_mention_no_complex_fluents(name):
    gt = grounded(name)
    for body in gt.defined.values():
        assert all(a.kind != "complex" for a in body.atoms())


def test_incoherent_definition_is_an_error():
    with pytest.raises(CoherenceError) as e:
        ground(INCOHERENT)
    assert "on(1,1)" in str(e.value)


def test_check_coherence_names_each_illegal_atom():
    gt = ground(INCOHERENT, strict=False)
    msgs = [d.message for d in check_coherence(gt)]
    assert len(msgs) == 3
    for k in (1, 2, 3):
        assert any(f"on({k},{k})" in m for m in msgs)


def test_coherent_theories_have_no_diagnostics(blocks3):
    assert check_coherence(blocks3) == []
    assert check_coherence(ground("")) == []


def test_missing_precondition_is_an_error():
    with pytest.raises(sx.DescriptionError):
        ground("fluent(p). action(a).")


def test_ground_json_is_plain_data(blocks3):
    data = blocks3.to_json()
    assert len(data["fluent_atoms"]) == 15
    assert data["actions"] == [str(a) for a in blocks3.actions]
    assert "stack(1,2)" in data["preconditions"]
