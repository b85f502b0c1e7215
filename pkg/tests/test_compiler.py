"""
test_compiler.py - Action theories, consistency checks, solving and STRIPS extraction.
"""

from __future__ import annotations

import pytest

from ccp import BUNDLED
from ccp import proplogic as pl
from ccp.compiler import (CapExceeded, CompileOptions, ConstantFalse, ConstantTrue, Determinate,
                          Frame, Indeterminate, bounds, build_action_theory,
                          check_action_consistency, check_init_extendability, compile_action,
                          compile_domain, lift)
from ccp.grounder import ground
from ccp.oracle import legal_init_states
from ccp.proplogic import init_atom, succ_atom

from conftest import compiled, compiled_action, grounded
from reference import PICKUP_1_MODIFIED_STRIPS, STACK_1_2_SSA, formula

CYCLIC = "fluent(p). causes(p, p). action(a). precond(a, true)."
PERSISTENT_BLOCKER = """
fluent(p). fluent(q).
causes(q, not(p)).
action(a). precond(a, true). effect(a, true, p).
"""


def atom(gt, text):
    return gt.atom_table()[text]


def stack12():
    gt = grounded("blocks3")
    return gt, build_action_theory(gt, gt.action("stack(1,2)"))


# ── Action theories ─────────────────────────────────────────────────────────

def test_pseudo_axiom_for_stacked_block():
    gt, at = stack12()
    p = at.succ[atom(gt, "on(1,2)")]
    assert p.pos_init == [pl.TRUE]
    assert p.neg_init == [] and p.pos_succ == []
    assert sorted(pl.to_text(c) for c in p.neg_succ) == \
        ["on(1,1)", "on(1,3)", "on(2,2)", "on(3,2)", "ontable(1)"]


def test_pseudo_axiom_for_table():
    gt, at = stack12()
    p = at.succ[atom(gt, "ontable(1)")]
    assert p.pos_init == [] and p.neg_init == [] and p.pos_succ == []
    assert sorted(pl.to_text(c) for c in p.neg_succ) == ["on(1,1)", "on(1,2)", "on(1,3)"]


def test_no_effects_no_rules_gives_frame_shape():
    gt = ground("fluent(p). fluent(q). action(a). precond(a, true).")
    at = build_action_theory(gt, gt.action("a"))
    for f, p in at.succ.items():
        assert p.rhs() == pl.Var(init_atom(f))


def test_init_theory_is_init_only():
    _, at = stack12()
    for f in at.init_axioms:
        assert all(a.time != "succ" for a in f.atoms())
    for g, eq in at.succ1.items():
        assert isinstance(eq, pl.Iff) and eq.left == pl.Var(succ_atom(g))
        assert succ_atom(g) not in eq.right.atoms()


def test_unit_closure_of_init_is_sound():
    gt, at = stack12()
    units = pl.unit_closure(pl.clausify(at.init_axioms))
    expect = {pl.Lit(init_atom(atom(gt, t)), v) for t, v in
              [("ontable(1)", True), ("clear(1)", True), ("clear(2)", True), ("on(1,2)", False)]}
    assert expect <= units
    states = legal_init_states(at)
    assert states
    for lit in units:
        if isinstance(lit.atom, pl.Aux):
            continue
        for m in states:
            v = _init_value(gt, m, lit.atom.atom)
            assert v == lit.positive, lit


def _init_value(gt, m, a):
    """Value of a (possibly complex) atom in an oracle init state."""
    if a.kind == "complex":
        return pl.evaluate(gt.defined[a], m)
    return m[a]


def test_stacked_block_is_entailed():
    gt, at = stack12()
    th = pl.Theory(at.full_theory())
    assert th.entails(pl.iff(pl.Var(succ_atom(atom(gt, "on(1,2)"))), pl.TRUE))


# ── Consistency conditions ──────────────────────────────────────────────────

@pytest.mark.parametrize("text", [
    "fluent(f). action(a). precond(a, true). effect(a, true, f). effect(a, true, not(f)).",
    "fluent(f). causes(true, f). action(a). precond(a, true). effect(a, true, not(f)).",
])
def test_contradictions_are_inconsistent(text):
    gt = ground(text)
    assert not check_action_consistency(build_action_theory(gt, gt.action("a")))


def test_example_world_is_consistent(blocks3):
    for a in blocks3.actions:
        assert check_action_consistency(build_action_theory(blocks3, a))


def test_persistent_blocker_is_not_extendable():
    gt = ground(PERSISTENT_BLOCKER)
    at = build_action_theory(gt, gt.action("a"))
    assert check_action_consistency(at)
    assert not check_init_extendability(at)


def test_example_world_is_extendable(blocks3):
    for a in blocks3.actions:
        assert check_init_extendability(build_action_theory(blocks3, a))


def test_no_rules_is_extendable():
    gt = ground("fluent(p). fluent(q). action(a). precond(a, true). "
                "effect(a, q, p). effect(a, p, not(q)).")
    assert check_init_extendability(build_action_theory(gt, gt.action("a")))


def test_extendability_refuses_above_cap(blocks3):
    at = build_action_theory(blocks3, blocks3.actions[0])
    with pytest.raises(CapExceeded):
        check_init_extendability(at, cap=3)


def test_extendability_diagnostic_in_compile():
    gt = ground(PERSISTENT_BLOCKER)
    ca = compile_action(gt, gt.action("a"), CompileOptions(check_init=True))
    assert not ca.ok and "no successor" in ca.diagnostics[0]
    assert compile_action(gt, gt.action("a")).ok


def test_contradictory_action_is_isolated():
    gt = ground("fluent(f). fluent(g). "
                "action(a). precond(a, true). effect(a, true, f). effect(a, true, not(f)). "
                "action(b). precond(b, true). effect(b, true, g).")
    out = compile_domain(gt)
    assert [c.ok for c in out] == [False, True]
    assert "inconsistent" in out[0].diagnostics[0]
    assert [str(x) for x in out[1].strips.add] == ["g"]


# ── Solving ─────────────────────────────────────────────────────────────────

def test_stack_table():
    gt, _, ca = compiled_action("blocks3", "stack(1,2)")
    assert len(ca.fluents) == 15
    for f, r in ca.fluents.items():
        got = bounds(f, r)
        assert got[0] == got[1]
        assert pl.equivalent(got[0], formula(STACK_1_2_SSA[str(f)], gt)), f


def test_stack_result_kinds():
    gt, _, ca = compiled_action("blocks3", "stack(1,2)")
    kinds = {str(f): type(r) for f, r in ca.fluents.items()}
    assert kinds["on(1,2)"] is ConstantTrue
    assert kinds["clear(2)"] is ConstantFalse
    assert kinds["on(2,3)"] is Frame
    assert kinds["clear(1)"] is Frame


def test_cyclic_rule_is_indeterminate():
    gt = ground(CYCLIC)
    ca = compile_action(gt, gt.action("a"))
    (r,) = ca.fluents.values()
    assert isinstance(r, Indeterminate)
    p = pl.Var(init_atom(atom(gt, "p")))
    assert r.nec == pl.TRUE
    assert pl.equivalent(r.suf, p)


def test_modified_pickup_conditional_effect():
    gt, _, ca = compiled_action("blocks4ops_modified", "pickup(1)")
    r = ca.fluents[atom(gt, "clear(2)")]
    assert isinstance(r, Determinate)
    assert pl.equivalent(r.ssa, formula(PICKUP_1_MODIFIED_STRIPS["conditional"]["clear(2)"], gt))


@pytest.mark.parametrize("name", ["blocks3", "blocks4ops", "blocks4ops_modified", "cyclic",
                                  "explode", "monkey"])
def test_compiled_results_are_entailed(name):
    """Every emitted axiom follows from Init, Succ and Succ1."""
    for ca in compiled(name):
        assert ca.ok, ca.diagnostics
        th = pl.Theory(ca.theory.full_theory())
        for f, r in ca.fluents.items():
            s = pl.Var(succ_atom(f))
            nec, suf = bounds(f, r)
            assert all(a.time != "succ" for a in nec.atoms() | suf.atoms())
            assert th.entails(pl.implies(s, nec)), (ca.action, f)
            assert th.entails(pl.implies(suf, s)), (ca.action, f)


@pytest.mark.parametrize("name", ["blocks3", "blocks4ops_modified", "monkey"])
def test_pseudo_axioms_follow_the_construction(name):
    """Each materialised pseudo axiom is equivalent to one assembled by hand
    from the raw ground effects and rules."""
    gt = grounded(name)
    for a in gt.actions[:6]:
        at = build_action_theory(gt, a)
        for f in gt.primitive_atoms:
            effs = [e for e in gt.effects.get(a, []) if e.atom == f]
            rules = [r for r in gt.causes if r.atom == f]
            pos = [lift(e.condition, "init") for e in effs if e.positive] + \
                  [lift(r.condition, "succ") for r in rules if r.positive]
            neg = [lift(e.condition, "init") for e in effs if not e.positive] + \
                  [lift(r.condition, "succ") for r in rules if not r.positive]
            manual = pl.Iff(pl.Var(succ_atom(f)),
                            pl.disj(*pos, pl.conj(pl.Var(init_atom(f)), pl.neg(pl.disj(*neg)))))
            assert pl.equivalent(at.succ[f].formula(), manual)


# ── STRIPS extraction ───────────────────────────────────────────────────────

@pytest.mark.parametrize("name", BUNDLED)
def test_strips_lists_are_disjoint_and_justified(name):
    for ca in compiled(name):
        se = ca.strips
        keys = [set(se.add), set(se.delete), set(se.conditional), set(se.indeterminate)]
        for i in range(4):
            for j in range(i + 1, 4):
                assert not keys[i] & keys[j]
        init = pl.Theory(ca.theory.init_theory())
        for f in se.add:
            assert isinstance(ca.fluents[f], ConstantTrue)
            assert not init.entails(pl.Var(init_atom(f)))
        for f in se.delete:
            assert isinstance(ca.fluents[f], ConstantFalse)
            assert not init.entails(pl.Not(pl.Var(init_atom(f))))
        for f, phi in se.conditional.items():
            assert isinstance(ca.fluents[f], Determinate) and ca.fluents[f].ssa == phi
        for f, r in ca.fluents.items():
            if isinstance(r, Frame):
                assert all(f not in k for k in keys)


def test_constant_already_true_is_not_added():
    gt, _, ca = compiled_action("blocks3", "stack(1,2)")
    assert isinstance(ca.fluents[atom(gt, "on(1,3)")], ConstantFalse)
    assert atom(gt, "on(1,3)") not in ca.strips.delete


def test_opaque_precondition():
    gt = ground("fluent(p). fluent(q). action(a). precond(a, or(p, q)). effect(a, true, p).")
    ca = compile_action(gt, gt.action("a"))
    assert isinstance(ca.strips.preconditions, pl.Formula)
    assert ca.strips.preconditions == ca.theory.precondition


def test_compiled_output_is_canonical():
    for ca in compiled("monkey"):
        for f, r in ca.fluents.items():
            for phi in bounds(f, r):
                assert pl.canonicalize(phi) == phi
