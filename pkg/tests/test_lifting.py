"""
test_lifting.py - Complex-fluent inlining, class membership, embeddings and transport.
"""

from __future__ import annotations

import pytest

from ccp import bundled_domain
from ccp import proplogic as pl
from ccp import syntax as sx
from ccp.grounder import ActionInstance, GroundAtom, ground
from ccp.lifting import (Embedding, EmbeddingError, apply_embedding, check_transport, classify,
                         inline_complex, prenex, render_prenex, sample_entailed,
                         transport_suite)

from conftest import compiled_action

BLOCKS = "domain(block, [1,2,3])."


def blocks(names: str) -> sx.SourceDescription:
    text = bundled_domain("blocks3")
    assert BLOCKS in text
    return sx.parse_description(text.replace(BLOCKS, f"domain(block, [{names}])."))


def inlined(name: str) -> sx.SourceDescription:
    return inline_complex(sx.parse_description(bundled_domain(name)))


def tau_for(mapping: dict, target: str) -> Embedding:
    return Embedding.make(mapping, {"block": ["1", "2", "3"]}, {"block": target.split(",")})


# ── Inlining ────────────────────────────────────────────────────────────────

def test_stack_precondition_inlined_and_prenexed():
    d = inlined("blocks3")
    (pre,) = [s for s in d.of_kind(sx.PrecondDef) if s.schema.predicate == "stack"]
    assert not any(a.predicate == "clear" for a in sx.atoms_of(pre.body))
    prefix, matrix = prenex(pre.body)
    assert [q for q, _, _ in prefix] == ["forall", "forall"]
    assert not sx.has_quantifier(matrix)
    assert render_prenex(prefix, matrix).startswith("forall(")


def test_inlining_without_complex_fluents_is_identity():
    desc = sx.parse_description(bundled_domain("monkey"))
    assert inline_complex(desc) == desc


def test_inlining_keeps_definitions():
    d = inlined("blocks3")
    assert len(list(d.of_kind(sx.DefinedDef))) == 1


def test_inlined_description_grounds_to_same_preconditions():
    raw = ground(bundled_domain("blocks3"))
    gt = ground(inlined("blocks3"))
    for a in raw.actions:
        expanded = pl.map_atoms(raw.preconds[a],
                                lambda x: raw.defined[x] if x.kind == "complex" else pl.Var(x))
        assert pl.equivalent(expanded, gt.preconds[a])


# ── Classification ──────────────────────────────────────────────────────────

def test_example_world_is_simple_two():
    report = classify(inlined("blocks3"))
    assert report.simple_II


def test_gripper_world_is_simple_two():
    assert classify(inlined("blocks4ops")).simple_II


def test_monkey_is_not_simple_two():
    report = classify(inlined("monkey"))
    assert not report.simple_II and not report.simple_I
    assert any(v.condition == "II.3" and "onbox(X), at(monkey,X)" in v.statement
               for v in report.violations)


def test_explode_fails_simple_one():
    report = classify(inlined("explode"))
    assert not report.simple_I
    assert any(v.condition == "2" and "explodeAt" in v.statement for v in report.violations)


def test_cyclic_is_simple_one_only():
    report = classify(inlined("cyclic"))
    assert report.simple_I and not report.simple_II


def test_uninlined_complex_fluent_is_a_violation():
    report = classify(sx.parse_description(bundled_domain("blocks3")))
    assert not report.simple_I and not report.simple_II
    assert any(v.condition == "complex" for v in report.violations)


def test_existential_precondition_is_a_violation():
    d = sx.parse_description("domain(t, [1]). fluent(p(X), [t(X)]). action(a). "
                             "precond(a, exists(X, t, p(X))).")
    report = classify(d)
    assert not report.simple_I and [v.condition for v in report.violations] == ["1"]


def test_every_negative_verdict_has_a_reason():
    for name in ("blocks3", "blocks4ops", "monkey", "explode", "cyclic"):
        r = classify(inlined(name))
        if not (r.simple_I and r.simple_II):
            assert r.violations


# ── Embeddings ──────────────────────────────────────────────────────────────

def test_apply_embedding():
    tau = tau_for({"1": "a", "2": "c", "3": "e"}, "a,b,c,d,e")
    assert str(apply_embedding(ActionInstance("stack", ("1", "2")), tau)) == "stack(a,c)"
    assert str(apply_embedding(GroundAtom("on", ("1", "3")), tau)) == "on(a,e)"
    f = pl.Not(pl.Var(pl.succ_atom(GroundAtom("on", ("1", "3")))))
    assert pl.to_text(apply_embedding(f, tau)) == "-succ(on(a,e))"


def test_identity_embedding():
    tau = tau_for({"1": "1", "2": "2", "3": "3"}, "1,2,3")
    a = GroundAtom("on", ("1", "2"))
    assert apply_embedding(a, tau) == a


def test_non_object_constants_are_kept():
    tau = tau_for({"1": "a", "2": "b", "3": "c"}, "a,b,c")
    assert apply_embedding(GroundAtom("at", ("monkey", "1")), tau) == GroundAtom("at", ("monkey", "a"))


@pytest.mark.parametrize("mapping,target", [
    ({"1": "a", "2": "a", "3": "b"}, "a,b"),          # not injective
    ({"1": "a", "2": "b"}, "a,b,c"),                  # incomplete
    ({"1": "a", "2": "b", "3": "z"}, "a,b,c"),        # leaves the type
])
def test_bad_embeddings_are_rejected(mapping, target):
    with pytest.raises(EmbeddingError):
        tau_for(mapping, target)


def test_embedding_preserves_legality():
    tau = tau_for({"1": "a", "2": "c", "3": "d"}, "a,b,c,d")
    gt, gt_p = ground(blocks("1,2,3")), ground(blocks("a,b,c,d"))
    assert {apply_embedding(x, tau) for x in gt.fluent_atoms} <= set(gt_p.fluent_atoms)
    assert {apply_embedding(x, tau) for x in gt.actions} <= set(gt_p.actions)


# ── Transport ───────────────────────────────────────────────────────────────

def test_stacked_block_transports():
    tau = tau_for({"1": "a", "2": "c", "3": "e"}, "a,b,c,d,e")
    gt = ground(blocks("1,2,3"))
    on = lambda x, y: pl.Var(pl.succ_atom(gt.atom_table()[f"on({x},{y})"]))
    report = check_transport(blocks("1,2,3"), blocks("a,b,c,d,e"), tau, "stack(1,2)",
                             [on(1, 2), pl.Not(on(1, 3))])
    assert report.entailed == 2 and report.ok


def test_identity_transport():
    tau = tau_for({"1": "1", "2": "2", "3": "3"}, "1,2,3")
    _, _, ca = compiled_action("blocks3", "unstack(2,1)")
    psis = sample_entailed(ca, 20, seed=1)
    report = check_transport(blocks("1,2,3"), blocks("1,2,3"), tau, "unstack(2,1)", psis)
    assert report.entailed == 20 and report.ok


def test_sampled_formulas_are_entailed():
    _, at, ca = compiled_action("blocks3", "move(1,2,3)")
    th = pl.Theory(at.full_theory())
    for psi in sample_entailed(ca, 30, seed=4):
        assert th.entails(psi)


def test_transport_suite_small():
    tau = tau_for({"1": "a", "2": "c", "3": "d"}, "a,b,c,d")
    report = transport_suite(blocks("1,2,3"), blocks("a,b,c,d"), tau, n=20, seed=3)
    assert report.checked == 20 and report.entailed == 20 and report.ok


def test_transport_failure_is_reported_outside_the_class():
    src = "domain(t, [1]). fluent(p(X), [t(X)]). action(a). precond(a, exists(X, t, p(X)))."
    d, dp = sx.parse_description(src), sx.parse_description(src.replace("[1]", "[1, 2]"))
    tau = Embedding.make({"1": "1"}, {"t": ["1"]}, {"t": ["1", "2"]})
    gt = ground(d)
    psi = pl.Var(pl.init_atom(gt.atom_table()["p(1)"]))
    report = check_transport(d, dp, tau, "a", [psi])
    assert report.entailed == 1 and not report.ok


def test_transport_rejects_different_descriptions():
    tau = tau_for({"1": "a", "2": "b", "3": "c"}, "a,b,c")
    other = sx.parse_description(bundled_domain("blocks3").replace(BLOCKS, "domain(block, [a,b,c]).")
                                 + "\nfluent(extra).")
    with pytest.raises(EmbeddingError):
        check_transport(blocks("1,2,3"), other, tau, "stack(1,2)", [])
