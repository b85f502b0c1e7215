"""
test_proplogic.py - Formulas, SAT, unit propagation, forgetting, SNC/WSC.
"""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccp import proplogic as pl
from ccp.proplogic import FALSE, TRUE, Lit, Var
from ccp.sat import Solver

from brute import (ATOMS, brute_wsc, check_stepwise_wsc, equivalent, models, project,
                   random_formula)

p, q, r, s = (Var(x) for x in "pqrs")
seeds = st.integers(0, 2**32 - 1)


# ── Construction and evaluation ─────────────────────────────────────────────

def test_constructors_fold():
    assert pl.conj(p, TRUE) == p
    assert pl.conj(p, FALSE) == FALSE
    assert pl.disj(p, TRUE) == TRUE
    assert pl.neg(pl.neg(p)) == p
    assert pl.conj(p, pl.conj(q, r)) == pl.And(p, q, r)


def test_evaluate_examples():
    assert pl.evaluate(TRUE, {})
    assert pl.evaluate(pl.Iff(p, p), {"p": False})
    assert not pl.evaluate(pl.And(p, pl.Not(p)), {"p": True})


def test_evaluate_rejects_unknown_atom():
    with pytest.raises(pl.UnknownAtom):
        pl.evaluate(pl.Or(p, q), {"p": False})


def test_satisfiable_and_entails():
    assert not pl.satisfiable(pl.And(p, pl.Not(p)))
    assert pl.entails([pl.Implies(p, q), p], q)
    assert not pl.entails([pl.Implies(p, q)], q)
    assert pl.entails([], pl.Or(p, pl.Not(p)))


def test_simplify_examples():
    assert pl.simplify(pl.Or(TRUE, Var("x"))) == TRUE
    f, g = Var(pl.succ_atom("f")), Var(pl.succ_atom("g"))
    i = Var(pl.init_atom("f"))
    got = pl.simplify(pl.Iff(f, pl.And(i, pl.Not(g))), [Lit(pl.succ_atom("g"), False)])
    assert got == pl.Iff(f, i)


def test_canonicalize_sorts_and_dedups():
    a, b = Var("a"), Var("b")
    assert pl.canonicalize(pl.Or(b, a, b)) == pl.Or(a, b)


def test_literals():
    assert pl.literal_of(pl.Not(p)) == Lit("p", False)
    assert -Lit("p") == Lit("p", False)
    with pytest.raises(ValueError):
        pl.literal_of(pl.And(p, q))


# ── Unit propagation ────────────────────────────────────────────────────────

def test_unit_closure_chains():
    assert pl.unit_closure([[Lit("p")], [Lit("p", False), Lit("q")]]) == {Lit("p"), Lit("q")}


def test_unit_closure_conflict():
    assert pl.unit_closure([[Lit("p")], [Lit("p", False)]]) is pl.CONFLICT


def test_clause_set_drops_tautologies():
    cs = pl.ClauseSet([[Lit("p"), Lit("p", False)], [Lit("q")], [Lit("q")]])
    assert list(cs) == [frozenset({Lit("q")})]


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_unit_closure_is_entailed(seed):
    rng = random.Random(seed)
    f = pl.conj(*(random_formula(rng, ATOMS[:5], 2) for _ in range(4)))
    units = pl.unit_closure(pl.clausify(f))
    rows = models(f, ATOMS[:5])
    if units is pl.CONFLICT:
        assert not rows
        return
    for lit in units:
        if isinstance(lit.atom, pl.Aux):
            continue
        assert pl.entails([f], lit.formula())


# ── SAT ─────────────────────────────────────────────────────────────────────

@settings(max_examples=300, deadline=None)
@given(st.integers(1, 7), st.lists(st.lists(st.integers(-7, 7).filter(bool), min_size=1,
                                            max_size=4), max_size=25), st.lists(st.integers(-7, 7).filter(bool), max_size=3))
def test_solver_matches_brute_force(n, clauses, assumptions):
    clauses = [[l for l in c if abs(l) <= n] or [1] for c in clauses]
    assumptions = [l for l in assumptions if abs(l) <= n]
    sat = Solver()
    for _ in range(n):
        sat.new_var()
    for c in clauses:
        sat.add_clause(c)
    got = sat.solve(assumptions)
    expect = any(all(any((l > 0) == bits[abs(l) - 1] for l in c) for c in clauses)
                 and all((l > 0) == bits[abs(l) - 1] for l in assumptions)
                 for bits in itertools.product((False, True), repeat=n))
    assert (got is not None) == expect
    if got is not None:
        val = {abs(l): l > 0 for l in got}
        assert all(any((l > 0) == val[abs(l)] for l in c) for c in clauses)
        assert all((l > 0) == val[abs(l)] for l in assumptions)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_theory_agrees_with_truth_tables(seed):
    rng = random.Random(seed)
    atoms = ATOMS[:6]
    f, g = random_formula(rng, atoms, 4), random_formula(rng, atoms, 3)
    assert pl.satisfiable(f) == bool(models(f, atoms))
    assert pl.entails([f], g) == (models(f, atoms) <= models(g, atoms))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_projected_models(seed):
    rng = random.Random(seed)
    f = random_formula(rng, ATOMS[:6], 4)
    keep = sorted(rng.sample(ATOMS[:6], 3))
    got = pl.Theory([f]).projected_models(keep)
    assert set(got) == project(f, ATOMS[:6], keep)
    assert got == sorted(got)


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(1, 64))
def test_clausify_is_equisatisfiable(seed, limit):
    rng = random.Random(seed)
    f = random_formula(rng, ATOMS[:5], 4)
    cs = pl.clausify(f, limit=limit)
    cnf = pl.conj(*(pl.disj(*(l.formula() for l in c)) for c in cs))
    assert pl.satisfiable(cnf) == pl.satisfiable(f)
    # the clauses are at least as strong as f on its own vocabulary
    assert pl.entails([cnf], f)


# ── Forgetting ──────────────────────────────────────────────────────────────

def test_forget_examples():
    assert pl.forget(pl.And(p, q), {"q"}) == p
    assert pl.forget(pl.Iff(p, q), {"q"}) == TRUE
    sp, ip = Var(pl.succ_atom("p")), Var(pl.init_atom("p"))
    got = pl.forget(pl.And(pl.Not(sp), pl.Iff(sp, pl.Or(sp, ip))), {pl.succ_atom("p")})
    assert pl.equivalent(got, pl.Not(ip))


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_forget_is_projection(seed):
    rng = random.Random(seed)
    atoms = list(ATOMS[:rng.randint(2, 8)])
    f = pl.conj(*(random_formula(rng, atoms, 3) for _ in range(rng.randint(1, 3))))
    gone = set(rng.sample(atoms, rng.randint(1, len(atoms))))
    g = pl.forget(f, gone)
    assert not (g.atoms() & gone)
    keep = [a for a in atoms if a not in gone]
    assert pl.entails([f], g)
    assert project(g, keep, keep) == project(f, atoms, keep)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_forget_order_independent(seed):
    rng = random.Random(seed)
    atoms = list(ATOMS[:6])
    f = pl.conj(*(random_formula(rng, atoms, 3) for _ in range(3)))
    gone = rng.sample(atoms, 3)
    one = pl.forget(f, gone)
    stepwise = f
    for a in reversed(gone):
        stepwise = pl.forget(stepwise, [a])
    assert equivalent(one, stepwise, atoms)


# ── SNC / WSC ───────────────────────────────────────────────────────────────

def test_snc_wsc_examples():
    assert pl.equivalent(pl.snc([pl.Implies(q, r)], q, {"r"}), r)
    assert pl.snc([], q, {"q"}) == q
    assert pl.wsc([], q, {"q"}) == q
    assert pl.equivalent(pl.wsc([pl.Implies(r, q)], q, {"r"}), r)


def test_cyclic_conditions():
    sp, ip = Var(pl.succ_atom("p")), Var(pl.init_atom("p"))
    theory = [pl.Iff(sp, pl.Or(sp, ip))]
    alpha = pl.snc(theory, sp, {pl.init_atom("p")})
    assert alpha == TRUE
    beta = pl.wsc(theory + [alpha], sp, {pl.init_atom("p")})
    assert pl.equivalent(beta, ip)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_snc_wsc_against_projection(seed):
    rng = random.Random(seed)
    atoms = list(ATOMS[:rng.randint(3, 8)])
    theory = [random_formula(rng, atoms, 2) for _ in range(3)]
    target = Var(rng.choice(atoms))
    vocab = set(rng.sample(atoms, rng.randint(1, len(atoms) - 1)))
    keep = sorted(vocab)
    t = pl.conj(*theory)
    nec = pl.snc(theory, target, vocab)
    suf = pl.wsc(theory, target, vocab)
    assert nec.atoms() <= vocab and suf.atoms() <= vocab
    assert project(nec, keep, keep) == project(pl.And(t, target), atoms, keep)
    assert project(suf, keep, keep) == brute_wsc(t, target, vocab, atoms)
    # duality
    assert equivalent(suf, pl.neg(pl.snc(theory, pl.neg(target), vocab)), keep)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_stepwise_wsc_property(seed):
    assert check_stepwise_wsc(random.Random(seed))


# ── Canonical forms, minimisation, text ─────────────────────────────────────

@settings(max_examples=200, deadline=None)
@given(seeds)
def test_canonicalize_idempotent_and_equivalent(seed):
    f = random_formula(random.Random(seed), ATOMS[:5], 4)
    c = pl.canonicalize(f)
    assert pl.canonicalize(c) == c
    assert not pl.satisfiable(pl.Not(pl.Iff(f, c)))


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_minimize_preserves_meaning(seed):
    rng = random.Random(seed)
    f = random_formula(rng, ATOMS[:6], 4)
    m = pl.minimize(f)
    assert equivalent(f, m, ATOMS[:6])
    assert pl.minimize(m) == m


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_minimize_under_theory(seed):
    rng = random.Random(seed)
    f = random_formula(rng, ATOMS[:5], 4)
    theory = [random_formula(rng, ATOMS[:5], 2)]
    m = pl.minimize(f, pl.Theory(theory))
    assert pl.entails(theory, pl.Iff(f, m))


def _make(name, args):
    return f"{name}({','.join(args)})" if args else name


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_text_round_trip(seed):
    f = random_formula(random.Random(seed), ATOMS[:5], 4)
    assert equivalent(pl.parse_text(pl.to_text(f), _make), f, ATOMS[:5])
    c = pl.canonicalize(f)
    assert pl.parse_text(pl.to_text(c), _make) == c


def test_text_operators():
    f = pl.Iff(Var("a"), pl.Implies(pl.Or(Var("b"), pl.And(Var("c"), pl.Not(Var("d")))), FALSE))
    assert pl.to_text(f) == "a <-> b \\/ c & -d -> false"
    assert pl.to_text(pl.Implies(pl.Implies(Var("a"), Var("b")), Var("c"))) == "(a -> b) -> c"
    g = pl.parse_text("init(on(1,2)) & -succ(p)", _make)
    assert {str(a) for a in g.atoms()} == {"init(on(1,2))", "succ(p)"}


def test_timed_atoms_render():
    assert str(pl.init_atom("p")) == "init(p)"
    assert str(pl.succ_atom("p")) == "succ(p)"
    assert str(pl.static_atom("near(1,2)")) == "near(1,2)"
