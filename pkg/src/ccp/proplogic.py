"""
proplogic.py - Propositional formulas over arbitrary hashable atoms.

Atoms are usually ``PropAtom`` values (init/succ/static wrappers around
ground atoms), but plain ground atoms and even strings work, which keeps the
tests short.  Formulas are immutable and hash-cached.

Besides the usual connectives this module provides entailment (via the CDCL
solver in ``sat``), unit propagation over clause sets, forgetting by Shannon
expansion, strongest necessary / weakest sufficient conditions, and a
Quine-McCluskey minimiser used to print compact results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Mapping, NamedTuple, Optional, Union

from .sat import Solver


# ── Atoms ───────────────────────────────────────────────────────────────────

_TIME_ORDER = {"init": 0, "succ": 1, "static": 2}


@dataclass(frozen=True)
class PropAtom:
    """A ground atom at a time point: init(f), succ(f), or a static atom."""
    time: str           # "init" | "succ" | "static"
    atom: Any

    def __str__(self) -> str:
        if self.time == "static":
            return str(self.atom)
        return f"{self.time}({self.atom})"

    @property
    def sort_key(self) -> tuple:
        return (atom_key(self.atom), _TIME_ORDER[self.time])


def init_atom(a) -> PropAtom:
    return PropAtom("init", a)


def succ_atom(a) -> PropAtom:
    return PropAtom("succ", a)


def static_atom(a) -> PropAtom:
    return PropAtom("static", a)


@dataclass(frozen=True)
class Aux:
    """Auxiliary atom introduced by clause-form conversion."""
    index: int

    def __str__(self) -> str:
        return f"_aux{self.index}"

    @property
    def sort_key(self) -> tuple:
        return ("~aux", self.index)


def atom_key(a) -> tuple:
    key = getattr(a, "sort_key", None)
    return key if key is not None else (str(a),)


# ── Formulas ────────────────────────────────────────────────────────────────

class Formula:
    __slots__ = ("_hash", "_atoms")

    def atoms(self) -> frozenset:
        cached = self._atoms
        if cached is None:
            cached = self._atoms = frozenset(self._collect())
        return cached

    def _collect(self):
        out = set()
        for c in self.children():
            out |= c.atoms()
        return out

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:
            return False
        return self._fields() == other._fields()

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def _fields(self) -> tuple:
        return self.children()

    def __invert__(self) -> "Formula":
        return neg(self)

    def __and__(self, other: "Formula") -> "Formula":
        return conj(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return disj(self, other)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {to_text(self)}>"


class Const(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = bool(value)
        self._hash = hash(("const", self.value))
        self._atoms = frozenset()

    def _fields(self):
        return (self.value,)


TRUE = Const(True)
FALSE = Const(False)


class Var(Formula):
    __slots__ = ("atom",)

    def __init__(self, atom: Hashable):
        self.atom = atom
        self._hash = hash(("var", atom))
        self._atoms = frozenset((atom,))

    def _fields(self):
        return (self.atom,)


class Not(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg: Formula):
        self.arg = arg
        self._hash = hash(("not", arg))
        self._atoms = None

    def children(self):
        return (self.arg,)


class _NAry(Formula):
    __slots__ = ("args",)
    tag = ""

    def __init__(self, *args):
        if len(args) == 1 and not isinstance(args[0], Formula):
            args = tuple(args[0])
        flat: list[Formula] = []
        for a in args:
            if type(a) is type(self):
                flat.extend(a.args)
            else:
                flat.append(a)
        if len(flat) < 2:
            raise ValueError(f"{type(self).__name__} needs at least two operands")
        self.args = tuple(flat)
        self._hash = hash((self.tag, self.args))
        self._atoms = None

    def children(self):
        return self.args


class And(_NAry):
    __slots__ = ()
    tag = "and"


class Or(_NAry):
    __slots__ = ()
    tag = "or"


class _Binary(Formula):
    __slots__ = ("left", "right")
    tag = ""

    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right
        self._hash = hash((self.tag, left, right))
        self._atoms = None

    def children(self):
        return (self.left, self.right)


class Implies(_Binary):
    __slots__ = ()
    tag = "implies"


class Iff(_Binary):
    __slots__ = ()
    tag = "iff"


def var(atom) -> Var:
    return Var(atom)


def as_formula(x) -> Formula:
    if isinstance(x, Formula):
        return x
    if isinstance(x, bool):
        return TRUE if x else FALSE
    return Var(x)


# ── Folding constructors ────────────────────────────────────────────────────

def neg(f: Formula) -> Formula:
    if f is TRUE or f == TRUE:
        return FALSE
    if f is FALSE or f == FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def _nary(cls, unit: Const, zero: Const, fs) -> Formula:
    out: list[Formula] = []
    seen: set[Formula] = set()
    for f in fs:
        parts = f.args if isinstance(f, cls) else (f,)
        for p in parts:
            if isinstance(p, Const):
                if p.value == zero.value:
                    return zero
                continue
            if p in seen:
                continue
            seen.add(p)
            out.append(p)
    for p in out:
        if isinstance(p, Not) and p.arg in seen:
            return zero
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    return cls(*out)


def conj(*fs: Formula) -> Formula:
    if len(fs) == 1 and not isinstance(fs[0], Formula):
        fs = tuple(fs[0])
    return _nary(And, TRUE, FALSE, fs)


def disj(*fs: Formula) -> Formula:
    if len(fs) == 1 and not isinstance(fs[0], Formula):
        fs = tuple(fs[0])
    return _nary(Or, FALSE, TRUE, fs)


def implies(a: Formula, b: Formula) -> Formula:
    if a == FALSE or b == TRUE:
        return TRUE
    if a == TRUE:
        return b
    if b == FALSE:
        return neg(a)
    if a == b:
        return TRUE
    return Implies(a, b)


def iff(a: Formula, b: Formula) -> Formula:
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    if a == FALSE:
        return neg(b)
    if b == FALSE:
        return neg(a)
    if a == b:
        return TRUE
    if neg(a) == b:
        return FALSE
    return Iff(a, b)


def rebuild(f: Formula, args: list[Formula]) -> Formula:
    """Rebuild f's connective over new operands with folding."""
    if isinstance(f, Not):
        return neg(args[0])
    if isinstance(f, And):
        return conj(*args)
    if isinstance(f, Or):
        return disj(*args)
    if isinstance(f, Implies):
        return implies(*args)
    if isinstance(f, Iff):
        return iff(*args)
    return f


# ── Traversal ───────────────────────────────────────────────────────────────

def map_atoms(f: Formula, fn: Callable[[Any], Formula], memo: Optional[dict] = None) -> Formula:
    """Replace every atom a by fn(a) (a formula), folding constants."""
    if memo is None:
        memo = {}
    key = id(f)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(f, Var):
        out = as_formula(fn(f.atom))
    elif isinstance(f, Const):
        out = f
    else:
        out = rebuild(f, [map_atoms(c, fn, memo) for c in f.children()])
    memo[key] = (f, out)        # keep f alive so its id stays unique
    return out


def substitute(f: Formula, mapping: Mapping[Any, Any]) -> Formula:
    """Replace atoms per mapping (values are formulas or bools); fold."""
    if not mapping or not (f.atoms() & mapping.keys()):
        return f
    table = {k: as_formula(v) for k, v in mapping.items()}
    return map_atoms(f, lambda a: table.get(a, Var(a)))


def rename(f: Formula, fn: Callable[[Any], Any]) -> Formula:
    """Map atoms to atoms."""
    return map_atoms(f, lambda a: Var(fn(a)))


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in f.children())


class UnknownAtom(KeyError):
    pass


def evaluate(f: Formula, m: Mapping[Any, bool]) -> bool:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Var):
        try:
            return bool(m[f.atom])
        except KeyError:
            raise UnknownAtom(f.atom) from None
    if isinstance(f, Not):
        return not evaluate(f.arg, m)
    if isinstance(f, And):
        return all(evaluate(a, m) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, m) for a in f.args)
    if isinstance(f, Implies):
        return (not evaluate(f.left, m)) or evaluate(f.right, m)
    if isinstance(f, Iff):
        return evaluate(f.left, m) == evaluate(f.right, m)
    raise TypeError(f"not a formula: {f!r}")


# ── Normal forms and ordering ───────────────────────────────────────────────

def nnf(f: Formula, positive: bool = True) -> Formula:
    if isinstance(f, Const):
        return f if positive else neg(f)
    if isinstance(f, Var):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return nnf(f.arg, not positive)
    if isinstance(f, And):
        parts = [nnf(a, positive) for a in f.args]
        return conj(*parts) if positive else disj(*parts)
    if isinstance(f, Or):
        parts = [nnf(a, positive) for a in f.args]
        return disj(*parts) if positive else conj(*parts)
    if isinstance(f, Implies):
        if positive:
            return disj(nnf(f.left, False), nnf(f.right, True))
        return conj(nnf(f.left, True), nnf(f.right, False))
    if isinstance(f, Iff):
        a, b = f.left, f.right
        if positive:
            return conj(disj(nnf(a, False), nnf(b, True)), disj(nnf(a, True), nnf(b, False)))
        return conj(disj(nnf(a, True), nnf(b, True)), disj(nnf(a, False), nnf(b, False)))
    raise TypeError(f"not a formula: {f!r}")


def sort_key(f: Formula) -> tuple:
    if isinstance(f, Const):
        return (0, f.value)
    if isinstance(f, Var):
        return (1, atom_key(f.atom), 0)
    if isinstance(f, Not) and isinstance(f.arg, Var):
        return (1, atom_key(f.arg.atom), 1)
    if isinstance(f, Not):
        return (2, sort_key(f.arg))
    order = {And: 3, Or: 4, Implies: 5, Iff: 6}[type(f)]
    return (order, len(f.children()), tuple(sort_key(c) for c in f.children()))


def _sorted_nary(f: Formula) -> Formula:
    if isinstance(f, (And, Or)):
        args = []
        for a in map(_sorted_nary, f.args):
            # a child may collapse into the parent's connective; flatten before sorting
            args.extend(a.args if type(a) is type(f) else (a,))
        args.sort(key=sort_key)
        return conj(*args) if isinstance(f, And) else disj(*args)
    if isinstance(f, Not):
        return neg(_sorted_nary(f.arg))
    return f


def canonicalize(f: Formula) -> Formula:
    """Negation normal form with operands sorted and deduplicated."""
    return _sorted_nary(nnf(f))


def simplify(f: Formula, units: Iterable = ()) -> Formula:
    """Substitute unit literals and fold constants/duplicates."""
    table = {}
    for lit in units:
        atom, positive = lit
        table[atom] = TRUE if positive else FALSE
    if table:
        return substitute(f, table)
    return map_atoms(f, Var)


def is_literal(f: Formula) -> bool:
    return isinstance(f, Var) or (isinstance(f, Not) and isinstance(f.arg, Var))


def conjuncts(f: Formula) -> list[Formula]:
    if f == TRUE:
        return []
    return list(f.args) if isinstance(f, And) else [f]


# ── Literals and clause sets ────────────────────────────────────────────────

class Lit(NamedTuple):
    atom: Any
    positive: bool = True

    def __neg__(self) -> "Lit":
        return Lit(self.atom, not self.positive)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"-{self.atom}"

    def formula(self) -> Formula:
        return Var(self.atom) if self.positive else Not(Var(self.atom))


def literal_of(f: Formula) -> Lit:
    if isinstance(f, Var):
        return Lit(f.atom, True)
    if isinstance(f, Not) and isinstance(f.arg, Var):
        return Lit(f.arg.atom, False)
    raise ValueError(f"not a literal: {f}")


class ClauseSet:
    """A list of clauses (frozensets of Lit); tautologies are dropped."""

    def __init__(self, clauses: Iterable[Iterable[Lit]] = ()):
        out: list[frozenset] = []
        seen = set()
        for c in clauses:
            c = frozenset(Lit(*l) for l in c)
            if any(-l in c for l in c) or c in seen:
                continue
            seen.add(c)
            out.append(c)
        self.clauses = out

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __add__(self, other: "ClauseSet") -> "ClauseSet":
        return ClauseSet(list(self.clauses) + list(other.clauses))

    def atoms(self) -> set:
        return {l.atom for c in self.clauses for l in c}


class _Conflict:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "CONFLICT"

    def __bool__(self) -> bool:
        return False


CONFLICT = _Conflict()


def unit_closure(cs: Union[ClauseSet, Iterable[Iterable[Lit]]]):
    """Least fixpoint of unit propagation.

    Returns the frozenset of derived literals, or CONFLICT when the empty
    clause is derived.
    """
    clauses = list(cs) if isinstance(cs, ClauseSet) else list(ClauseSet(cs))
    occurs: dict[Lit, list[int]] = {}
    for i, c in enumerate(clauses):
        for l in c:
            occurs.setdefault(-l, []).append(i)     # clauses hit when l is false
    derived: dict[Any, bool] = {}
    queue: list[Lit] = []
    for c in clauses:
        if not c:
            return CONFLICT
        if len(c) == 1:
            (l,) = c
            if derived.get(l.atom, l.positive) != l.positive:
                return CONFLICT
            if l.atom not in derived:
                derived[l.atom] = l.positive
                queue.append(l)
    while queue:
        l = queue.pop()
        for i in occurs.get(l, ()):
            open_lits = []
            satisfied = False
            for m in clauses[i]:
                v = derived.get(m.atom)
                if v is None:
                    open_lits.append(m)
                elif v == m.positive:
                    satisfied = True
                    break
            if satisfied:
                continue
            if not open_lits:
                return CONFLICT
            if len(open_lits) == 1:
                m = open_lits[0]
                derived[m.atom] = m.positive
                queue.append(m)
    return frozenset(Lit(a, v) for a, v in derived.items())


class _AuxSource:
    def __init__(self) -> None:
        self.n = 0

    def fresh(self) -> Aux:
        self.n += 1
        return Aux(self.n)


def clausify(f: Union[Formula, Iterable[Formula]], limit: int = 64,
             aux: Optional[_AuxSource] = None) -> ClauseSet:
    """Clause form by distribution; oversized products fall back to naming
    subformulas with auxiliary atoms (one-directional definitions)."""
    if not isinstance(f, Formula):
        f = conj(*f)
    aux = aux or _AuxSource()
    extra: list[frozenset] = []

    def cnf(g: Formula) -> list[frozenset]:
        if g == TRUE:
            return []
        if g == FALSE:
            return [frozenset()]
        if is_literal(g):
            return [frozenset((literal_of(g),))]
        if isinstance(g, And):
            out = []
            for a in g.args:
                out.extend(cnf(a))
            return out
        assert isinstance(g, Or)
        parts = [cnf(a) for a in g.args]
        total = 1
        for p in parts:
            total *= max(len(p), 1)
        if total > limit:
            named = []
            for a, p in zip(g.args, parts):
                if len(p) <= 1:
                    named.append(p)
                    continue
                x = aux.fresh()
                for c in p:                       # x -> a
                    extra.append(c | {Lit(x, False)})
                named.append([frozenset((Lit(x, True),))])
            parts = named
        out = [frozenset()]
        for p in parts:
            if not p:                              # an empty conjunction: true disjunct
                return []
            out = [c | d for c in out for d in p]
        return out

    return ClauseSet(cnf(nnf(f)) + extra)


# ── Satisfiability and entailment ───────────────────────────────────────────

class Theory:
    """A formula set loaded into a SAT solver for repeated queries."""

    def __init__(self, formulas: Iterable[Formula] = ()):
        self.solver = Solver()
        self.ids: dict[Any, int] = {}
        self.atom_of: dict[int, Any] = {}
        self._cache: dict[Formula, int] = {}
        self._true = self.solver.new_var()
        self.solver.add_clause([self._true])
        for f in formulas:
            self.add(f)

    def var_id(self, atom) -> int:
        v = self.ids.get(atom)
        if v is None:
            v = self.ids[atom] = self.solver.new_var()
            self.atom_of[v] = atom
        return v

    def encode(self, f: Formula) -> int:
        """Literal equivalent to f (Tseitin definitions are added)."""
        if isinstance(f, Const):
            return self._true if f.value else -self._true
        if isinstance(f, Var):
            return self.var_id(f.atom)
        if isinstance(f, Not):
            return -self.encode(f.arg)
        hit = self._cache.get(f)
        if hit is not None:
            return hit
        s = self.solver
        if isinstance(f, (And, Or)):
            lits = [self.encode(a) for a in f.args]
            x = s.new_var()
            if isinstance(f, And):
                for l in lits:
                    s.add_clause([-x, l])
                s.add_clause([x] + [-l for l in lits])
            else:
                for l in lits:
                    s.add_clause([x, -l])
                s.add_clause([-x] + lits)
        elif isinstance(f, Implies):
            return self.encode(Or(Not(f.left), f.right))
        elif isinstance(f, Iff):
            a, b = self.encode(f.left), self.encode(f.right)
            x = s.new_var()
            s.add_clause([-x, -a, b])
            s.add_clause([-x, a, -b])
            s.add_clause([x, a, b])
            s.add_clause([x, -a, -b])
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._cache[f] = x
        return x

    def add(self, f: Formula) -> None:
        for g in conjuncts(f):
            if isinstance(g, Or) and all(is_literal(a) for a in g.args):
                self.solver.add_clause([self.encode(a) for a in g.args])
            elif isinstance(g, Const) and not g.value:
                self.solver.add_clause([])
            else:
                self.solver.add_clause([self.encode(g)])

    def model(self, *assume: Formula) -> Optional[dict]:
        lits = [self.encode(a) for a in assume]
        m = self.solver.solve(lits)
        if m is None:
            return None
        pos = set(l for l in m if l > 0)
        return {a: (v in pos) for a, v in self.ids.items()}

    def satisfiable(self, *assume: Formula) -> bool:
        return self.solver.solve([self.encode(a) for a in assume]) is not None

    def entails(self, f: Formula) -> bool:
        return not self.satisfiable(neg(f))

    def projected_models(self, atoms: list, *assume: Formula) -> list[tuple[bool, ...]]:
        """All distinct restrictions of models to `atoms` (AllSAT)."""
        act = self.solver.new_var()         # guards the blocking clauses
        base = [self.encode(a) for a in assume] + [act]
        ids = [self.var_id(a) for a in atoms]
        out = []
        while True:
            m = self.solver.solve(base)
            if m is None:
                break
            pos = set(l for l in m if l > 0)
            row = tuple(v in pos for v in ids)
            out.append(row)
            self.solver.add_clause([-act] + [(-v if b else v) for v, b in zip(ids, row)])
        self.solver.add_clause([-act])
        return sorted(out)


def satisfiable(f: Union[Formula, Iterable[Formula]]) -> bool:
    fs = [f] if isinstance(f, Formula) else list(f)
    return Theory(fs).satisfiable()


def entails(theory: Iterable[Formula], f: Formula) -> bool:
    return not Theory(list(theory) + [neg(f)]).satisfiable()


def equivalent(a: Formula, b: Formula, theory: Iterable[Formula] = ()) -> bool:
    return entails(theory, iff(a, b))


# ── Forgetting, SNC, WSC ────────────────────────────────────────────────────

def _shrink(f: Formula, max_atoms: int = 8) -> Formula:
    """Keep intermediate results small: exact minimisation when cheap."""
    if size(f) > 24 and len(f.atoms()) <= max_atoms:
        return minimize(f)
    return f


def forget(f: Union[Formula, Iterable[Formula]], atoms: Iterable) -> Formula:
    """Eliminate atoms by Shannon expansion: f[p/true] or f[p/false].

    Works bucket-wise on the conjuncts of f: only conjuncts that mention the
    atom being eliminated are expanded.
    """
    parts = conjuncts(f) if isinstance(f, Formula) else [g for x in f for g in conjuncts(x)]
    todo = set(atoms)
    while True:
        live = [a for a in todo if any(a in p.atoms() for p in parts)]
        if not live:
            break
        counts = {a: sum(1 for p in parts if a in p.atoms()) for a in live}
        a = min(live, key=lambda x: (counts[x], atom_key(x)))
        todo.discard(a)
        touching = [p for p in parts if a in p.atoms()]
        rest = [p for p in parts if a not in p.atoms()]
        g = conj(*touching)
        h = disj(substitute(g, {a: TRUE}), substitute(g, {a: FALSE}))
        h = _shrink(h)
        if h == FALSE:
            return FALSE
        parts = rest + conjuncts(h)
    return conj(*parts)


def snc(theory: Iterable[Formula], q: Formula, vocab: Iterable) -> Formula:
    """Strongest necessary condition of q over vocab under theory."""
    theory = list(theory)
    vocab = set(vocab)
    everything = set(q.atoms())
    for t in theory:
        everything |= t.atoms()
    return forget(theory + [q], everything - vocab)


def wsc(theory: Iterable[Formula], q: Formula, vocab: Iterable) -> Formula:
    """Weakest sufficient condition of q over vocab under theory."""
    return neg(snc(theory, neg(q), vocab))


# ── Minimisation ────────────────────────────────────────────────────────────

def _primes(ones: set[int], dc: set[int], n: int) -> list[tuple[int, int]]:
    """Prime implicants as (value, mask) pairs; mask bits are don't-care."""
    current = {(m, 0) for m in ones | dc}
    primes: set[tuple[int, int]] = set()
    while current:
        nxt = set()
        used = set()
        by_mask: dict[int, list[int]] = {}
        for v, mask in current:
            by_mask.setdefault(mask, []).append(v)
        for mask, values in by_mask.items():
            vals = set(values)
            for v in values:
                for bit in range(n):
                    b = 1 << bit
                    if mask & b or v & b:
                        continue
                    w = v | b
                    if w in vals:
                        nxt.add((v, mask | b))
                        used.add((v, mask))
                        used.add((w, mask))
        primes |= current - used
        current = nxt
    return sorted(primes)


def _covers(term: tuple[int, int], m: int) -> bool:
    v, mask = term
    return (m & ~mask) == v


def _cover(ones: set[int], primes: list[tuple[int, int]], n: int) -> list[tuple[int, int]]:
    remaining = set(ones)
    chosen: list[tuple[int, int]] = []
    for m in sorted(ones):                      # essential primes
        cands = [p for p in primes if _covers(p, m)]
        if len(cands) == 1 and cands[0] not in chosen:
            chosen.append(cands[0])
    for p in chosen:
        remaining -= {m for m in remaining if _covers(p, m)}
    while remaining:
        def gain(p):
            lits = n - bin(p[1]).count("1")
            return (-sum(1 for m in remaining if _covers(p, m)), lits, p)
        best = min(primes, key=gain)
        chosen.append(best)
        remaining -= {m for m in remaining if _covers(best, m)}
    return chosen


def _sop(terms, atoms: list, positive: bool) -> Formula:
    n = len(atoms)
    out = []
    for v, mask in terms:
        lits = []
        for i, a in enumerate(atoms):
            b = 1 << (n - 1 - i)
            if mask & b:
                continue
            val = bool(v & b)
            lits.append(Var(a) if val == positive else Not(Var(a)))
        out.append(conj(*lits) if positive else disj(*lits))
    return disj(*out) if positive else conj(*out)


def _count_lits(f: Formula) -> int:
    if isinstance(f, Var):
        return 1
    return sum(_count_lits(c) for c in f.children())


def minimize(f: Formula, theory: Optional["Theory"] = None, max_atoms: int = 10) -> Formula:
    """A small formula equivalent to f (under `theory`, when given).

    Truth-table based; assignments of f's atoms that are inconsistent with the
    theory are don't-cares.  Formulas over more than max_atoms atoms are only
    canonicalised.
    """
    atoms = sorted(f.atoms(), key=atom_key)
    n = len(atoms)
    if n > max_atoms:
        return canonicalize(f)
    if n == 0:
        return TRUE if evaluate(f, {}) else FALSE
    if theory is not None:
        rows = theory.projected_models(atoms)
        allowed = {sum(1 << (n - 1 - i) for i, b in enumerate(r) if b) for r in rows}
    else:
        allowed = set(range(1 << n))
    ones, zeros = set(), set()
    for m in allowed:
        assign = {a: bool(m >> (n - 1 - i) & 1) for i, a in enumerate(atoms)}
        (ones if evaluate(f, assign) else zeros).add(m)
    if not zeros:
        return TRUE
    if not ones:
        return FALSE
    dc = set(range(1 << n)) - allowed
    dnf = _sop(_cover(ones, _primes(ones, dc, n), n), atoms, True)
    cnf = _sop(_cover(zeros, _primes(zeros, dc, n), n), atoms, False)
    best = min((dnf, cnf), key=lambda g: (_count_lits(g), size(g)))
    return canonicalize(best)


# ── Text form ───────────────────────────────────────────────────────────────

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def to_text(f: Formula) -> str:
    """Infix rendering: - & \\/ -> <-> in decreasing binding strength."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Var):
        return str(f.atom)
    if isinstance(f, Not):
        inner = to_text(f.arg)
        if isinstance(f.arg, (Var, Const, Not)):
            return "-" + inner
        return f"-({inner})"
    prec = _PREC[type(f)]

    def wrap(c: Formula) -> str:
        s = to_text(c)
        cp = _PREC.get(type(c))
        if cp is not None and (cp <= prec if isinstance(f, (Implies, Iff)) else cp < prec):
            return f"({s})"
        return s

    if isinstance(f, And):
        return " & ".join(wrap(a) for a in f.args)
    if isinstance(f, Or):
        return " \\/ ".join(wrap(a) for a in f.args)
    op = " -> " if isinstance(f, Implies) else " <-> "
    return wrap(f.left) + op + wrap(f.right)


class _TextParser:
    _SYMBOLS = ("<->", "->", "\\/", "&", "-", "(", ")", ",")

    def __init__(self, text: str, make_atom: Callable[[str, list], Any]):
        self.toks = self._lex(text)
        self.i = 0
        self.make_atom = make_atom

    def _lex(self, text: str) -> list[str]:
        out, i = [], 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            for sym in self._SYMBOLS:
                if text.startswith(sym, i):
                    out.append(sym)
                    i += len(sym)
                    break
            else:
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                if j == i:
                    raise ValueError(f"unexpected character {ch!r} in formula")
                out.append(text[i:j])
                i = j
        return out

    def peek(self) -> Optional[str]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"expected {expected or 'a token'}, found {tok!r}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek() is not None:
            raise ValueError(f"trailing input {self.peek()!r}")
        return f

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek() == "<->":
            self.take()
            return Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.disj())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.peek() == "\\/":
            self.take()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(*parts)

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(*parts)

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "-":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        return Var(self.term())

    def term(self):
        name = self.take()
        args: list = []
        if self.peek() == "(":
            self.take()
            args.append(self.term())
            while self.peek() == ",":
                self.take()
                args.append(self.term())
            self.take(")")
        return self.make_atom(name, args)


def parse_text(text: str, make_atom: Callable[[str, list], Any]) -> Formula:
    """Parse the infix form produced by to_text.

    make_atom(name, args) builds atoms bottom-up; nested terms arrive as
    whatever make_atom returned for them.
    """
    return _TextParser(text, make_atom).parse()
