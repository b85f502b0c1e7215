"""
syntax.py - Reader, validator and printer for action domain descriptions.

A description is a sequence of period-terminated statements written in a
Prolog-like term notation::

    domain(block, [1,2,3]).
    fluent(on(X,Y), [block(X), block(Y)]).
    complex(clear(X), [block(X)]).
    defined(clear(X), not(exists(Y, block, on(Y,X)))).
    causes(and(on(X,Y), neq(Y,Z)), not(on(X,Z))).

Reading happens in two passes: a tokenizer + generic term reader, then a
pass that interprets the generic terms as statements and formulas.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


# ── Diagnostics ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: Optional[int] = None
    column: Optional[int] = None
    severity: str = "error"          # "error" | "warning"

    def __str__(self) -> str:
        where = f"{self.line}:{self.column}: " if self.line is not None else ""
        return f"{where}{self.severity}: {self.message}"


class DescriptionError(Exception):
    """Raised when a description cannot be read or grounded."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# ── Terms ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Variable, Constant]


def is_variable_name(name: str) -> bool:
    return bool(name) and (name[0].isupper() or name[0] == "_")


def make_term(name: str) -> Term:
    return Variable(name) if is_variable_name(name) else Constant(name)


# ── Formulas ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Neq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    type: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    type: str
    body: "Formula"


Formula = Union[Top, Bottom, Atom, Eq, Neq, Not, And, Or, Implies, Iff, Forall, Exists]

TRUE = Top()
FALSE = Bottom()


# ── Statements ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class TypeGuard:
    type: str
    var: Variable


GuardItem = Union[TypeGuard, Neq]


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True


Pos = tuple[int, int]


@dataclass(frozen=True)
class TypeDef:
    type: str
    constants: tuple[Constant, ...]
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FluentDef:
    schema: Atom
    guard: tuple[GuardItem, ...] = ()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ComplexDef:
    schema: Atom
    guard: tuple[GuardItem, ...] = ()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DefinedDef:
    schema: Atom
    body: Formula
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class StaticDef:
    schema: Atom
    guard: tuple[GuardItem, ...] = ()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AxiomStmt:
    formula: Formula
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ActionDef:
    schema: Atom
    guard: tuple[GuardItem, ...] = ()
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class PrecondDef:
    schema: Atom
    body: Formula
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class EffectStmt:
    action: Atom
    condition: Formula
    head: Literal
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CausesStmt:
    condition: Formula
    head: Literal
    pos: Optional[Pos] = field(default=None, compare=False, repr=False)


Statement = Union[TypeDef, FluentDef, ComplexDef, DefinedDef, StaticDef, AxiomStmt,
                  ActionDef, PrecondDef, EffectStmt, CausesStmt]

GUARDED = (FluentDef, ComplexDef, StaticDef, ActionDef)


@dataclass(frozen=True)
class SourceDescription:
    statements: tuple[Statement, ...]

    def of_kind(self, kind) -> list:
        return [s for s in self.statements if isinstance(s, kind)]

    def types(self) -> dict[str, tuple[str, ...]]:
        """Type name -> ordered constant names (first definition wins)."""
        out: dict[str, tuple[str, ...]] = {}
        for s in self.of_kind(TypeDef):
            out.setdefault(s.type, tuple(c.name for c in s.constants))
        return out

    def with_types(self, types: dict[str, Iterable[str]]) -> "SourceDescription":
        """Copy of this description with the listed type domains replaced."""
        stmts = []
        for s in self.statements:
            if isinstance(s, TypeDef) and s.type in types:
                s = TypeDef(s.type, tuple(Constant(str(c)) for c in types[s.type]), s.pos)
            stmts.append(s)
        return SourceDescription(tuple(stmts))


# ── Tokenizer ───────────────────────────────────────────────────────────────

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<punct>[()\[\],.])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str       # ident | int | punct | eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, i, n = 1, 0, 0, len(text)
    while i < n:
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise DescriptionError([Diagnostic(
                f"unexpected character {text[i]!r}", line, i - line_start + 1)])
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, i - line_start + 1))
        for k, ch in enumerate(m.group()):
            if ch == "\n":
                line += 1
                line_start = i + k + 1
        i = m.end()
    tokens.append(Token("eof", "", line, n - line_start + 1))
    return tokens


# ── Generic term reader ─────────────────────────────────────────────────────

@dataclass
class _T:
    """Generic term: name(args...), a bare name/number, or a [list]."""
    name: str
    args: Optional[list["_T"]]      # None for a bare name
    line: int
    column: int
    is_list: bool = False
    is_int: bool = False

    def err(self, msg: str) -> DescriptionError:
        return DescriptionError([Diagnostic(msg, self.line, self.column)])

    @property
    def arity(self) -> int:
        return len(self.args) if self.args is not None else 0


class _Reader:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind == "eof":
            where = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise DescriptionError([Diagnostic(
                f"expected {text!r}, found {where}", tok.line, tok.column)])
        return tok

    def term(self) -> _T:
        tok = self.next()
        if tok.kind == "eof":
            raise DescriptionError([Diagnostic(
                "unexpected end of input", tok.line, tok.column)])
        if tok.text == "[":
            items: list[_T] = []
            if self.peek().text != "]":
                items.append(self.term())
                while self.peek().text == ",":
                    self.next()
                    items.append(self.term())
            self.expect("]")
            return _T("[]", items, tok.line, tok.column, is_list=True)
        if tok.kind == "int":
            return _T(tok.text, None, tok.line, tok.column, is_int=True)
        if tok.kind != "ident":
            raise DescriptionError([Diagnostic(
                f"unexpected {tok.text!r}", tok.line, tok.column)])
        node = _T(tok.text, None, tok.line, tok.column)
        if self.peek().text == "(":
            self.next()
            node.args = [self.term()]
            while self.peek().text == ",":
                self.next()
                node.args.append(self.term())
            self.expect(")")
        return node


# ── Interpretation of generic terms ─────────────────────────────────────────

_CONNECTIVES = {"true", "false", "eq", "neq", "not", "and", "or", "implies",
                "iff", "forall", "exists"}


def _name(t: _T, what: str = "name") -> str:
    if t.args is not None or t.is_list or t.is_int or is_variable_name(t.name):
        raise t.err(f"expected a {what}, found {_show(t)}")
    return t.name


def _show(t: _T) -> str:
    if t.is_list:
        return "a list"
    return repr(t.name + ("(...)" if t.args is not None else ""))


def _term(t: _T) -> Term:
    if t.args is not None or t.is_list:
        raise t.err(f"expected a variable or constant, found {_show(t)}")
    return make_term(t.name)


def _var(t: _T) -> Variable:
    if t.args is not None or t.is_list or t.is_int or not is_variable_name(t.name):
        raise t.err(f"expected a variable, found {_show(t)}")
    return Variable(t.name)


def _atom(t: _T) -> Atom:
    if t.is_list or t.is_int or is_variable_name(t.name):
        raise t.err(f"expected an atom, found {_show(t)}")
    if t.name in _CONNECTIVES:
        raise t.err(f"expected an atom, found connective {t.name!r}")
    return Atom(t.name, tuple(_term(a) for a in (t.args or ())))


def _schema(t: _T) -> Atom:
    atom = _atom(t)
    seen = set()
    for a, raw in zip(atom.args, t.args or ()):
        if not isinstance(a, Variable):
            raise raw.err("schema arguments must be variables")
        if a.name in seen:
            raise raw.err(f"variable {a.name} repeated in schema")
        seen.add(a.name)
    return atom


def _literal(t: _T) -> Literal:
    if t.name == "not" and t.args is not None and not is_variable_name(t.name):
        if len(t.args) != 1:
            raise t.err("not/1 expects one argument")
        return Literal(_atom(t.args[0]), False)
    return Literal(_atom(t), True)


def _guard(t: _T) -> tuple[GuardItem, ...]:
    if t.name == "true" and t.args is None:
        return ()
    if not t.is_list:
        raise t.err("expected a guard list such as [block(X), neq(X,Y)]")
    items: list[GuardItem] = []
    for g in t.args or ():
        if g.name == "neq" and g.arity == 2:
            items.append(Neq(_term(g.args[0]), _term(g.args[1])))
        elif g.arity == 1 and not g.is_list and not is_variable_name(g.name):
            items.append(TypeGuard(g.name, _var(g.args[0])))
        else:
            raise g.err("guard items are type(Var) or neq(T1,T2)")
    return tuple(items)


def _formula(t: _T, bound: tuple[str, ...] = ()) -> Formula:
    if t.is_list or t.is_int:
        raise t.err(f"expected a formula, found {_show(t)}")
    if is_variable_name(t.name):
        raise t.err(f"expected a formula, found variable {t.name}")
    name, args, n = t.name, t.args, t.arity
    if name in ("true", "false") and args is None:
        return TRUE if name == "true" else FALSE
    if name in ("eq", "neq") and n == 2:
        cls = Eq if name == "eq" else Neq
        return cls(_term(args[0]), _term(args[1]))
    if name == "not" and n == 1:
        return Not(_formula(args[0], bound))
    if name in ("and", "or") and n >= 1:
        parts = tuple(_formula(a, bound) for a in args)
        if len(parts) == 1:
            return parts[0]
        return And(parts) if name == "and" else Or(parts)
    if name in ("implies", "iff") and n == 2:
        cls = Implies if name == "implies" else Iff
        return cls(_formula(args[0], bound), _formula(args[1], bound))
    if name in ("forall", "exists") and n == 3:
        var = _var(args[0]).name
        if var in bound:
            raise args[0].err(f"quantifier rebinds variable {var}")
        typ = _name(args[1], "type name")
        body = _formula(args[2], bound + (var,))
        return Forall(var, typ, body) if name == "forall" else Exists(var, typ, body)
    if name in _CONNECTIVES:
        raise t.err(f"wrong number of arguments for {name!r}")
    return _atom(t)


def _arity_error(t: _T, usage: str) -> DescriptionError:
    return t.err(f"malformed {t.name} statement; expected {usage}")


def _statement(t: _T) -> Statement:
    if t.is_list or t.is_int or is_variable_name(t.name):
        raise t.err(f"expected a statement, found {_show(t)}")
    if t.args is None:
        raise t.err(f"unknown statement keyword {t.name!r}")
    pos = (t.line, t.column)
    name, args, n = t.name, t.args, t.arity
    if name == "domain":
        if n != 2 or not args[1].is_list:
            raise _arity_error(t, "domain(type, [c1, ..., cn])")
        consts = []
        for c in args[1].args:
            if c.args is not None or c.is_list or is_variable_name(c.name):
                raise c.err("domain members must be constants")
            consts.append(Constant(c.name))
        return TypeDef(_name(args[0], "type name"), tuple(consts), pos)
    if name in ("fluent", "complex", "static", "action"):
        if n not in (1, 2):
            raise _arity_error(t, f"{name}(schema [, guard])")
        guard = _guard(args[1]) if n == 2 else ()
        cls = {"fluent": FluentDef, "complex": ComplexDef,
               "static": StaticDef, "action": ActionDef}[name]
        return cls(_schema(args[0]), guard, pos)
    if name in ("defined", "precond"):
        if n != 2:
            raise _arity_error(t, f"{name}(schema, formula)")
        cls = DefinedDef if name == "defined" else PrecondDef
        return cls(_schema(args[0]), _formula(args[1]), pos)
    if name == "axiom":
        if n != 1:
            raise _arity_error(t, "axiom(formula)")
        return AxiomStmt(_formula(args[0]), pos)
    if name == "effect":
        if n != 3:
            raise _arity_error(t, "effect(action, formula, literal)")
        return EffectStmt(_schema(args[0]), _formula(args[1]), _literal(args[2]), pos)
    if name == "causes":
        if n != 2:
            raise _arity_error(t, "causes(formula, literal)")
        return CausesStmt(_formula(args[0]), _literal(args[1]), pos)
    raise t.err(f"unknown statement keyword {name!r}")


def parse_description(text: Union[str, bytes]) -> SourceDescription:
    """Read a description; raises DescriptionError carrying diagnostics."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DescriptionError([Diagnostic(f"input is not UTF-8: {exc.reason}", 1, 1)])
    reader = _Reader(tokenize(text))
    statements: list[Statement] = []
    while reader.peek().kind != "eof":
        statements.append(_statement(reader.term()))
        reader.expect(".")
    desc = SourceDescription(tuple(statements))
    dups = [d for d in _duplicate_diagnostics(desc)]
    if dups:
        raise DescriptionError(dups)
    return desc


def parse_formula(text: str) -> Formula:
    reader = _Reader(tokenize(text))
    f = _formula(reader.term())
    tok = reader.peek()
    if tok.kind != "eof":
        raise DescriptionError([Diagnostic(f"trailing input {tok.text!r}", tok.line, tok.column)])
    return f


# ── Printing ────────────────────────────────────────────────────────────────

def render_term(t: Term) -> str:
    return t.name


def render_atom(a: Atom) -> str:
    if not a.args:
        return a.predicate
    return f"{a.predicate}({','.join(render_term(x) for x in a.args)})"


def render_formula(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return render_atom(f)
    if isinstance(f, (Eq, Neq)):
        op = "eq" if isinstance(f, Eq) else "neq"
        return f"{op}({render_term(f.left)},{render_term(f.right)})"
    if isinstance(f, Not):
        return f"not({render_formula(f.arg)})"
    if isinstance(f, (And, Or)):
        op = "and" if isinstance(f, And) else "or"
        return f"{op}({', '.join(render_formula(a) for a in f.args)})"
    if isinstance(f, (Implies, Iff)):
        op = "implies" if isinstance(f, Implies) else "iff"
        return f"{op}({render_formula(f.left)}, {render_formula(f.right)})"
    if isinstance(f, (Forall, Exists)):
        op = "forall" if isinstance(f, Forall) else "exists"
        return f"{op}({f.var}, {f.type}, {render_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def _render_guard(guard: tuple[GuardItem, ...]) -> str:
    items = []
    for g in guard:
        if isinstance(g, TypeGuard):
            items.append(f"{g.type}({g.var.name})")
        else:
            items.append(f"neq({render_term(g.left)},{render_term(g.right)})")
    return "[" + ", ".join(items) + "]"


def _render_literal(lit: Literal) -> str:
    a = render_atom(lit.atom)
    return a if lit.positive else f"not({a})"


def render_statement(s: Statement) -> str:
    if isinstance(s, TypeDef):
        return f"domain({s.type}, [{', '.join(c.name for c in s.constants)}])."
    if isinstance(s, GUARDED):
        kw = {FluentDef: "fluent", ComplexDef: "complex",
              StaticDef: "static", ActionDef: "action"}[type(s)]
        if not s.guard:
            return f"{kw}({render_atom(s.schema)})."
        return f"{kw}({render_atom(s.schema)}, {_render_guard(s.guard)})."
    if isinstance(s, DefinedDef):
        return f"defined({render_atom(s.schema)}, {render_formula(s.body)})."
    if isinstance(s, PrecondDef):
        return f"precond({render_atom(s.schema)}, {render_formula(s.body)})."
    if isinstance(s, AxiomStmt):
        return f"axiom({render_formula(s.formula)})."
    if isinstance(s, EffectStmt):
        return (f"effect({render_atom(s.action)}, {render_formula(s.condition)}, "
                f"{_render_literal(s.head)}).")
    if isinstance(s, CausesStmt):
        return f"causes({render_formula(s.condition)}, {_render_literal(s.head)})."
    raise TypeError(f"not a statement: {s!r}")


def render_description(desc: SourceDescription) -> str:
    return "".join(render_statement(s) + "\n" for s in desc.statements)


# ── Formula utilities ───────────────────────────────────────────────────────

def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from subformulas(a)
    elif isinstance(f, (Implies, Iff)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Forall, Exists)):
        yield from subformulas(f.body)


def atoms_of(f: Formula) -> list[Atom]:
    return [g for g in subformulas(f) if isinstance(g, Atom)]


def free_variables(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {t.name for t in f.args if isinstance(t, Variable)}
    if isinstance(f, (Eq, Neq)):
        return {t.name for t in (f.left, f.right) if isinstance(t, Variable)}
    if isinstance(f, Not):
        return free_variables(f.arg)
    if isinstance(f, (And, Or)):
        return set().union(*(free_variables(a) for a in f.args))
    if isinstance(f, (Implies, Iff)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_variables(f.body) - {f.var}
    return set()


def all_variables(f: Formula) -> set[str]:
    """Free and bound variable names."""
    out = free_variables(f)
    for g in subformulas(f):
        if isinstance(g, (Forall, Exists)):
            out.add(g.var)
    return out


def has_quantifier(f: Formula) -> bool:
    return any(isinstance(g, (Forall, Exists)) for g in subformulas(f))


def substitute_terms(f: Formula, subst: dict[str, Term]) -> Formula:
    """Replace free variables; bound variables are left alone."""
    def tm(t: Term) -> Term:
        return subst.get(t.name, t) if isinstance(t, Variable) else t

    if isinstance(f, Atom):
        return Atom(f.predicate, tuple(tm(t) for t in f.args))
    if isinstance(f, Eq):
        return Eq(tm(f.left), tm(f.right))
    if isinstance(f, Neq):
        return Neq(tm(f.left), tm(f.right))
    if isinstance(f, Not):
        return Not(substitute_terms(f.arg, subst))
    if isinstance(f, And):
        return And(tuple(substitute_terms(a, subst) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(substitute_terms(a, subst) for a in f.args))
    if isinstance(f, Implies):
        return Implies(substitute_terms(f.left, subst), substitute_terms(f.right, subst))
    if isinstance(f, Iff):
        return Iff(substitute_terms(f.left, subst), substitute_terms(f.right, subst))
    if isinstance(f, (Forall, Exists)):
        inner = {k: v for k, v in subst.items() if k != f.var}
        return type(f)(f.var, f.type, substitute_terms(f.body, inner))
    return f


def _formula_constants(f: Formula) -> Iterator[str]:
    for g in subformulas(f):
        if isinstance(g, Atom):
            terms: tuple = g.args
        elif isinstance(g, (Eq, Neq)):
            terms = (g.left, g.right)
        else:
            continue
        for t in terms:
            if isinstance(t, Constant):
                yield t.name


# ── Validation ──────────────────────────────────────────────────────────────

def _pos(s) -> tuple[Optional[int], Optional[int]]:
    return s.pos if getattr(s, "pos", None) else (None, None)


def _diag(s, msg: str, severity: str = "error") -> Diagnostic:
    line, col = _pos(s)
    return Diagnostic(msg, line, col, severity)


def _duplicate_diagnostics(desc: SourceDescription) -> Iterator[Diagnostic]:
    seen: dict[tuple[str, str], object] = {}
    kinds = {TypeDef: "type", FluentDef: "fluent", ComplexDef: "complex fluent",
             StaticDef: "static", ActionDef: "action", PrecondDef: "precondition",
             DefinedDef: "complex fluent"}
    for s in desc.statements:
        if isinstance(s, TypeDef):
            key = ("type", s.type)
            label = "type"
        elif isinstance(s, (FluentDef, ComplexDef, StaticDef)):
            key = ("predicate", s.schema.predicate)
            label = kinds[type(s)]
        elif isinstance(s, ActionDef):
            key = ("action", s.schema.predicate)
            label = "action"
        elif isinstance(s, PrecondDef):
            key = ("precond", s.schema.predicate)
            label = "precondition"
        elif isinstance(s, DefinedDef):
            key = ("defined", s.schema.predicate)
            label = "complex fluent body"
        else:
            continue
        if key in seen:
            prev = seen[key]
            line, _ = _pos(prev)
            where = f" (first at line {line})" if line else ""
            yield _diag(s, f"duplicate {label} definition for "
                           f"{key[1]!r}{where}")
        else:
            seen[key] = s


def validate_description(desc: SourceDescription) -> list[Diagnostic]:
    """Check uniqueness, pairing, declarations, arities and variable scoping.

    Returns diagnostics in a deterministic order; an empty list means the
    description is well formed.  Constants that occur in formulas but belong
    to no type domain are reported as warnings ("non-object constant").
    """
    out: list[Diagnostic] = list(_duplicate_diagnostics(desc))

    types = desc.types()
    objects = {c for cs in types.values() for c in cs}
    preds: dict[str, tuple[str, int]] = {}      # name -> (kind, arity)
    for s in desc.statements:
        if isinstance(s, (FluentDef, ComplexDef, StaticDef)):
            kind = {FluentDef: "fluent", ComplexDef: "complex", StaticDef: "static"}[type(s)]
            preds.setdefault(s.schema.predicate, (kind, len(s.schema.args)))
    actions = {s.schema.predicate: len(s.schema.args) for s in desc.of_kind(ActionDef)}
    defined = {s.schema.predicate for s in desc.of_kind(DefinedDef)}
    preconds = {s.schema.predicate for s in desc.of_kind(PrecondDef)}

    for name, (kind, _) in preds.items():
        if name in types:
            out.append(Diagnostic(f"{name!r} is declared both as a type and a predicate"))
    for s in desc.of_kind(ComplexDef):
        if s.schema.predicate not in defined:
            out.append(_diag(s, f"complex fluent {s.schema.predicate!r} has no defined/2 statement"))
    for s in desc.of_kind(ActionDef):
        if s.schema.predicate not in preconds:
            out.append(_diag(s, f"action {s.schema.predicate!r} has no precond/2 statement"))

    def check_schema_decl(s, schema: Atom, table: dict, what: str) -> None:
        entry = table.get(schema.predicate)
        if entry is None:
            out.append(_diag(s, f"{what} for undeclared {schema.predicate!r}"))
            return
        arity = entry[1] if isinstance(entry, tuple) else entry
        if arity != len(schema.args):
            out.append(_diag(s, f"{what} for {schema.predicate!r} has arity "
                                f"{len(schema.args)}, declared {arity}"))

    def check_formula(s, f: Formula, scope: set[str], *, no_fluents: bool = False,
                      no_complex: bool = False) -> None:
        for g in subformulas(f):
            if isinstance(g, (Forall, Exists)):
                if g.type not in types:
                    out.append(_diag(s, f"quantifier over undeclared type {g.type!r}"))
                if g.var in scope:
                    out.append(_diag(s, f"quantified variable {g.var} clashes with a schema variable"))
            elif isinstance(g, Atom):
                if g.predicate in types:
                    if len(g.args) != 1:
                        out.append(_diag(s, f"type {g.predicate!r} used with arity {len(g.args)}"))
                    continue
                entry = preds.get(g.predicate)
                if entry is None:
                    out.append(_diag(s, f"undeclared predicate {g.predicate!r}"))
                    continue
                kind, arity = entry
                if arity != len(g.args):
                    out.append(_diag(s, f"{g.predicate!r} used with arity {len(g.args)}, "
                                        f"declared {arity}"))
                if no_fluents and kind != "static":
                    out.append(_diag(s, f"domain axiom mentions fluent {g.predicate!r}"))
                if no_complex and kind == "complex":
                    out.append(_diag(s, f"definition mentions complex fluent {g.predicate!r}"))
        for c in sorted(set(_formula_constants(f)) - objects):
            out.append(_diag(s, f"non-object constant {c!r}", "warning"))

    def check_guard(s, schema: Atom, guard) -> None:
        names = {v.name for v in schema.args}
        typed = set()
        for g in guard:
            if isinstance(g, TypeGuard):
                if g.type not in types:
                    out.append(_diag(s, f"guard uses undeclared type {g.type!r}"))
                if g.var.name not in names:
                    out.append(_diag(s, f"guard variable {g.var.name} not in schema"))
                typed.add(g.var.name)
            else:
                for t in (g.left, g.right):
                    if isinstance(t, Variable) and t.name not in names:
                        out.append(_diag(s, f"guard variable {t.name} not in schema"))
        for v in schema.args:
            if v.name not in typed:
                out.append(_diag(s, f"schema variable {v.name} of "
                                    f"{schema.predicate!r} has no type guard"))

    for s in desc.statements:
        if isinstance(s, GUARDED):
            check_guard(s, s.schema, s.guard)
        elif isinstance(s, DefinedDef):
            entry = preds.get(s.schema.predicate)
            if entry is None or entry[0] != "complex":
                out.append(_diag(s, f"defined/2 for {s.schema.predicate!r}, "
                                    f"which is not declared complex"))
            else:
                check_schema_decl(s, s.schema, preds, "definition")
            scope = {v.name for v in s.schema.args}
            check_formula(s, s.body, scope, no_complex=True)
            extra = free_variables(s.body) - scope
            if extra:
                out.append(_diag(s, f"free variables {sorted(extra)} in definition body"))
        elif isinstance(s, PrecondDef):
            check_schema_decl(s, s.schema, actions, "precondition")
            scope = {v.name for v in s.schema.args}
            check_formula(s, s.body, scope)
            extra = free_variables(s.body) - scope
            if extra:
                out.append(_diag(s, f"free variables {sorted(extra)} in precondition"))
        elif isinstance(s, AxiomStmt):
            check_formula(s, s.formula, set(), no_fluents=True)
        elif isinstance(s, (EffectStmt, CausesStmt)):
            if isinstance(s, EffectStmt):
                if s.action.predicate not in actions:
                    out.append(_diag(s, f"effect for undeclared action {s.action.predicate!r}"))
                elif actions[s.action.predicate] != len(s.action.args):
                    out.append(_diag(s, f"effect for {s.action.predicate!r} has wrong arity"))
            head = s.head.atom
            entry = preds.get(head.predicate)
            if entry is None:
                out.append(_diag(s, f"undeclared fluent {head.predicate!r} in head"))
            elif entry[0] != "fluent":
                out.append(_diag(s, f"head {head.predicate!r} is not a primitive fluent"))
            elif entry[1] != len(head.args):
                out.append(_diag(s, f"head {head.predicate!r} used with arity "
                                    f"{len(head.args)}, declared {entry[1]}"))
            for c in sorted({t.name for t in head.args if isinstance(t, Constant)} - objects):
                out.append(_diag(s, f"non-object constant {c!r}", "warning"))
            scope = {t.name for t in head.args if isinstance(t, Variable)}
            if isinstance(s, EffectStmt):
                scope |= {v.name for v in s.action.args}
            check_formula(s, s.condition, scope)
    return out


def errors_only(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


def variable_positions(desc: SourceDescription) -> dict[str, list[str]]:
    """Predicate/action name -> per-position type name (from the guards)."""
    out: dict[str, list[str]] = {}
    for s in desc.statements:
        if isinstance(s, GUARDED):
            by_var = defaultdict(list)
            for g in s.guard:
                if isinstance(g, TypeGuard):
                    by_var[g.var.name].append(g.type)
            out.setdefault(s.schema.predicate,
                           [by_var[v.name][0] if by_var[v.name] else "" for v in s.schema.args])
    return out

