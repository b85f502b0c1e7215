"""
cli.py - Command-line front end.

    ccp compile  <file> [--out F] [--format text|json] [--ssa] [--check-init] [--dump-ground]
    ccp validate <file>
    ccp oracle   <file> [--cap N]
    ccp classify <file>

Exit status: 0 on success, 1 on domain errors (diagnostics go to stderr),
2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import proplogic as pl
from . import syntax as sx
from .compiler import CompiledAction, CompileOptions, Indeterminate, compile_domain, ssa_of
from .grounder import GroundTheory, check_coherence, ground_statements
from .lifting import classify, inline_complex
from .oracle import DEFAULT_CAP, verify_domain
from .proplogic import PropAtom


# ── Rendering ───────────────────────────────────────────────────────────────

def _succ(fluent) -> str:
    return f"succ({fluent})"


def _preconditions(ca: CompiledAction) -> str:
    pre = ca.strips.preconditions
    if isinstance(pre, list):
        return ", ".join(str(l) for l in pre)
    return pl.to_text(pre)


def ssa_table(ca: CompiledAction) -> dict[str, str]:
    out = {}
    for f, r in ca.fluents.items():
        rhs = ssa_of(f, r)
        if rhs is not None:
            out[str(f)] = pl.to_text(rhs)
    return out


def render_action_text(ca: CompiledAction, with_ssa: bool = False) -> str:
    lines = [f"action {ca.action}"]
    if not ca.ok:
        lines += [f"error: {d}" for d in ca.diagnostics]
        return "\n".join(lines) + "\n"
    se = ca.strips
    lines.append(f"preconditions: {_preconditions(ca)}".rstrip())
    lines.append(f"add: {', '.join(map(str, se.add))}".rstrip())
    lines.append(f"delete: {', '.join(map(str, se.delete))}".rstrip())
    lines.append("conditional:")
    for f, phi in se.conditional.items():
        lines.append(f"  {_succ(f)} <-> {pl.to_text(phi)}")
    lines.append("indeterminate:")
    for f, (nec, suf) in se.indeterminate.items():
        lines.append(f"  {f} | nec: {pl.to_text(nec)} | suf: {pl.to_text(suf)}")
    if with_ssa:
        lines.append("ssa:")
        for f, r in ca.fluents.items():
            if not isinstance(r, Indeterminate):
                lines.append(f"  {_succ(f)} <-> {pl.to_text(ssa_of(f, r))}")
    return "\n".join(lines) + "\n"


def action_json(ca: CompiledAction) -> dict:
    if not ca.ok:
        return {"action": str(ca.action), "errors": list(ca.diagnostics)}
    se = ca.strips
    pre = [str(l) for l in se.preconditions] if isinstance(se.preconditions, list) \
        else pl.to_text(se.preconditions)
    return {
        "action": str(ca.action),
        "preconditions": pre,
        "add": [str(f) for f in se.add],
        "delete": [str(f) for f in se.delete],
        "conditional": {str(f): pl.to_text(phi) for f, phi in se.conditional.items()},
        "indeterminate": {str(f): {"nec": pl.to_text(n), "suf": pl.to_text(s)}
                          for f, (n, s) in se.indeterminate.items()},
        "ssa": ssa_table(ca),
    }


def render_action_json(ca: CompiledAction) -> str:
    return json.dumps(action_json(ca), indent=2)


def render_domain(compiled: list[CompiledAction], fmt: str = "text", with_ssa: bool = False) -> str:
    if fmt == "json":
        return json.dumps([action_json(ca) for ca in compiled], indent=2) + "\n"
    return "\n".join(render_action_text(ca, with_ssa) for ca in compiled)


def parse_output_formula(text: str, gt: GroundTheory) -> pl.Formula:
    """Read a formula printed by the compiler back over gt's atoms."""
    table = gt.atom_table()

    def make(name: str, args: list):
        if name in ("init", "succ") and len(args) == 1:
            return PropAtom(name, table[args[0]])
        return f"{name}({','.join(args)})" if args else name

    def finish(a):
        if isinstance(a, PropAtom):
            return a
        return pl.static_atom(table[a])

    return pl.rename(pl.parse_text(text, make), finish)


# ── Commands ────────────────────────────────────────────────────────────────

class _Fail(Exception):
    def __init__(self, messages: list[str], code: int = 1):
        super().__init__("\n".join(messages))
        self.messages = messages
        self.code = code


def _read(path: str) -> sx.SourceDescription:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise _Fail([f"cannot read {path}: {e.strerror}"], 2) from None
    return sx.parse_description(data)


def _load(path: str) -> tuple[sx.SourceDescription, GroundTheory]:
    desc = _read(path)
    diags = sx.validate_description(desc)
    errors = sx.errors_only(diags)
    if errors:
        raise sx.DescriptionError(errors)
    return desc, ground_statements(desc)


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise _Fail([f"cannot write {path}: {e.strerror}"]) from None


def cmd_compile(args) -> int:
    _, gt = _load(args.file)
    if args.dump_ground:
        target = (args.out or args.file) + ".ground.json"
        _write(target, json.dumps(gt.to_json(), indent=2) + "\n")
    options = CompileOptions(check_init=args.check_init)
    compiled = compile_domain(gt, options)
    _write(args.out, render_domain(compiled, args.format, args.ssa))
    failed = [d for ca in compiled for d in ca.diagnostics]
    for d in failed:
        print(d, file=sys.stderr)
    return 1 if failed else 0


def cmd_validate(args) -> int:
    desc = _read(args.file)
    diags = sx.validate_description(desc)
    if not sx.errors_only(diags):
        try:
            gt = ground_statements(desc, strict=False)
            diags += check_coherence(gt)
        except sx.DescriptionError as e:
            diags += e.diagnostics
    for d in diags:
        print(d, file=sys.stderr)
    if sx.errors_only(diags):
        return 1
    print(f"ok: {args.file}")
    return 0


def cmd_oracle(args) -> int:
    _, gt = _load(args.file)
    compiled = compile_domain(gt)
    reports = verify_domain(compiled, args.cap)
    mismatches = sum(len(r.mismatches) for r in reports)
    skipped = [r for r in reports if r.skipped]
    for r in reports:
        for w in r.mismatches:
            print(f"{r.action}: {w}")
        if r.skipped:
            print(f"{r.action}: skipped: {r.skipped}")
    print(f"{mismatches} mismatches / {len(reports)} actions")
    if skipped:
        print(f"{len(skipped)} actions not checked")
    return 1 if mismatches or skipped else 0


def cmd_classify(args) -> int:
    desc = _read(args.file)
    errors = sx.errors_only(sx.validate_description(desc))
    if errors:
        raise sx.DescriptionError(errors)
    report = classify(inline_complex(desc))
    print(f"simple-I: {'yes' if report.simple_I else 'no'}")
    print(f"simple-II: {'yes' if report.simple_II else 'no'}")
    for v in report.violations:
        print(f"  {v}")
    return 0


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccp", description="Compile causal action descriptions "
                                "into successor state axioms and STRIPS-like operators.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile every action instance")
    c.add_argument("file")
    c.add_argument("--out", help="write output here instead of stdout")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--ssa", action="store_true", help="also print successor state axioms")
    c.add_argument("--check-init", action="store_true",
                   help="check that every constrained initial state has a successor")
    c.add_argument("--dump-ground", action="store_true",
                   help="write the ground theory to <out or file>.ground.json")
    c.set_defaults(run=cmd_compile)

    v = sub.add_parser("validate", help="check a description without compiling")
    v.add_argument("file")
    v.set_defaults(run=cmd_validate)

    o = sub.add_parser("oracle", help="verify compiled output by enumeration")
    o.add_argument("file")
    o.add_argument("--cap", type=_positive, default=DEFAULT_CAP,
                   help=f"largest vocabulary to enumerate (default {DEFAULT_CAP})")
    o.set_defaults(run=cmd_oracle)

    k = sub.add_parser("classify", help="report simple-I / simple-II membership")
    k.add_argument("file")
    k.set_defaults(run=cmd_classify)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except sx.DescriptionError as e:
        for d in e.diagnostics:
            print(d, file=sys.stderr)
        return 1
    except _Fail as e:
        for m in e.messages:
            print(m, file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
