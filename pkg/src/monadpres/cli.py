"""Command-line interface: ``monadpres <command> ...``.

Exit codes: 0 success, Equal or true; 1 negative verdict; 2 unknown or
inconclusive; 3 usage error; 4 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from typing import Sequence

from .catalog import catalog_get, catalog_names
from .colimit import (
    Arrow,
    MonadDiagram,
    canonical_presentation,
    coequalizer,
    coproduct_with_injections,
    pushout,
    verify_algebraic,
)
from .dsl import ParseError, parse_alg, parse_functor, parse_pres, parse_term, print_alg, print_pres
from .equality import Distinct, Equal, EqualityBudget, Unknown, completion, equal_mod_E
from .errors import BudgetExceeded, ContractViolation, NotFound
from .presentation import Presentation, enumerate_models, find_violation
from .quiver import CategoryPresentation, check_functor, free_hom, quotient_hom
from .rewriting import Rewriter
from .terms import OpSymbol, Signature, SignatureMorphism, enumerate_terms, extend_morphism

__all__ = ["run_command", "main", "SCHEMA"]

SCHEMA = "monadpres.report/1"

OK, NEGATIVE, UNKNOWN, USAGE, INPUT = 0, 1, 2, 3, 4


class _Usage(Exception):
    pass


class _Exit(Exception):
    def __init__(self, status: int):
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: {message}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise _Exit(status)


class _InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_pres(path: str) -> Presentation:
    P = _parse_file(path).presentation
    if isinstance(P, CategoryPresentation):
        raise _InputError(f"{path}: expected a signature presentation, found a category")
    return P


def _load_cat(path: str) -> CategoryPresentation:
    P = _parse_file(path).presentation
    if not isinstance(P, CategoryPresentation):
        raise _InputError(f"{path}: expected a category presentation")
    return P


def _parse_file(path: str):
    try:
        return parse_pres(_read(path))
    except ParseError as exc:
        raise _InputError(f"{path}:{exc}") from None


def _term(text: str, sig: Signature, ctx: int | None, what: str):
    try:
        return parse_term(text, sig, ctx)
    except ParseError as exc:
        raise _InputError(f"{what} {text!r}: {exc}") from None


def _budget(args) -> EqualityBudget:
    try:
        budget = EqualityBudget.from_env()
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    for key in ("kb_rounds", "inst_depth", "model_size"):
        value = getattr(args, key, None)
        if value is not None:
            budget = replace(budget, **{key: value})
    return budget


def _assignments(items: Sequence[str], source: Signature, target: Signature, what: str) -> SignatureMorphism:
    assign = {}
    for item in items:
        name, sep, text = item.partition("=")
        if not sep:
            raise _Usage(f"{what}: expected SYMBOL=TERM, got {item!r}")
        try:
            op = source.lookup(name.strip())
        except (KeyError, ValueError):
            raise _InputError(f"{what}: unknown symbol {name.strip()!r}") from None
        assign[op] = _term(text.strip(), target, op.arity, what)
    missing = [op.name for op in source if op not in assign]
    if missing:
        raise _Usage(f"{what}: no term given for {', '.join(missing)}")
    return SignatureMorphism(source, target, assign)


def _pairs(pairs, P: Presentation):
    """Parameter signature and the two morphisms from repeated ``--pair N T U``."""
    ops, left, right = [], {}, {}
    for k, (n, t, u) in enumerate(pairs or []):
        try:
            arity = int(n)
        except ValueError:
            raise _Usage(f"--pair: arity must be an integer, got {n!r}") from None
        op = OpSymbol(f"c{k}", arity)
        ops.append(op)
        left[op] = _term(t, P.signature, arity, "--pair")
        right[op] = _term(u, P.signature, arity, "--pair")
    gamma = Signature(ops)
    return gamma, SignatureMorphism(gamma, P.signature, left), SignatureMorphism(gamma, P.signature, right)


# commands: each returns (exit code, text, payload)


def cmd_check(args):
    P = _load_pres(args.pres)
    try:
        A = parse_alg(_read(args.alg), P.signature).algebra
    except ParseError as exc:
        raise _InputError(f"{args.alg}:{exc}") from None
    bad = find_violation(A, P)
    if bad is None:
        return OK, "satisfied", {"satisfied": True}
    eq, x = bad
    return NEGATIVE, f"violated: {eq} at x = {list(x)}", {
        "satisfied": False, "equation": str(eq), "assignment": list(x)
    }


def cmd_models(args):
    P = _load_pres(args.pres)
    counts = {}
    blocks = []
    for m in range(args.min_size, args.max_size + 1):
        found = list(enumerate_models(P, args.max_size, sizes=[m], method=args.method))
        counts[m] = len(found)
        if not args.count_only:
            blocks += [print_alg(A, f"M{m}_{i}") for i, A in enumerate(found)]
    summary = ", ".join(f"size {m}: {c}" for m, c in counts.items())
    text = summary if args.count_only else "\n".join(blocks + [summary])
    return OK, text, {"counts": {str(m): c for m, c in counts.items()}}


def cmd_free(args):
    P = _load_pres(args.pres)
    try:
        terms = list(enumerate_terms(P.signature, args.vars, args.depth, cap=args.cap))
    except BudgetExceeded as exc:
        return UNKNOWN, str(exc), {"error": str(exc)}
    if args.count:
        return OK, str(len(terms)), {"count": len(terms)}
    return OK, "\n".join(map(repr, terms)), {"count": len(terms), "terms": [repr(t) for t in terms]}


def cmd_nf(args):
    P = _load_pres(args.pres)
    t = _term(args.term, P.signature, args.ctx, "term")
    c = completion(P, _budget(args).kb_rounds)
    if not c.ok:
        return UNKNOWN, f"unknown: completion gave up ({c.reason})", {"reason": c.reason}
    nf = Rewriter(c.rules).normalize(t)
    return OK, repr(nf), {"normal_form": repr(nf), "rules": [str(r) for r in c.rules]}


def cmd_eq(args):
    P = _load_pres(args.pres)
    t = _term(args.lhs, P.signature, args.ctx, "lhs")
    u = _term(args.rhs, P.signature, args.ctx, "rhs")
    v = equal_mod_E(P, t, u, args.ctx, _budget(args))
    payload = {"verdict": v.status}
    if isinstance(v, Equal):
        payload["engine"] = v.engine
        lines = [f"equal (by {v.engine})"]
        cert = v.certificate
        if v.engine == "axiom":
            lines.append(f"instance of equation {cert['label'] or cert['equation']}")
            payload["equation"] = cert["equation"]
        elif v.engine == "completion":
            nf = repr(cert["normal_forms"][0])
            lines.append(f"common normal form: {nf}")
            payload["normal_form"] = nf
        elif v.engine == "closure":
            lines.append(f"congruence closure over {len(cert['instances'])} ground instances")
            payload["instances"] = [[k, repr(a), repr(b)] for k, a, b in cert["instances"]]
        return OK, "\n".join(lines), payload
    if isinstance(v, Distinct):
        payload["engine"] = v.engine
        lines = [f"distinct (by {v.engine})"]
        if "normal_forms" in v.certificate:
            a, b = v.certificate["normal_forms"]
            lines.append(f"normal forms: {a!r} and {b!r}")
            payload["normal_forms"] = [repr(a), repr(b)]
        if v.witness is not None:
            lines.append(f"separating model of size {v.witness.size} at x = {list(v.assignment)}:")
            lines.append(print_alg(v.witness, "W").rstrip("\n"))
            payload["witness"] = print_alg(v.witness, "W")
            payload["assignment"] = list(v.assignment)
        return NEGATIVE, "\n".join(lines), payload
    assert isinstance(v, Unknown)
    payload["report"] = {k: v.report[k] for k in sorted(v.report)}
    detail = "; ".join(f"{k}: {v.report[k]}" for k in sorted(v.report))
    return UNKNOWN, f"unknown ({detail})" if detail else "unknown (budget is zero)", payload


def _emit(P: Presentation, name: str | None):
    if name:
        P = replace(P, name=name)
    text = print_pres(P).rstrip("\n")
    return OK, text, {"presentation": print_pres(P)}


def cmd_coprod(args):
    return _emit(coproduct_with_injections(_load_pres(args.left), _load_pres(args.right)).presentation, args.name)


def cmd_coeq(args):
    P = _load_pres(args.pres)
    gamma, t, u = _pairs(args.pair, P)
    return _emit(coequalizer(gamma, t, u, P), args.name)


def _span(args):
    apex, P1, P2 = _load_pres(args.apex), _load_pres(args.p1), _load_pres(args.p2)
    f = _assignments(args.left or [], apex.signature, P1.signature, "--left")
    g = _assignments(args.right or [], apex.signature, P2.signature, "--right")
    return apex, P1, P2, f, g


def cmd_pushout(args):
    apex, P1, P2, f, g = _span(args)
    return _emit(pushout(apex, P1, P2, f, g, _budget(args)), args.name)


def cmd_canon(args):
    return _emit(canonical_presentation(_load_pres(args.pres), args.depth), args.name)


def cmd_verify_colim(args):
    budget = _budget(args)
    if args.kind == "coprod":
        if len(args.files) != 2:
            raise _Usage("verify-colim coprod takes two presentation files")
        P1, P2 = map(_load_pres, args.files)
        cp = coproduct_with_injections(P1, P2)
        D = MonadDiagram((P1, P2), (), budget)
        C, cocone = cp.presentation, [cp.left, cp.right]
    elif args.kind == "coeq":
        if len(args.files) != 1:
            raise _Usage("verify-colim coeq takes one presentation file and --pair options")
        P = _load_pres(args.files[0])
        gamma, t, u = _pairs(args.pair, P)
        C = coequalizer(gamma, t, u, P)
        G = Presentation(gamma, (), "Gamma")
        D = MonadDiagram((G, P), (Arrow(0, 1, t), Arrow(0, 1, u)), budget)
        cocone = [
            SignatureMorphism(gamma, C.signature, dict(t.assign)),
            SignatureMorphism(P.signature, C.signature, dict(SignatureMorphism.identity(P.signature).assign)),
        ]
    else:
        if len(args.files) != 3:
            raise _Usage("verify-colim pushout takes apex, left and right presentation files")
        args.apex, args.p1, args.p2 = args.files
        apex, P1, P2, f, g = _span(args)
        cp = coproduct_with_injections(P1, P2)
        C = pushout(apex, P1, P2, f, g, budget)
        D = MonadDiagram((apex, P1, P2), (Arrow(0, 1, f), Arrow(0, 2, g)), budget)
        inj = [SignatureMorphism(m.source, C.signature, dict(m.assign)) for m in (cp.left, cp.right)]
        via = SignatureMorphism(
            apex.signature, C.signature, {op: extend_morphism(inj[0], f(op)) for op in apex.signature}
        )
        cocone = [via, *inj]
    report = verify_algebraic(D, C, cocone, args.max_size, budget)
    lines = []
    for s in report.sizes:
        flag = "ok" if s.ok else "MISMATCH"
        lines.append(f"size {s.size}: colimit models {s.colimit_models}, compatible families {s.families} [{flag}]")
        if args.pairing:
            lines += [f"  model {i} -> family {j}" for i, j in s.pairing]
    lines += [f"cocone: {msg}" for msg in report.cocone]
    lines += [f"inconclusive: {msg}" for msg in report.inconclusive]
    lines.append("bijection verified" if report.ok else ("inconclusive" if not report.mismatches else "mismatch"))
    payload = {
        "sizes": [
            {
                "size": s.size,
                "colimit_models": s.colimit_models,
                "families": s.families,
                "injective": s.injective,
                "surjective": s.surjective,
                "pairing": [list(p) for p in s.pairing],
            }
            for s in report.sizes
        ],
        "cocone": report.cocone,
        "inconclusive": report.inconclusive,
        "ok": report.ok,
    }
    code = OK if report.ok else (NEGATIVE if report.mismatches else UNKNOWN)
    return code, "\n".join(lines), payload


def cmd_quiver_hom(args):
    CP = _load_cat(args.pres)
    paths = free_hom(CP.quiver, args.source, args.target, args.max_len)
    return OK, "\n".join(map(str, paths)), {"count": len(paths), "paths": [str(p) for p in paths]}


def cmd_quiver_quotient(args):
    CP = _load_cat(args.pres)
    q = quotient_hom(CP, args.source, args.target, args.max_len)
    lines = [f"{len(q)} classes"]
    lines += [f"[{c[0]}] = {{{', '.join(map(str, c))}}}" for c in q.classes]
    lines += [f"unresolved: {a} ~ {b} (leaves the length bound)" for a, b in q.unresolved]
    payload = {
        "classes": [[str(p) for p in c] for c in q.classes],
        "unresolved": [[str(a), str(b)] for a, b in q.unresolved],
    }
    return OK, "\n".join(lines), payload


def cmd_quiver_functor(args):
    CP = _load_cat(args.pres)
    try:
        F = parse_functor(_read(args.functor), CP.quiver)
    except ParseError as exc:
        raise _InputError(f"{args.functor}:{exc}") from None
    ok = check_functor(CP, F)
    return (OK, "functor", {"functor": True}) if ok else (NEGATIVE, "not a functor", {"functor": False})


def cmd_catalog(args):
    if args.name is None:
        names = catalog_names()
        lines = [f"{n}: {catalog_get(n).doc}" for n in names]
        return OK, "\n".join(lines), {"names": names}
    entry = catalog_get(args.name)
    return OK, print_pres(entry.presentation).rstrip("\n"), {
        "name": entry.name, "doc": entry.doc, "presentation": print_pres(entry.presentation)
    }


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="monadpres", description="Presentations of finitary monads on finite carriers.")
    p.add_argument("--json", action="store_true", help="emit a structured report")
    p.add_argument("--timing", action="store_true", help="include wall-clock time (not deterministic)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def budget_flags(sp):
        sp.add_argument("--kb-rounds", dest="kb_rounds", type=int)
        sp.add_argument("--inst-depth", dest="inst_depth", type=int)
        sp.add_argument("--model-size", dest="model_size", type=int)

    s = sub.add_parser("check", help="does an algebra satisfy a presentation")
    s.add_argument("pres")
    s.add_argument("alg")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("models", help="enumerate models by carrier size")
    s.add_argument("pres")
    s.add_argument("--max-size", type=int, required=True)
    s.add_argument("--min-size", type=int, default=1)
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--method", choices=["search", "brute"], default="search")
    s.set_defaults(fn=cmd_models)

    s = sub.add_parser("nf", help="normal form by completion")
    s.add_argument("pres")
    s.add_argument("term")
    s.add_argument("--ctx", type=int, default=None)
    budget_flags(s)
    s.set_defaults(fn=cmd_nf)

    s = sub.add_parser("eq", help="decide t = u modulo the equations")
    s.add_argument("pres")
    s.add_argument("lhs")
    s.add_argument("rhs")
    s.add_argument("--ctx", type=int, required=True)
    budget_flags(s)
    s.set_defaults(fn=cmd_eq)

    s = sub.add_parser("free", help="terms of the free algebra up to a depth")
    s.add_argument("pres")
    s.add_argument("--vars", type=int, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--count", action="store_true")
    s.add_argument("--cap", type=int, default=1_000_000)
    s.set_defaults(fn=cmd_free)

    s = sub.add_parser("coprod", help="coproduct of two presentations")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--name")
    s.set_defaults(fn=cmd_coprod)

    s = sub.add_parser("coeq", help="impose t(c) = u(c) for each --pair")
    s.add_argument("pres")
    s.add_argument("--pair", nargs=3, action="append", metavar=("ARITY", "T", "U"))
    s.add_argument("--name")
    s.set_defaults(fn=cmd_coeq)

    s = sub.add_parser("pushout", help="pushout of a span of presentations")
    s.add_argument("apex")
    s.add_argument("p1")
    s.add_argument("p2")
    s.add_argument("--left", action="append", metavar="SYM=TERM")
    s.add_argument("--right", action="append", metavar="SYM=TERM")
    s.add_argument("--name")
    budget_flags(s)
    s.set_defaults(fn=cmd_pushout)

    s = sub.add_parser("canon", help="depth-truncated canonical presentation")
    s.add_argument("pres")
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--name")
    s.set_defaults(fn=cmd_canon)

    s = sub.add_parser("verify-colim", help="check models of a colimit against compatible families")
    s.add_argument("kind", choices=["coprod", "coeq", "pushout"])
    s.add_argument("files", nargs="+")
    s.add_argument("--max-size", type=int, required=True)
    s.add_argument("--pair", nargs=3, action="append", metavar=("ARITY", "T", "U"))
    s.add_argument("--left", action="append", metavar="SYM=TERM")
    s.add_argument("--right", action="append", metavar="SYM=TERM")
    s.add_argument("--pairing", action="store_true", help="list the model-to-family pairing")
    budget_flags(s)
    s.set_defaults(fn=cmd_verify_colim)

    for name, fn, what in (
        ("quiver-hom", cmd_quiver_hom, "paths between two objects"),
        ("quiver-quotient", cmd_quiver_quotient, "classes of paths under the relations"),
    ):
        s = sub.add_parser(name, help=what)
        s.add_argument("pres")
        s.add_argument("source")
        s.add_argument("target")
        s.add_argument("--max-len", type=int, required=True)
        s.set_defaults(fn=fn)

    s = sub.add_parser("quiver-functor", help="does a Set-valued assignment respect the relations")
    s.add_argument("pres")
    s.add_argument("functor")
    s.set_defaults(fn=cmd_quiver_functor)

    s = sub.add_parser("catalog", help="list built-in presentations or print one")
    s.add_argument("name", nargs="?")
    s.set_defaults(fn=cmd_catalog)
    return p


def run_command(argv: Sequence[str]) -> tuple[int, str]:
    """Run one command; returns the exit code and the report text."""
    parser = build_parser()
    want_json = "--json" in argv
    start = time.perf_counter()
    try:
        args = parser.parse_args(list(argv))
        code, text, payload = args.fn(args)
    except _Exit as exc:
        return exc.status, ""
    except _Usage as exc:
        code, text, payload = USAGE, f"error: {exc}", {"error": str(exc)}
    except (_InputError, NotFound) as exc:
        code, text, payload = INPUT, f"error: {exc}", {"error": str(exc)}
    except ContractViolation as exc:
        code, text, payload = USAGE, f"error: {exc}", {"error": str(exc)}
    elapsed = time.perf_counter() - start
    timing = "--timing" in argv
    if want_json:
        report = {"schema": SCHEMA, "exit_code": code, "command": next((a for a in argv if not a.startswith("-")), None), **payload}
        if "error" not in payload:
            report["text"] = text
        if timing:
            report["seconds"] = round(elapsed, 6)
        return code, json.dumps(report, sort_keys=True, indent=2)
    if timing:
        text = f"{text}\ntime: {elapsed:.3f}s"
    return code, text


def main(argv: Sequence[str] | None = None) -> int:
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    if text:
        stream = sys.stderr if code > UNKNOWN else sys.stdout
        print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
