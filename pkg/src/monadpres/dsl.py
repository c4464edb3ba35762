"""Text formats: presentations (.pres), finite algebras (.alg), Set-valued functors (.fun).

Presentation grammar (one declaration per line, ``#`` starts a comment)::

    file      ::= header? line*
    header    ::= ("signature" | "category") NAME
    line      ::= "op" NAME ":" INT
                | "equations"
                | "eq" [NAME] "(" INT ")" ":" term "=" term
                | "objects" NAME+
                | "edge" NAME ":" NAME "->" NAME
                | "rel" [NAME] ":" path "=" path
    term      ::= VAR | NAME | NAME "(" [term ("," term)*] ")"
    path      ::= step ("." step)*
    step      ::= NAME | "id" "(" NAME ")"
    VAR       ::= "x" DIGITS

Algebra files::

    algebra NAME
    carrier ELEM+
    table NAME[/ARITY] : ELEM*       # m**arity entries, row-major

Functor files::

    functor NAME
    set OBJECT : ELEM*
    map EDGE : ELEM*                 # image of each source element, in order
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import FiniteAlgebra
from .presentation import Equation, Presentation
from .quiver import CategoryPresentation, Edge, Path, Quiver, Relation, SetFunctorData
from .terms import App, OpSymbol, Signature, Term, Var

__all__ = [
    "ParseError",
    "PresFile",
    "AlgFile",
    "parse_pres",
    "print_pres",
    "parse_term",
    "print_term",
    "parse_alg",
    "print_alg",
    "parse_functor",
    "print_functor",
]

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<int>\d+)|(?P<arrow>->)|(?P<punct>[():,=./])|(?P<bad>\S))")
_VAR = re.compile(r"x(\d+)$")


class ParseError(ValueError):
    """A diagnostic tied to a source position (1-based line and column)."""

    def __init__(self, kind: str, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {kind}: {message}")
        self.kind = kind
        self.line = line
        self.col = col


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int) -> list[_Tok]:
    out, pos = [], 0
    text = text.split("#", 1)[0].rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "bad":
            raise ParseError("syntax", f"unexpected character {m.group(kind)!r}", line, start + 1)
        out.append(_Tok(kind, m.group(kind), start + 1))
        pos = m.end()
    return out


class _Cursor:
    def __init__(self, toks: list[_Tok], line: int, end_col: int):
        self.toks, self.i, self.line, self.end_col = toks, 0, line, end_col

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def col(self) -> int:
        t = self.peek()
        return t.col if t else self.end_col

    def error(self, msg: str, kind: str = "syntax", tok: _Tok | None = None):
        col = tok.col if tok else self.col()
        return ParseError(kind, msg, self.line, col)

    def next(self, kind: str | None = None, text: str | None = None) -> _Tok:
        t = self.peek()
        if t is None or (kind and t.kind != kind) or (text and t.text != text):
            want = repr(text) if text else (kind or "token")
            got = repr(t.text) if t else "end of line"
            raise self.error(f"expected {want}, found {got}")
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t is not None and t.text == text:
            self.i += 1
            return True
        return False

    def done(self) -> None:
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek().text!r}")


@dataclass
class PresFile:
    """A parsed presentation with the source line of each equation or relation."""

    presentation: Presentation | CategoryPresentation
    spans: dict[str, tuple[int, int]] = field(default_factory=dict)

    @property
    def is_category(self) -> bool:
        return isinstance(self.presentation, CategoryPresentation)


def _parse_term(cur: _Cursor, sig: Signature, ctx: int | None) -> Term:
    tok = cur.next("name")
    m = _VAR.match(tok.text)
    if m:
        i = int(m.group(1))
        if ctx is not None and i >= ctx:
            raise cur.error(f"variable {tok.text} outside context of size {ctx}", "variable-out-of-context", tok)
        return Var(i)
    args: list[Term] = []
    if cur.accept("("):
        if not cur.accept(")"):
            args.append(_parse_term(cur, sig, ctx))
            while cur.accept(","):
                args.append(_parse_term(cur, sig, ctx))
            cur.next(text=")")
    arities = [op.arity for op in sig if op.name == tok.text]
    if not arities:
        raise cur.error(f"unknown symbol {tok.text!r}", "unknown-symbol", tok)
    if len(args) not in arities:
        want = "/".join(map(str, arities))
        raise cur.error(f"{tok.text} takes {want} arguments, given {len(args)}", "arity-mismatch", tok)
    return App(OpSymbol(tok.text, len(args)), args)


def parse_term(text: str, sig: Signature, ctx: int | None = None) -> Term:
    toks = _tokenize(text, 1)
    cur = _Cursor(toks, 1, len(text) + 1)
    t = _parse_term(cur, sig, ctx)
    cur.done()
    return t


def print_term(t: Term) -> str:
    return repr(t)


def _parse_path(cur: _Cursor, quiver: Quiver) -> Path:
    steps: list[Path] = []
    while True:
        tok = cur.next("name")
        if tok.text == "id" and cur.accept("("):
            obj = cur.next("name")
            if obj.text not in quiver.objects:
                raise cur.error(f"unknown object {obj.text!r}", "unknown-symbol", obj)
            cur.next(text=")")
            steps.append(Path(obj.text, obj.text))
        else:
            try:
                e = quiver.edge(tok.text)
            except ValueError:
                raise cur.error(f"unknown edge {tok.text!r}", "unknown-symbol", tok) from None
            step = Path(e.source, e.target, (e.name,))
            if steps and steps[-1].target != step.source:
                raise cur.error(f"edge {tok.text} does not compose with the path before it", "arity-mismatch", tok)
            steps.append(step)
        if not cur.accept("."):
            break
    p = steps[0]
    for s in steps[1:]:
        p = p.then(s)
    return p


def parse_pres(text: str) -> PresFile:
    name = "P"
    kind = None
    ops: list[OpSymbol] = []
    equations: list[Equation] = []
    objects: list[str] = []
    edges: list[Edge] = []
    relations: list[Relation] = []
    spans: dict[str, tuple[int, int]] = {}
    sig: Signature | None = None
    quiver: Quiver | None = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokenize(raw, lineno)
        if not toks:
            continue
        cur = _Cursor(toks, lineno, len(raw.rstrip()) + 1)
        head = cur.next("name")
        word = head.text
        if word in ("signature", "category"):
            name = cur.next("name").text
            kind = word
        elif word == "op":
            if sig is not None:
                raise cur.error("op declared after equations began", tok=head)
            tok = cur.next("name")
            if _VAR.match(tok.text):
                raise cur.error(f"{tok.text!r} is reserved for variables", tok=tok)
            cur.next(text=":")
            arity = int(cur.next("int").text)
            op = OpSymbol(tok.text, arity)
            if op in ops:
                raise cur.error(f"duplicate symbol {op}", "duplicate", tok)
            ops.append(op)
        elif word == "equations":
            sig = sig or Signature(ops)
        elif word == "eq":
            sig = sig or Signature(ops)
            label = None
            if cur.peek() is not None and cur.peek().kind == "name":
                label = cur.next("name").text
            cur.next(text="(")
            n = int(cur.next("int").text)
            cur.next(text=")")
            cur.next(text=":")
            lhs = _parse_term(cur, sig, n)
            cur.next(text="=")
            rhs = _parse_term(cur, sig, n)
            equations.append(Equation(n, lhs, rhs, label))
            spans[label or f"#{len(equations)}"] = (lineno, head.col)
        elif word == "objects":
            while cur.peek() is not None:
                objects.append(cur.next("name").text)
        elif word == "edge":
            if quiver is not None:
                raise cur.error("edge declared after relations began", tok=head)
            tok = cur.next("name")
            cur.next(text=":")
            src = cur.next("name")
            cur.next("arrow")
            dst = cur.next("name")
            for o in (src, dst):
                if o.text not in objects:
                    raise cur.error(f"unknown object {o.text!r}", "unknown-symbol", o)
            if any(e.name == tok.text for e in edges):
                raise cur.error(f"duplicate edge {tok.text!r}", "duplicate", tok)
            edges.append(Edge(tok.text, src.text, dst.text))
        elif word == "rel":
            quiver = quiver or Quiver(tuple(objects), tuple(edges))
            label = None
            if cur.peek() is not None and cur.peek().kind == "name":
                label = cur.next("name").text
            cur.next(text=":")
            lhs_tok = cur.peek()
            lhs = _parse_path(cur, quiver)
            cur.next(text="=")
            rhs = _parse_path(cur, quiver)
            if (lhs.source, lhs.target) != (rhs.source, rhs.target):
                raise cur.error("relation between non-parallel paths", "arity-mismatch", lhs_tok)
            relations.append(Relation(lhs, rhs, label))
            spans[label or f"#{len(relations)}"] = (lineno, head.col)
        else:
            raise cur.error(f"unknown declaration {word!r}", tok=head)
        cur.done()

    if kind == "category" or objects:
        if ops or equations:
            raise ParseError("syntax", "a file holds either a signature or a quiver, not both", 1, 1)
        quiver = quiver or Quiver(tuple(objects), tuple(edges))
        return PresFile(CategoryPresentation(quiver, tuple(relations), name), spans)
    sig = sig or Signature(ops)
    return PresFile(Presentation(sig, tuple(equations), name), spans)


def print_pres(P: Presentation | CategoryPresentation) -> str:
    lines: list[str] = []
    if isinstance(P, CategoryPresentation):
        lines.append(f"category {P.name}")
        lines.append("objects " + " ".join(P.quiver.objects))
        for e in P.quiver.edges:
            lines.append(f"edge {e.name} : {e.source} -> {e.target}")
        for r in P.relations:
            head = f"rel {r.label} :" if r.label else "rel :"
            lines.append(f"{head} {r.lhs} = {r.rhs}")
        return "\n".join(lines) + "\n"
    lines.append(f"signature {P.name}")
    for op in P.signature:
        lines.append(f"op {op.name} : {op.arity}")
    lines.append("equations")
    for e in P.equations:
        head = f"eq {e.label} " if e.label else "eq "
        lines.append(f"{head}({e.ctx}) : {e.lhs!r} = {e.rhs!r}")
    return "\n".join(lines) + "\n"


@dataclass
class AlgFile:
    algebra: FiniteAlgebra
    elements: tuple[str, ...]
    name: str = "A"


def _resolve_table_symbol(sig: Signature, name: str, arity: int | None, count: int, m: int, cur: _Cursor, tok):
    cands = [op for op in sig if op.name == name and (arity is None or op.arity == arity)]
    if arity is None and len(cands) > 1:
        cands = [op for op in cands if m ** op.arity == count]
    if not cands:
        raise cur.error(f"unknown symbol {name!r}", "unknown-symbol", tok)
    if len(cands) > 1:
        raise cur.error(f"symbol {name!r} is ambiguous; write {name}/ARITY", "syntax", tok)
    return cands[0]


def parse_alg(text: str, sig: Signature) -> AlgFile:
    name = "A"
    elements: list[str] | None = None
    tables: dict[OpSymbol, tuple[int, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokenize(raw, lineno)
        if not toks:
            continue
        cur = _Cursor(toks, lineno, len(raw.rstrip()) + 1)
        head = cur.next("name")
        if head.text == "algebra":
            name = cur.next("name").text
        elif head.text == "carrier":
            elements = []
            while cur.peek() is not None:
                tok = cur.next()
                if tok.kind not in ("name", "int"):
                    raise cur.error("element names are identifiers or numbers", tok=tok)
                if tok.text in elements:
                    raise cur.error(f"duplicate element {tok.text!r}", "duplicate", tok)
                elements.append(tok.text)
        elif head.text == "table":
            if elements is None:
                raise cur.error("table before carrier", tok=head)
            tok = cur.next("name")
            arity = None
            if cur.accept("/"):
                arity = int(cur.next("int").text)
            cur.next(text=":")
            entries = []
            while cur.peek() is not None:
                e = cur.next()
                if e.text not in elements:
                    raise cur.error(f"unknown element {e.text!r}", "unknown-symbol", e)
                entries.append(elements.index(e.text))
            op = _resolve_table_symbol(sig, tok.text, arity, len(entries), len(elements), cur, tok)
            if len(entries) != len(elements) ** op.arity:
                raise cur.error(
                    f"table for {op} needs {len(elements) ** op.arity} entries, has {len(entries)}",
                    "arity-mismatch",
                    tok,
                )
            if op in tables:
                raise cur.error(f"second table for {op}", "duplicate", tok)
            tables[op] = tuple(entries)
        else:
            raise cur.error(f"unknown declaration {head.text!r}", tok=head)
        cur.done()
    if elements is None:
        raise ParseError("syntax", "missing carrier line", 1, 1)
    missing = [str(op) for op in sig if op not in tables]
    if missing:
        raise ParseError("syntax", f"no table for {', '.join(missing)}", 1, 1)
    A = FiniteAlgebra(sig, len(elements), tuple(tables[op] for op in sig))
    return AlgFile(A, tuple(elements), name)


def print_alg(A: FiniteAlgebra, name: str = "A", elements: Sequence[str] | None = None) -> str:
    elements = list(elements) if elements is not None else [str(i) for i in range(A.size)]
    lines = [f"algebra {name}", "carrier" + "".join(" " + e for e in elements)]
    names = [op.name for op in A.signature]
    for op, table in zip(A.signature, A.tables):
        label = op.name if names.count(op.name) == 1 else f"{op.name}/{op.arity}"
        lines.append(f"table {label} :" + "".join(" " + elements[v] for v in table))
    return "\n".join(lines) + "\n"


def parse_functor(text: str, quiver: Quiver) -> SetFunctorData:
    sets: dict[str, list[str]] = {}
    maps: dict[str, tuple[int, ...]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokenize(raw, lineno)
        if not toks:
            continue
        cur = _Cursor(toks, lineno, len(raw.rstrip()) + 1)
        head = cur.next("name")
        if head.text == "functor":
            cur.next("name")
        elif head.text == "set":
            obj = cur.next("name")
            if obj.text not in quiver.objects:
                raise cur.error(f"unknown object {obj.text!r}", "unknown-symbol", obj)
            cur.next(text=":")
            elems = []
            while cur.peek() is not None:
                elems.append(cur.next().text)
            sets[obj.text] = elems
        elif head.text == "map":
            tok = cur.next("name")
            try:
                e = quiver.edge(tok.text)
            except ValueError:
                raise cur.error(f"unknown edge {tok.text!r}", "unknown-symbol", tok) from None
            cur.next(text=":")
            if e.source not in sets or e.target not in sets:
                raise cur.error(f"declare the sets of {e.source} and {e.target} first", tok=tok)
            image = []
            while cur.peek() is not None:
                v = cur.next()
                if v.text not in sets[e.target]:
                    raise cur.error(f"{v.text!r} is not an element of {e.target}", "unknown-symbol", v)
                image.append(sets[e.target].index(v.text))
            if len(image) != len(sets[e.source]):
                raise cur.error(f"map {e.name} needs {len(sets[e.source])} entries", "arity-mismatch", tok)
            maps[e.name] = tuple(image)
        else:
            raise cur.error(f"unknown declaration {head.text!r}", tok=head)
        cur.done()
    F = SetFunctorData({o: len(v) for o, v in sets.items()}, maps)
    F.validate(quiver)
    return F


def print_functor(F: SetFunctorData, quiver: Quiver, name: str = "F") -> str:
    lines = [f"functor {name}"]
    for o in quiver.objects:
        lines.append(f"set {o} :" + "".join(f" {i}" for i in range(F.sets[o])))
    for e in quiver.edges:
        lines.append(f"map {e.name} :" + "".join(f" {v}" for v in F.maps[e.name]))
    return "\n".join(lines) + "\n"
