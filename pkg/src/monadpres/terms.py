"""Signatures, terms and the free term monad.

Terms live in a positional context: a term "in context n" may only mention
the variables ``Var(0) .. Var(n-1)``.  The unit of the free monad is
:func:`unit_var`, its multiplication is substitution (:func:`subst`), and the
finite stages of the free-algebra chain are produced by
:func:`enumerate_terms`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BudgetExceeded, ContractViolation

__all__ = [
    "OpSymbol",
    "Signature",
    "Term",
    "Var",
    "App",
    "SignatureMorphism",
    "unit_var",
    "subst",
    "check_term",
    "polynomial_apply",
    "polynomial_elements",
    "enumerate_terms",
    "stage_sizes",
    "extend_morphism",
    "term_vars",
]


@dataclass(frozen=True, order=True)
class OpSymbol:
    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ContractViolation("operation symbol name must be nonempty")
        if self.arity < 0:
            raise ContractViolation(f"negative arity for {self.name!r}")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


class Signature:
    """A finite family of operation symbols, kept in declaration order.

    Declaration order is significant: it fixes term enumeration order, the
    layout of algebra tables and the precedence used by completion.
    """

    __slots__ = ("ops", "_index", "_hash")

    def __init__(self, ops: Iterable[OpSymbol] = ()):
        ops = tuple(ops)
        index: dict[OpSymbol, int] = {}
        for i, op in enumerate(ops):
            if op in index:
                raise ContractViolation(f"duplicate operation symbol {op}")
            index[op] = i
        self.ops = ops
        self._index = index
        self._hash = hash(ops)

    @classmethod
    def of(cls, **arities: int) -> "Signature":
        """``Signature.of(e=0, mul=2)``: shorthand keeping keyword order."""
        return cls(OpSymbol(n, a) for n, a in arities.items())

    def __eq__(self, other):
        return isinstance(other, Signature) and self.ops == other.ops

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Signature(" + ", ".join(map(str, self.ops)) + ")"

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    def __contains__(self, op) -> bool:
        return op in self._index

    def index(self, op: OpSymbol) -> int:
        return self._index[op]

    @property
    def by_arity(self) -> dict[int, tuple[OpSymbol, ...]]:
        out: dict[int, list[OpSymbol]] = {}
        for op in self.ops:
            out.setdefault(op.arity, []).append(op)
        return {k: tuple(v) for k, v in sorted(out.items())}

    @property
    def constants(self) -> tuple[OpSymbol, ...]:
        return tuple(op for op in self.ops if op.arity == 0)

    @property
    def max_arity(self) -> int:
        return max((op.arity for op in self.ops), default=0)

    def lookup(self, name: str, arity: int | None = None) -> OpSymbol:
        found = [op for op in self.ops if op.name == name and (arity is None or op.arity == arity)]
        if not found:
            raise KeyError(name if arity is None else f"{name}/{arity}")
        if len(found) > 1:
            raise ContractViolation(f"symbol {name!r} is ambiguous; give an arity")
        return found[0]

    def __add__(self, other: "Signature") -> "Signature":
        return Signature(self.ops + tuple(op for op in other.ops if op not in self._index))


class Term:
    """Base class of :class:`Var` and :class:`App`; immutable, structurally compared."""

    __slots__ = ()
    depth: int
    size: int


class Var(Term):
    __slots__ = ("index", "_hash")

    def __init__(self, index: int):
        if index < 0:
            raise ContractViolation(f"negative variable index {index}")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "_hash", hash(("v", index)))

    def __setattr__(self, *_):
        raise AttributeError("terms are immutable")

    depth = 0
    size = 1

    def __eq__(self, other):
        return type(other) is Var and other.index == self.index

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"x{self.index}"

    def __reduce__(self):
        return (Var, (self.index,))


class App(Term):
    __slots__ = ("op", "args", "depth", "size", "_hash")

    def __init__(self, op: OpSymbol, args: Sequence[Term] = ()):
        args = tuple(args)
        if len(args) != op.arity:
            raise ContractViolation(f"{op} applied to {len(args)} arguments")
        set_ = object.__setattr__
        set_(self, "op", op)
        set_(self, "args", args)
        set_(self, "depth", 1 + max((a.depth for a in args), default=0))
        set_(self, "size", 1 + sum(a.size for a in args))
        set_(self, "_hash", hash((op, args)))

    def __setattr__(self, *_):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is App
            and self._hash == other._hash
            and self.op == other.op
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.args:
            return self.op.name
        return f"{self.op.name}({','.join(map(repr, self.args))})"

    def __reduce__(self):
        return (App, (self.op, self.args))


@dataclass(frozen=True)
class SignatureMorphism:
    """Assigns to each symbol of ``source`` a term over ``target``.

    The term assigned to a symbol of arity n lives in context n.  This is the
    data of a signature morphism into the signature underlying the free monad
    on ``target``.
    """

    source: Signature
    target: Signature
    assign: Mapping[OpSymbol, Term] = field(hash=False)

    def __post_init__(self):
        for op in self.source:
            if op not in self.assign:
                raise ContractViolation(f"no term assigned to {op}")
            check_term(self.target, self.assign[op], op.arity)
        extra = [op for op in self.assign if op not in self.source]
        if extra:
            raise ContractViolation(f"assignment mentions symbols outside the source: {extra}")

    def __call__(self, op: OpSymbol) -> Term:
        return self.assign[op]

    @classmethod
    def identity(cls, sig: Signature) -> "SignatureMorphism":
        return cls(sig, sig, {op: App(op, [Var(i) for i in range(op.arity)]) for op in sig})

    def then(self, other: "SignatureMorphism") -> "SignatureMorphism":
        """Kleisli composite: first ``self``, then ``other``."""
        if self.target != other.source:
            raise ContractViolation("morphisms do not compose")
        return SignatureMorphism(
            self.source, other.target, {op: extend_morphism(other, t) for op, t in self.assign.items()}
        )


def unit_var(i: int, ctx: int) -> Var:
    if not 0 <= i < ctx:
        raise ContractViolation(f"variable x{i} outside context of size {ctx}")
    return Var(i)


def term_vars(t: Term) -> set[int]:
    if type(t) is Var:
        return {t.index}
    out: set[int] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if type(s) is Var:
            out.add(s.index)
        else:
            stack.extend(s.args)
    return out


def check_term(sig: Signature, t: Term, ctx: int) -> None:
    """Raise :class:`ContractViolation` unless ``t`` is a term over ``sig`` in context ``ctx``."""
    stack = [t]
    while stack:
        s = stack.pop()
        if type(s) is Var:
            if s.index >= ctx:
                raise ContractViolation(f"variable x{s.index} outside context of size {ctx}")
        elif type(s) is App:
            if s.op not in sig:
                raise ContractViolation(f"symbol {s.op} not in signature")
            stack.extend(s.args)
        else:
            raise ContractViolation(f"not a term: {s!r}")


def subst(t: Term, env: Sequence[Term], ctx: int | None = None) -> Term:
    """Replace ``Var(i)`` by ``env[i]`` throughout ``t``.

    If ``ctx`` is given it is the context of ``t`` and must equal ``len(env)``.
    """
    env = tuple(env)
    if ctx is not None and ctx != len(env):
        raise ContractViolation(f"environment of length {len(env)} for context {ctx}")
    n = len(env)
    memo: dict[Term, Term] = {}

    def go(s: Term) -> Term:
        if type(s) is Var:
            if s.index >= n:
                raise ContractViolation(f"variable x{s.index} not covered by environment of length {n}")
            return env[s.index]
        r = memo.get(s)
        if r is None:
            r = App(s.op, [go(a) for a in s.args]) if s.args else s
            memo[s] = r
        return r

    return go(t)


def polynomial_apply(sig: Signature, carrier_size: int) -> int:
    """Cardinality of the polynomial functor of ``sig`` at a carrier of the given size."""
    if carrier_size < 0:
        raise ContractViolation("negative carrier size")
    return sum(carrier_size ** op.arity for op in sig)


def polynomial_elements(sig: Signature, carrier: Sequence) -> Iterator[tuple[int, tuple, OpSymbol]]:
    """All ``(arity, tuple, symbol)`` triples of the polynomial functor at ``carrier``."""
    carrier = list(carrier)
    for op in sig:
        for tup in itertools.product(carrier, repeat=op.arity):
            yield op.arity, tup, op


def enumerate_terms(
    sig: Signature, ctx: int, max_depth: int, cap: int | None = None
) -> Iterator[Term]:
    """Every term of depth <= ``max_depth`` in context ``ctx``, each exactly once.

    Order: by depth, then symbol declaration order, then lexicographically in
    the arguments (comparing arguments by their own position in this stream).
    ``cap`` bounds the number of emitted terms; reaching it raises
    :class:`BudgetExceeded`.
    """
    emitted = 0

    def emit(t):
        nonlocal emitted
        emitted += 1
        if cap is not None and emitted > cap:
            raise BudgetExceeded("term enumeration", cap)
        return t

    stage: list[Term] = [Var(i) for i in range(ctx)]
    for t in stage:
        yield emit(t)
    for d in range(1, max_depth + 1):
        new: list[Term] = []
        for op in sig:
            if op.arity == 0:
                if d == 1:
                    new.append(App(op))
                continue
            for args in itertools.product(stage, repeat=op.arity):
                if max(a.depth for a in args) == d - 1:
                    new.append(App(op, args))
        if not new:
            return
        for t in new:
            yield emit(t)
        stage = stage + new


def stage_sizes(sig: Signature, ctx: int, max_depth: int) -> tuple[list[int], int | None]:
    """Sizes of the depth-bounded stages 0..max_depth and the stage where the chain stabilizes.

    The second component is the first d with stage d+1 equal to stage d, or
    None if no stabilization happens within ``max_depth``.
    """
    per_depth = [0] * (max_depth + 1)
    for t in enumerate_terms(sig, ctx, max_depth):
        per_depth[t.depth] += 1
    sizes = list(itertools.accumulate(per_depth))
    stable = None
    for d in range(max_depth):
        if sizes[d + 1] == sizes[d]:
            stable = d
            break
    if stable is None and not any(op.arity >= 1 for op in sig):
        # no operation of positive arity: nothing new after the constants
        stable = 0 if not sig.constants else 1
        if stable > max_depth:
            stable = None
    return sizes, stable


def extend_morphism(mor: SignatureMorphism, term: Term) -> Term:
    """Image of ``term`` under the monad morphism induced by ``mor``."""
    memo: dict[Term, Term] = {}

    def go(s: Term) -> Term:
        if type(s) is Var:
            return s
        r = memo.get(s)
        if r is None:
            if s.op not in mor.source:
                raise ContractViolation(f"symbol {s.op} not in the morphism's source")
            r = subst(mor.assign[s.op], [go(a) for a in s.args])
            memo[s] = r
        return r

    return go(term)
