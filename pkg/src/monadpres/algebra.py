"""Finite algebras for a signature, term evaluation and homomorphisms.

A table for a symbol of arity n over a carrier of size m is a flat tuple of
m**n entries; the tuple (a_0, .., a_{n-1}) sits at index
sum(a_k * m**(n-1-k)), i.e. row-major with the first argument most
significant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

from .errors import BudgetExceeded, ContractViolation
from .terms import App, OpSymbol, Signature, Term, Var, check_term, enumerate_terms, subst

__all__ = [
    "FiniteAlgebra",
    "tuple_index",
    "eval_term",
    "is_homomorphism",
    "enumerate_algebras",
    "count_algebras",
    "em_law_check",
    "pullback_algebra",
    "find_isomorphism",
]


def tuple_index(args: Sequence[int], m: int) -> int:
    i = 0
    for a in args:
        i = i * m + a
    return i


@dataclass(frozen=True)
class FiniteAlgebra:
    """A carrier ``{0..size-1}`` with one table per symbol of ``signature``.

    ``tables`` is aligned with ``signature.ops``.
    """

    signature: Signature
    size: int
    tables: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        sig, m = self.signature, self.size
        if m < 0:
            raise ContractViolation("negative carrier size")
        if m == 0 and sig.constants:
            raise ContractViolation("empty carrier with constants in the signature")
        if len(self.tables) != len(sig):
            raise ContractViolation(f"expected {len(sig)} tables, got {len(self.tables)}")
        for op, table in zip(sig, self.tables):
            if len(table) != m ** op.arity:
                raise ContractViolation(f"table for {op} has {len(table)} entries, expected {m ** op.arity}")
            if any(not 0 <= v < m for v in table):
                raise ContractViolation(f"table for {op} leaves the carrier")

    @classmethod
    def from_tables(cls, signature: Signature, size: int, tables: Mapping) -> "FiniteAlgebra":
        """Build from a mapping keyed by :class:`OpSymbol` or by symbol name."""
        out = []
        for op in signature:
            table = tables[op] if op in tables else tables[op.name]
            out.append(tuple(int(v) for v in table))
        return cls(signature, size, tuple(out))

    @classmethod
    def from_functions(cls, signature: Signature, size: int, funcs: Mapping) -> "FiniteAlgebra":
        """Build from Python callables, keyed by symbol or symbol name."""
        out = []
        for op in signature:
            f = funcs[op] if op in funcs else funcs[op.name]
            out.append(tuple(f(*args) for args in itertools.product(range(size), repeat=op.arity)))
        return cls(signature, size, tuple(out))

    def table(self, op: OpSymbol) -> tuple[int, ...]:
        return self.tables[self.signature.index(op)]

    def apply(self, op: OpSymbol, args: Sequence[int]) -> int:
        return self.tables[self.signature.index(op)][tuple_index(args, self.size)]

    def restrict(self, signature: Signature) -> "FiniteAlgebra":
        return FiniteAlgebra(signature, self.size, tuple(self.table(op) for op in signature))


def eval_term(A: FiniteAlgebra, t: Term, x: Sequence[int]) -> int:
    """Value of ``t`` in ``A`` under the assignment ``x`` (variable i -> x[i])."""
    check_term(A.signature, t, len(x))
    if any(not 0 <= v < A.size for v in x):
        raise ContractViolation("assignment leaves the carrier")
    return _eval(A, t, x)


def _eval(A: FiniteAlgebra, t: Term, x: Sequence[int]) -> int:
    if type(t) is Var:
        return x[t.index]
    m = A.size
    i = 0
    for a in t.args:
        i = i * m + _eval(A, a, x)
    return A.tables[A.signature.index(t.op)][i]


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, f: Sequence[int]) -> bool:
    if A.signature != B.signature:
        raise ContractViolation("homomorphism between algebras of different signatures")
    if len(f) != A.size or any(not 0 <= v < B.size for v in f):
        raise ContractViolation("f is not a total map between the carriers")
    for op, ta, tb in zip(A.signature, A.tables, B.tables):
        for idx, args in enumerate(itertools.product(range(A.size), repeat=op.arity)):
            if f[ta[idx]] != tb[tuple_index([f[a] for a in args], B.size)]:
                return False
    return True


def count_algebras(sig: Signature, m: int) -> int:
    total = 1
    for op in sig:
        total *= m ** (m ** op.arity)
    return total


def enumerate_algebras(sig: Signature, m: int, cap: int | None = None) -> Iterator[FiniteAlgebra]:
    """Every algebra on carrier m, in lexicographic order of the concatenated tables."""
    if m < 0 or (m == 0 and sig.constants):
        raise ContractViolation(f"no algebras on carrier {m} for this signature")
    if cap is not None and count_algebras(sig, m) > cap:
        raise BudgetExceeded("algebra enumeration", cap)
    widths = [m ** op.arity for op in sig]
    for cells in itertools.product(range(m), repeat=sum(widths)):
        tables, pos = [], 0
        for w in widths:
            tables.append(cells[pos:pos + w])
            pos += w
        yield FiniteAlgebra(sig, m, tuple(tables))


def em_law_check(
    A: FiniteAlgebra, max_depth: int, interpret: Callable[[Term], int] | None = None
) -> bool:
    """Check the Eilenberg-Moore laws for the structure map term -> element of ``A``.

    Terms over the carrier are terms in context ``A.size`` (variable i stands
    for element i).  ``interpret`` defaults to evaluation under the identity
    assignment; passing another map tests whether *it* is an algebra structure.
    Associativity is checked on nested terms whose outer and inner depths sum
    to at most ``max_depth``.
    """
    m = A.size
    ident = list(range(m))
    alpha = interpret or (lambda t: _eval(A, t, ident))
    if any(alpha(Var(a)) != a for a in range(m)):
        return False
    for outer_depth in range(1, max_depth + 1):
        inner = list(enumerate_terms(A.signature, m, max_depth - outer_depth))
        inner_vals = [alpha(s) for s in inner]
        for outer in enumerate_terms(A.signature, len(inner), outer_depth):
            # multiplication then alpha, versus alpha after mapping alpha inside
            flat = alpha(subst(outer, inner))
            pushed = alpha(subst(outer, [Var(v) for v in inner_vals]))
            if flat != pushed:
                return False
    return True


def pullback_algebra(A: FiniteAlgebra, assign: Mapping[OpSymbol, Term], source: Signature) -> FiniteAlgebra:
    """Structure on the carrier of ``A`` for ``source``: each symbol acts as its assigned term."""
    m = A.size
    tables = []
    for op in source:
        t = assign[op]
        tables.append(tuple(_eval(A, t, args) for args in itertools.product(range(m), repeat=op.arity)))
    return FiniteAlgebra(source, m, tuple(tables))


def find_isomorphism(A: FiniteAlgebra, B: FiniteAlgebra) -> tuple[int, ...] | None:
    """A bijective homomorphism A -> B by exhaustive search, or None."""
    if A.signature != B.signature or A.size != B.size:
        return None
    for perm in itertools.permutations(range(A.size)):
        if is_homomorphism(A, B, perm):
            return perm
    return None
