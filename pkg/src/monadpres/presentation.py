"""Equational presentations, satisfaction and finite model enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .algebra import FiniteAlgebra, _eval, enumerate_algebras
from .errors import BudgetExceeded, ContractViolation
from .search import search_models
from .terms import App, Signature, SignatureMorphism, Term, Var, check_term, extend_morphism

__all__ = [
    "Equation",
    "Presentation",
    "satisfies",
    "find_violation",
    "enumerate_models",
    "model_counts",
    "legal_sizes",
    "system_satisfied",
]


@dataclass(frozen=True)
class Equation:
    """A formal equation ``lhs = rhs`` between terms in context ``ctx``."""

    ctx: int
    lhs: Term
    rhs: Term
    label: str | None = None

    def __post_init__(self):
        if self.ctx < 0:
            raise ContractViolation("negative context size")

    def check(self, sig: Signature) -> None:
        check_term(sig, self.lhs, self.ctx)
        check_term(sig, self.rhs, self.ctx)

    def __str__(self):
        head = f"{self.label} " if self.label else ""
        return f"{head}({self.ctx}) : {self.lhs!r} = {self.rhs!r}"


@dataclass(frozen=True)
class Presentation:
    signature: Signature
    equations: tuple[Equation, ...] = ()
    name: str = "P"

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        for eq in self.equations:
            eq.check(self.signature)

    def with_equations(self, extra: Iterable[Equation], name: str | None = None) -> "Presentation":
        return Presentation(self.signature, self.equations + tuple(extra), name or self.name)

    @property
    def max_equation_depth(self) -> int:
        return max((max(e.lhs.depth, e.rhs.depth) for e in self.equations), default=0)


def find_violation(A: FiniteAlgebra, P: Presentation) -> tuple[Equation, tuple[int, ...]] | None:
    """First equation and assignment on which ``A`` fails ``P``, or None."""
    if A.signature != P.signature:
        raise ContractViolation("algebra and presentation have different signatures")
    for eq in P.equations:
        for x in itertools.product(range(A.size), repeat=eq.ctx):
            if _eval(A, eq.lhs, x) != _eval(A, eq.rhs, x):
                return eq, x
    return None


def satisfies(A: FiniteAlgebra, P: Presentation) -> bool:
    return find_violation(A, P) is None


def system_satisfied(
    A: FiniteAlgebra, t: SignatureMorphism, u: SignatureMorphism
) -> bool:
    """Whether the two images of every symbol of a parallel pair agree in ``A``.

    ``t`` and ``u`` go from some signature Gamma into terms over
    ``A.signature``; this is satisfaction of the system (t, u) phrased
    through the induced monad morphisms.
    """
    if t.source != u.source:
        raise ContractViolation("parallel pair with different sources")
    for op in t.source:
        lt, lu = extend_morphism(t, _generic(op)), extend_morphism(u, _generic(op))
        for x in itertools.product(range(A.size), repeat=op.arity):
            if _eval(A, lt, x) != _eval(A, lu, x):
                return False
    return True


def _generic(op):
    return App(op, [Var(i) for i in range(op.arity)])


def legal_sizes(sig: Signature, max_size: int) -> range:
    return range(1 if sig.constants else 0, max_size + 1)


def enumerate_models(
    P: Presentation,
    max_size: int,
    *,
    sizes: Sequence[int] | None = None,
    method: str = "search",
    max_nodes: int | None = None,
) -> Iterator[FiniteAlgebra]:
    """Models of ``P`` on carriers 0 (when legal) through ``max_size``.

    ``method="search"`` uses propagation; ``method="brute"`` filters every
    algebra through :func:`satisfies`.  Both produce the same stream.
    """
    if sizes is None:
        sizes = legal_sizes(P.signature, max_size)
    for m in sizes:
        if method == "brute":
            for A in enumerate_algebras(P.signature, m, cap=max_nodes):
                if satisfies(A, P):
                    yield A
        elif method == "search":
            eqs = [(e.ctx, e.lhs, e.rhs) for e in P.equations]
            yield from search_models(P.signature, eqs, m, max_nodes=max_nodes)
        else:
            raise ValueError(f"unknown method {method!r}")


def model_counts(P: Presentation, max_size: int, **kw) -> dict[int, int]:
    counts = {m: 0 for m in legal_sizes(P.signature, max_size)}
    for A in enumerate_models(P, max_size, **kw):
        counts[A.size] += 1
    return counts
