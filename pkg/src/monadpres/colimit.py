"""Coproducts, coequalizers and pushouts of presentations, checked at model level.

A morphism of presentations ``P -> Q`` is a :class:`SignatureMorphism` sending
each symbol of P to a term over Q such that every equation of P becomes an
equation provable in Q.  Models of Q pull back along it to models of P.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import FiniteAlgebra, pullback_algebra
from .equality import Distinct, Equal, EqualityBudget, Unknown, equal_mod_E
from .errors import ContractViolation
from .presentation import Equation, Presentation, enumerate_models, legal_sizes, satisfies
from .terms import (
    App,
    OpSymbol,
    Signature,
    SignatureMorphism,
    Term,
    Var,
    enumerate_terms,
    extend_morphism,
    subst,
    term_vars,
)

__all__ = [
    "Coproduct",
    "coproduct",
    "coproduct_with_injections",
    "coequalizer",
    "pushout",
    "Arrow",
    "MonadDiagram",
    "CompatibleFamily",
    "compatible_families",
    "verify_algebraic",
    "VerificationReport",
    "SizeReport",
    "canonical_presentation",
    "canonical_symbols",
    "check_arrow",
]


def _rename_term(t: Term, ren: dict[OpSymbol, OpSymbol]) -> Term:
    if type(t) is Var:
        return t
    return App(ren[t.op], [_rename_term(a, ren) for a in t.args])


def _generic(op: OpSymbol) -> Term:
    return App(op, [Var(i) for i in range(op.arity)])


@dataclass(frozen=True)
class Coproduct:
    presentation: Presentation
    left: SignatureMorphism
    right: SignatureMorphism

    def split(self, A: FiniteAlgebra) -> tuple[FiniteAlgebra, FiniteAlgebra]:
        """The two component models of a model of the coproduct."""
        return (
            pullback_algebra(A, self.left.assign, self.left.source),
            pullback_algebra(A, self.right.assign, self.right.source),
        )

    def merge(self, A1: FiniteAlgebra, A2: FiniteAlgebra) -> FiniteAlgebra:
        if A1.size != A2.size:
            raise ContractViolation("components must share a carrier")
        tables = {}
        for mor, A in ((self.left, A1), (self.right, A2)):
            for op in mor.source:
                tables[mor(op).op] = A.table(op)
        return FiniteAlgebra.from_tables(self.presentation.signature, A1.size, tables)


def coproduct_with_injections(P1: Presentation, P2: Presentation, name: str | None = None) -> Coproduct:
    """Disjoint union; a name used on both sides becomes ``l_name`` and ``r_name``."""
    n1 = {op.name for op in P1.signature}
    n2 = {op.name for op in P2.signature}
    clash = n1 & n2
    taken = n1 | n2

    def fresh(prefix, nm):
        out = prefix + nm
        while out in taken:
            out = prefix + out
        taken.add(out)
        return out

    ren1 = {op: OpSymbol(fresh("l_", op.name), op.arity) if op.name in clash else op for op in P1.signature}
    ren2 = {op: OpSymbol(fresh("r_", op.name), op.arity) if op.name in clash else op for op in P2.signature}
    sig = Signature([*ren1.values(), *ren2.values()])
    eqs = [Equation(e.ctx, _rename_term(e.lhs, ren1), _rename_term(e.rhs, ren1), e.label) for e in P1.equations]
    eqs += [Equation(e.ctx, _rename_term(e.lhs, ren2), _rename_term(e.rhs, ren2), e.label) for e in P2.equations]
    C = Presentation(sig, tuple(eqs), name or f"{P1.name}+{P2.name}")
    left = SignatureMorphism(P1.signature, sig, {op: _generic(ren1[op]) for op in P1.signature})
    right = SignatureMorphism(P2.signature, sig, {op: _generic(ren2[op]) for op in P2.signature})
    return Coproduct(C, left, right)


def coproduct(P1: Presentation, P2: Presentation, name: str | None = None) -> Presentation:
    return coproduct_with_injections(P1, P2, name).presentation


def coequalizer(
    gamma: Signature, t: SignatureMorphism, u: SignatureMorphism, P: Presentation, name: str | None = None
) -> Presentation:
    """P with one extra equation ``t(g) = u(g)`` per symbol g of ``gamma``, in context arity(g)."""
    for mor in (t, u):
        if mor.source != gamma:
            raise ContractViolation("morphism source differs from the parameter signature")
        if mor.target != P.signature:
            raise ContractViolation("morphism target differs from the presentation's signature")
    extra = [Equation(g.arity, t(g), u(g), f"coeq_{g.name}") for g in gamma]
    return P.with_equations(extra, name or f"{P.name}/coeq")


def check_arrow(
    P: Presentation, Q: Presentation, f: SignatureMorphism, budget: EqualityBudget | None = None
) -> list[tuple[Equation, object]]:
    """Verdicts for each equation of P transported along f into Q; Equal everywhere means legal."""
    if f.source != P.signature or f.target != Q.signature:
        raise ContractViolation("arrow does not go between these presentations")
    budget = budget or EqualityBudget()
    return [
        (e, equal_mod_E(Q, extend_morphism(f, e.lhs), extend_morphism(f, e.rhs), e.ctx, budget))
        for e in P.equations
    ]


def _require_legal(P, Q, f, budget, what):
    for e, v in check_arrow(P, Q, f, budget):
        if isinstance(v, Unknown):
            raise ContractViolation(f"{what}: cannot decide whether equation {e} is preserved ({v.report})")
        if isinstance(v, Distinct):
            raise ContractViolation(f"{what}: equation {e} is not preserved")


def pushout(
    apex: Presentation,
    P1: Presentation,
    P2: Presentation,
    f: SignatureMorphism,
    g: SignatureMorphism,
    budget: EqualityBudget | None = None,
    name: str | None = None,
) -> Presentation:
    """Coproduct of P1 and P2 with the two images of each apex symbol identified."""
    _require_legal(apex, P1, f, budget, "left arrow")
    _require_legal(apex, P2, g, budget, "right arrow")
    cp = coproduct_with_injections(P1, P2)
    t = f.then(cp.left)
    u = g.then(cp.right)
    return coequalizer(apex.signature, t, u, cp.presentation, name or f"{P1.name}+{P2.name}")


@dataclass(frozen=True)
class Arrow:
    source: int
    target: int
    morphism: SignatureMorphism


@dataclass(frozen=True)
class MonadDiagram:
    """Presentations and equation-preserving arrows between them, validated on construction."""

    objects: tuple[Presentation, ...]
    arrows: tuple[Arrow, ...] = ()
    budget: EqualityBudget = field(default_factory=EqualityBudget)

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        for k, a in enumerate(self.arrows):
            if not (0 <= a.source < len(self.objects) and 0 <= a.target < len(self.objects)):
                raise ContractViolation(f"arrow {k} refers to a missing object")
            _require_legal(self.objects[a.source], self.objects[a.target], a.morphism, self.budget, f"arrow {k}")


@dataclass(frozen=True)
class CompatibleFamily:
    """One algebra per diagram object, all on one carrier, agreeing along every arrow."""

    carrier_size: int
    algebras: tuple[FiniteAlgebra, ...]

    def is_compatible(self, D: MonadDiagram) -> bool:
        if len(self.algebras) != len(D.objects):
            return False
        if any(A.size != self.carrier_size for A in self.algebras):
            return False
        if not all(satisfies(A, P) for A, P in zip(self.algebras, D.objects)):
            return False
        return all(
            pullback_algebra(self.algebras[a.target], a.morphism.assign, a.morphism.source) == self.algebras[a.source]
            for a in D.arrows
        )


def compatible_families(D: MonadDiagram, m: int, max_nodes: int | None = None) -> list[CompatibleFamily]:
    """All compatible families on carrier m, in a deterministic order.

    Objects without outgoing arrows are enumerated; every other object's
    algebra is forced by pulling back along one of its arrows.  Cycles fall
    back to enumeration with filtering.
    """
    n = len(D.objects)
    outgoing: dict[int, list[Arrow]] = {k: [] for k in range(n)}
    for a in D.arrows:
        outgoing[a.source].append(a)
    order: list[int] = []
    placed: set[int] = set()
    changed = True
    while changed:
        changed = False
        for k in range(n):
            if k not in placed and all(a.target in placed for a in outgoing[k]):
                order.append(k)
                placed.add(k)
                changed = True
    free = [k for k in range(n) if k not in placed]
    order = [k for k in order if not outgoing[k]] + free + [k for k in order if outgoing[k]]
    enumerated = [k for k in order if not outgoing[k] or k in free]
    pools = [list(enumerate_models(D.objects[k], m, sizes=[m], max_nodes=max_nodes)) for k in enumerated]

    out = []
    for combo in itertools.product(*pools):
        algs: dict[int, FiniteAlgebra] = dict(zip(enumerated, combo))
        for k in order:
            if k in algs:
                continue
            a = outgoing[k][0]
            algs[k] = pullback_algebra(algs[a.target], a.morphism.assign, a.morphism.source)
        fam = CompatibleFamily(m, tuple(algs[k] for k in range(n)))
        if fam.is_compatible(D):
            out.append(fam)
    return out


@dataclass
class SizeReport:
    size: int
    colimit_models: int
    families: int
    pairing: list[tuple[int, int]]
    injective: bool
    surjective: bool

    @property
    def ok(self) -> bool:
        return self.colimit_models == self.families and self.injective and self.surjective


@dataclass
class VerificationReport:
    sizes: list[SizeReport] = field(default_factory=list)
    cocone: list[str] = field(default_factory=list)
    inconclusive: list[str] = field(default_factory=list)

    @property
    def mismatches(self) -> int:
        return sum(not s.ok for s in self.sizes) + len(self.cocone)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0 and not self.inconclusive


def verify_algebraic(
    D: MonadDiagram,
    C: Presentation,
    cocone: Sequence[SignatureMorphism],
    max_size: int,
    budget: EqualityBudget | None = None,
    max_nodes: int | None = None,
) -> VerificationReport:
    """Check that models of C correspond exactly to compatible families of D.

    A model of C is sent to the family of its pullbacks along the cocone.
    """
    budget = budget or D.budget
    report = VerificationReport()
    if len(cocone) != len(D.objects):
        raise ContractViolation("one cocone arrow per diagram object is required")
    for k, c in enumerate(cocone):
        for e, v in check_arrow(D.objects[k], C, c, budget):
            if isinstance(v, Unknown):
                report.inconclusive.append(f"cocone arrow {k}: equation {e} undecided")
            elif isinstance(v, Distinct):
                report.cocone.append(f"cocone arrow {k}: equation {e} not preserved")
    for j, a in enumerate(D.arrows):
        for op in a.morphism.source:
            via = extend_morphism(cocone[a.target], a.morphism(op))
            direct = cocone[a.source](op)
            v = equal_mod_E(C, via, direct, op.arity, budget)
            if isinstance(v, Unknown):
                report.inconclusive.append(f"arrow {j}: commutation at {op.name} undecided")
            elif not isinstance(v, Equal):
                report.cocone.append(f"arrow {j}: cocone does not commute at {op.name}")

    for m in legal_sizes(C.signature, max_size):
        if m == 0:
            continue
        fams = compatible_families(D, m, max_nodes)
        index = {f.algebras: i for i, f in enumerate(fams)}
        pairing = []
        hit: set[int] = set()
        injective = True
        models = list(enumerate_models(C, m, sizes=[m], max_nodes=max_nodes))
        for i, A in enumerate(models):
            image = tuple(pullback_algebra(A, c.assign, c.source) for c in cocone)
            j = index.get(image, -1)
            pairing.append((i, j))
            if j >= 0:
                if j in hit:
                    injective = False
                hit.add(j)
        injective = injective and all(j >= 0 for _, j in pairing)
        report.sizes.append(SizeReport(m, len(models), len(fams), pairing, injective, len(hit) == len(fams)))
    return report


def _exact_form(t: Term) -> tuple[Term, list[int]]:
    """Rename the variables of t to x0..x(k-1) in increasing index order."""
    vs = sorted(term_vars(t))
    ren = {v: Var(i) for i, v in enumerate(vs)}
    env = [ren.get(i, Var(0)) for i in range(max(vs, default=-1) + 1)]
    return subst(t, env), vs


def canonical_symbols(P: Presentation, depth: int) -> dict[str, tuple[int, Term]]:
    """Symbols of the depth-truncated canonical presentation.

    One symbol of arity k per term of depth <= ``depth`` using exactly the
    variables x0..x(k-1), for k up to the largest arity or equation context
    (at least 1).  The symbol for a generator ``op(x0..)`` keeps the name
    ``op``; the rest are named ``t<k>_<i>``.  Generators come first.
    """
    if depth < P.max_equation_depth:
        raise ContractViolation(
            f"depth {depth} is below the deepest equation ({P.max_equation_depth})"
        )
    sig = P.signature
    N = max([1, sig.max_arity, *(e.ctx for e in P.equations)])
    exact: dict[Term, int] = {}
    for t in enumerate_terms(sig, N, depth):
        s, vs = _exact_form(t)
        exact.setdefault(s, len(vs))
    names: dict[str, tuple[int, Term]] = {}
    for op in sig:
        names[op.name] = (op.arity, _generic(op))
    generic = {_generic(op) for op in sig}
    taken = set(names)
    counters: dict[int, int] = {}
    for s, k in exact.items():
        if s in generic:
            continue
        i = counters.get(k, 0)
        nm = f"t{k}_{i}"
        while nm in taken:
            i += 1
            nm = f"t{k}_{i}"
        counters[k] = i + 1
        taken.add(nm)
        names[nm] = (k, s)
    return names


def canonical_presentation(P: Presentation, depth: int) -> Presentation:
    """Depth-truncated canonical presentation: terms become operation symbols.

    Equations identify each formal application with the term it denotes:
    ``[x0](x0) = x0``, ``[op]([t1](..), .., [tk](..)) = [op(t1..tk)](..)`` and
    every equation of P written with a single formal symbol per side.  Models
    correspond one-to-one with models of P.
    """
    table = canonical_symbols(P, depth)
    symbol = {}
    ops = []
    for nm, (k, s) in table.items():
        op = OpSymbol(nm, k)
        symbol[s] = op
        ops.append(op)
    sig = Signature(ops)
    N = max([1, P.signature.max_arity, *(e.ctx for e in P.equations)])

    def formal(t: Term) -> Term:
        s, vs = _exact_form(t)
        return App(symbol[s], [Var(v) for v in vs])

    eqs = [Equation(1, formal(Var(0)), Var(0), "unit")]
    shallow = list(enumerate_terms(P.signature, N, depth - 1)) if depth >= 1 else []
    for op in P.signature:
        if op.arity == 0:
            continue
        for args in itertools.product(shallow, repeat=op.arity):
            whole = App(op, args)
            lhs = App(symbol[_generic(op)], [formal(a) for a in args])
            rhs = formal(whole)
            if lhs != rhs:
                eqs.append(Equation(N, lhs, rhs, None))
    for e in P.equations:
        eqs.append(Equation(e.ctx, formal(e.lhs), formal(e.rhs), e.label))
    return Presentation(sig, tuple(eqs), f"{P.name}_canonical{depth}")
