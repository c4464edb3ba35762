"""Built-in presentations with a known model and a known non-model each."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cache
from typing import Callable

from .algebra import FiniteAlgebra
from .dsl import parse_pres
from .errors import ContractViolation, NotFound
from .presentation import Equation, Presentation, find_violation, satisfies
from .quiver import CategoryPresentation, SetFunctorData, check_functor
from .terms import App, OpSymbol, Signature, Var

__all__ = [
    "CatalogEntry",
    "RigError",
    "catalog_get",
    "catalog_names",
    "instantiate_rig_theory",
    "BOOLEAN_RIG",
    "rig_presentation",
    "delta",
]

_SOURCES = {
    "magma": """
signature Magma
op mul : 2
""",
    "commutative-magma": """
signature CommutativeMagma
op mul : 2
equations
eq comm (2) : mul(x0,x1) = mul(x1,x0)
""",
    "semigroup": """
signature Semigroup
op mul : 2
equations
eq assoc (3) : mul(x0,mul(x1,x2)) = mul(mul(x0,x1),x2)
""",
    "monoid": """
signature Monoid
op e : 0
op mul : 2
equations
eq assoc (3) : mul(x0,mul(x1,x2)) = mul(mul(x0,x1),x2)
eq unitl (1) : mul(e,x0) = x0
eq unitr (1) : mul(x0,e) = x0
""",
    "commutative-monoid": """
signature CommutativeMonoid
op e : 0
op mul : 2
equations
eq assoc (3) : mul(x0,mul(x1,x2)) = mul(mul(x0,x1),x2)
eq unitl (1) : mul(e,x0) = x0
eq unitr (1) : mul(x0,e) = x0
eq comm (2) : mul(x0,x1) = mul(x1,x0)
""",
    "group": """
signature Group
op e : 0
op mul : 2
op inv : 1
equations
eq assoc (3) : mul(x0,mul(x1,x2)) = mul(mul(x0,x1),x2)
eq unitl (1) : mul(e,x0) = x0
eq unitr (1) : mul(x0,e) = x0
eq invl (1) : mul(inv(x0),x0) = e
eq invr (1) : mul(x0,inv(x0)) = e
""",
    "pointed-set": """
signature PointedSet
op pt : 0
""",
    "semilattice-with-zero": """
signature SemilatticeWithZero
op zero : 0
op join : 2
equations
eq assoc (3) : join(x0,join(x1,x2)) = join(join(x0,x1),x2)
eq comm (2) : join(x0,x1) = join(x1,x0)
eq idem (1) : join(x0,x0) = x0
eq unit (1) : join(zero,x0) = x0
""",
    "rig": """
signature Rig
op zero : 0
op one : 0
op add : 2
op mul : 2
equations
eq add_assoc (3) : add(x0,add(x1,x2)) = add(add(x0,x1),x2)
eq add_comm (2) : add(x0,x1) = add(x1,x0)
eq add_unit (1) : add(zero,x0) = x0
eq mul_assoc (3) : mul(x0,mul(x1,x2)) = mul(mul(x0,x1),x2)
eq mul_unitl (1) : mul(one,x0) = x0
eq mul_unitr (1) : mul(x0,one) = x0
eq distl (3) : mul(x0,add(x1,x2)) = add(mul(x0,x1),mul(x0,x2))
eq distr (3) : mul(add(x0,x1),x2) = add(mul(x0,x2),mul(x1,x2))
eq annihl (1) : mul(zero,x0) = zero
eq annihr (1) : mul(x0,zero) = zero
""",
    "commuting-square": """
category CommutingSquare
objects A B C D
edge f : A -> B
edge g : B -> D
edge h : A -> C
edge k : C -> D
rel square : f.g = h.k
""",
    "loop-involution": """
category LoopInvolution
objects O
edge e : O -> O
rel involution : e.e = id(O)
""",
}


@dataclass(frozen=True)
class CatalogEntry:
    """A named presentation with one model and one non-model.

    ``non_model`` is None when the presentation has no equations, since then
    every algebra is a model.
    """

    name: str
    presentation: Presentation | CategoryPresentation
    doc: str
    model: FiniteAlgebra | SetFunctorData
    non_model: FiniteAlgebra | SetFunctorData | None

    def self_test(self) -> None:
        if isinstance(self.presentation, CategoryPresentation):
            ok = check_functor(self.presentation, self.model)
            bad = self.non_model is not None and check_functor(self.presentation, self.non_model)
        else:
            ok = satisfies(self.model, self.presentation)
            bad = self.non_model is not None and satisfies(self.non_model, self.presentation)
        if not ok or bad:
            raise AssertionError(f"catalog entry {self.name} failed its self-test")


def rig_presentation() -> Presentation:
    return parse_pres(_SOURCES["rig"]).presentation


def _fn(sig, size, **funcs):
    return FiniteAlgebra.from_functions(sig, size, funcs)


BOOLEAN_RIG = FiniteAlgebra.from_tables(
    rig_presentation().signature,
    2,
    {"zero": [0], "one": [1], "add": [0, 1, 1, 1], "mul": [0, 0, 0, 1]},
)


class RigError(ContractViolation):
    def __init__(self, equation: Equation, assignment: tuple[int, ...]):
        super().__init__(f"not a rig: {equation} fails at x = {assignment}")
        self.equation = equation
        self.assignment = assignment


def _check_rig(R: FiniteAlgebra) -> dict[str, Callable]:
    rig = rig_presentation()
    if R.signature != rig.signature:
        raise ContractViolation("expected an algebra over the rig signature (zero, one, add, mul)")
    bad = find_violation(R, rig)
    if bad is not None:
        raise RigError(*bad)
    zero, one, add, mul = rig.signature.ops
    return {
        "zero": R.table(zero)[0],
        "one": R.table(one)[0],
        "add": lambda a, b: R.apply(add, (a, b)),
        "mul": lambda a, b: R.apply(mul, (a, b)),
    }


def delta(R: FiniteAlgebra, n: int) -> list[tuple[int, ...]]:
    """Vectors in R^n whose entries sum to one, in lexicographic order."""
    ops = _check_rig(R)
    out = []
    for v in itertools.product(range(R.size), repeat=n):
        total = ops["zero"]
        for r in v:
            total = ops["add"](total, r)
        if total == ops["one"]:
            out.append(v)
    return out


def _affine_name(v) -> str:
    return "a" + "".join(f"_{r}" for r in v)


def instantiate_rig_theory(R: FiniteAlgebra, kind: str, max_arity: int = 3, name: str | None = None) -> Presentation:
    """Presentation of left R-modules (``kind="module"``) or R-affine spaces (``kind="affine"``).

    Module symbols: ``zero``, ``add`` and a unary ``r<i>`` acting by element i.
    Affine symbols: one n-ary ``a_r1_.._rn`` per vector of R^n summing to one,
    for n <= ``max_arity``.
    """
    ops = _check_rig(R)
    elems = range(R.size)
    x0, x1, x2 = Var(0), Var(1), Var(2)
    if kind == "module":
        zero, add = OpSymbol("zero", 0), OpSymbol("add", 2)
        act = [OpSymbol(f"r{i}", 1) for i in elems]
        sig = Signature([zero, add, *act])
        Z = App(zero)

        def A(a, b):
            return App(add, [a, b])

        def S(r, t):
            return App(act[r], [t])

        eqs = [Equation(0, S(r, Z), Z, f"act{r}_zero") for r in elems]
        eqs += [
            Equation(1, A(Z, x0), x0, "unitl"),
            Equation(1, A(x0, Z), x0, "unitr"),
            Equation(1, S(ops["one"], x0), x0, "act_one"),
            Equation(1, S(ops["zero"], x0), Z, "act_zero"),
        ]
        eqs += [
            Equation(1, S(r, S(s, x0)), S(ops["mul"](r, s), x0), f"act{r}_act{s}")
            for r in elems for s in elems
        ]
        eqs += [
            Equation(1, S(ops["add"](r, s), x0), A(S(r, x0), S(s, x0)), f"act{r}_plus{s}")
            for r in elems for s in elems
        ]
        eqs.append(Equation(2, A(x0, x1), A(x1, x0), "comm"))
        eqs += [Equation(2, S(r, A(x0, x1)), A(S(r, x0), S(r, x1)), f"act{r}_add") for r in elems]
        eqs.append(Equation(3, A(x0, A(x1, x2)), A(A(x0, x1), x2), "assoc"))
        return Presentation(sig, tuple(eqs), name or "Module")

    if kind == "affine":
        deltas = {n: delta(R, n) for n in range(max_arity + 1)}
        symbols = {(n, v): OpSymbol(_affine_name(v), n) for n in deltas for v in deltas[n]}
        sig = Signature(symbols.values())
        eqs: list[Equation] = []
        for n in range(max_arity + 1):
            xs = [Var(j) for j in range(n)]
            for i in range(n):
                basis = tuple(ops["one"] if j == i else ops["zero"] for j in range(n))
                if (n, basis) in symbols:
                    eqs.append(Equation(n, App(symbols[n, basis], xs), xs[i], f"proj{n}_{i + 1}"))
        for n in range(max_arity + 1):
            xs = [Var(j) for j in range(n)]
            for m in range(max_arity + 1):
                for rows in itertools.product(deltas[n], repeat=m):
                    for r in deltas[m]:
                        rs = []
                        for j in range(n):
                            total = ops["zero"]
                            for i in range(m):
                                total = ops["add"](total, ops["mul"](r[i], rows[i][j]))
                            rs.append(total)
                        lhs = App(symbols[m, r], [App(symbols[n, s], xs) for s in rows])
                        rhs = App(symbols[n, tuple(rs)], xs)
                        eqs.append(Equation(n, lhs, rhs))
        return Presentation(sig, tuple(eqs), name or "Affine")

    raise ValueError(f"kind must be 'module' or 'affine', not {kind!r}")


def _entry_algebras(name: str, P):
    sig = P.signature if isinstance(P, Presentation) else None
    lproj = lambda a, b: a  # noqa: E731
    xor = lambda a, b: a ^ b  # noqa: E731
    if name == "magma":
        return _fn(sig, 2, mul=lproj), None
    if name == "commutative-magma":
        return _fn(sig, 2, mul=xor), _fn(sig, 2, mul=lproj)
    if name == "semigroup":
        return _fn(sig, 2, mul=lproj), _fn(sig, 2, mul=lambda a, b: 1 - a)
    if name == "monoid":
        return _fn(sig, 2, e=lambda: 0, mul=xor), _fn(sig, 2, e=lambda: 0, mul=lproj)
    if name == "commutative-monoid":
        # {1, a, b} with a, b left zeros: a monoid that is not commutative
        lz = lambda a, b: b if a == 0 else a  # noqa: E731
        return _fn(sig, 2, e=lambda: 0, mul=xor), _fn(sig, 3, e=lambda: 0, mul=lz)
    if name == "group":
        return (
            _fn(sig, 2, e=lambda: 0, mul=xor, inv=lambda a: a),
            _fn(sig, 2, e=lambda: 1, mul=lambda a, b: a & b, inv=lambda a: a),
        )
    if name == "pointed-set":
        return _fn(sig, 2, pt=lambda: 0), None
    if name == "semilattice-with-zero":
        return _fn(sig, 2, zero=lambda: 0, join=max), _fn(sig, 2, zero=lambda: 0, join=xor)
    if name == "rig":
        bad = _fn(sig, 2, zero=lambda: 0, one=lambda: 1, add=lambda a, b: a & b, mul=lambda a, b: a & b)
        return BOOLEAN_RIG, bad
    if name == "module-over-B":
        acts = {"r0": lambda a: 0, "r1": lambda a: a}
        return (
            _fn(sig, 2, zero=lambda: 0, add=max, **acts),
            _fn(sig, 2, zero=lambda: 0, add=lproj, **acts),
        )
    if name == "affine-over-B":
        model = {op.name: (lambda *xs, _op=op: max(x for x, r in zip(xs, _coeffs(_op)) if r)) for op in sig}
        first = {op.name: (lambda *xs: xs[0]) for op in sig}
        return _fn(sig, 2, **model), _fn(sig, 2, **first)
    if name == "commuting-square":
        sets = {o: 2 for o in "ABCD"}
        ident, swap = (0, 1), (1, 0)
        return (
            SetFunctorData(sets, {"f": ident, "g": ident, "h": ident, "k": ident}),
            SetFunctorData(sets, {"f": ident, "g": ident, "h": ident, "k": swap}),
        )
    if name == "loop-involution":
        return SetFunctorData({"O": 2}, {"e": (1, 0)}), SetFunctorData({"O": 2}, {"e": (0, 0)})
    raise NotFound(name, catalog_names())


def _coeffs(op: OpSymbol) -> list[int]:
    return [int(c) for c in op.name.split("_")[1:]]


_DOCS = {
    "magma": "One binary operation, no equations.",
    "commutative-magma": "A binary operation subject to commutativity.",
    "semigroup": "An associative binary operation.",
    "monoid": "Unit and associative multiplication: the classical finitary presentation.",
    "commutative-monoid": "Monoid axioms plus commutativity.",
    "group": "Monoid axioms plus two-sided inverses.",
    "pointed-set": "A single constant.",
    "semilattice-with-zero": "Associative, commutative, idempotent join with a unit.",
    "rig": "Unital semiring: additive commutative monoid, multiplicative monoid, distributivity, annihilation.",
    "module-over-B": "Left modules over the two-element Boolean rig: a commutative monoid with one unary action per rig element.",
    "affine-over-B": "Affine spaces over the Boolean rig: one n-ary combination per coefficient vector summing to one (n <= 3).",
    "commuting-square": "Four objects, two composable pairs and one relation making the square commute.",
    "loop-involution": "One object, one loop, and the relation that the loop squares to the identity.",
}


def catalog_names() -> list[str]:
    return list(_DOCS)


@cache
def catalog_get(name: str) -> CatalogEntry:
    if name not in _DOCS:
        raise NotFound(name, catalog_names())
    if name == "module-over-B":
        P = instantiate_rig_theory(BOOLEAN_RIG, "module", name="ModuleOverB")
    elif name == "affine-over-B":
        P = instantiate_rig_theory(BOOLEAN_RIG, "affine", name="AffineOverB")
    else:
        P = parse_pres(_SOURCES[name]).presentation
    model, non_model = _entry_algebras(name, P)
    entry = CatalogEntry(name, P, _DOCS[name], model, non_model)
    entry.self_test()
    return entry
