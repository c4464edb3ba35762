import pytest
from hypothesis import given, settings, strategies as st

from monadpres.errors import BudgetExceeded, ContractViolation
from monadpres.terms import (
    App,
    OpSymbol,
    Signature,
    SignatureMorphism,
    Var,
    check_term,
    enumerate_terms,
    extend_morphism,
    polynomial_apply,
    polynomial_elements,
    stage_sizes,
    subst,
    unit_var,
)

from oracles import stage_count
from strategies import terms

MAGMA = Signature.of(mul=2)
MONOID = Signature.of(e=0, mul=2)
POINTED = Signature.of(pt=0)
MUL = MONOID.lookup("mul")
E = MONOID.lookup("e")


def test_unit_var():
    assert unit_var(0, 1) == Var(0)
    assert unit_var(2, 3) == Var(2)
    assert unit_var(2, 3).depth == 0
    with pytest.raises(ContractViolation):
        unit_var(1, 1)


def test_opsymbol_validation():
    with pytest.raises(ContractViolation):
        OpSymbol("", 1)
    with pytest.raises(ContractViolation):
        OpSymbol("f", -1)
    with pytest.raises(ContractViolation):
        Signature([OpSymbol("f", 1), OpSymbol("f", 1)])


def test_depth_and_structural_equality():
    t = App(MUL, [Var(0), App(E)])
    assert t.depth == 2
    assert App(E).depth == 1
    assert t == App(MUL, [Var(0), App(E)])
    assert hash(t) == hash(App(MUL, [Var(0), App(E)]))
    assert repr(t) == "mul(x0,e)"


def test_check_term_rejects_out_of_context():
    with pytest.raises(ContractViolation):
        check_term(MAGMA, App(MAGMA.lookup("mul"), [Var(0), Var(1)]), 1)
    with pytest.raises(ContractViolation):
        check_term(MAGMA, App(E), 0)


def test_subst_examples():
    t = App(MUL, [Var(1), Var(0)])
    assert subst(Var(0), [t]) == t
    u, v = App(E), Var(0)
    assert subst(App(MUL, [Var(0), Var(1)]), [u, v]) == App(MUL, [u, v])
    with pytest.raises(ContractViolation):
        subst(App(MUL, [Var(0), Var(1)]), [u], ctx=2)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_subst_associative(data):
    t = data.draw(terms(MONOID, 2, 4))
    sigma = data.draw(st.lists(terms(MONOID, 3, 2), min_size=2, max_size=2))
    tau = data.draw(st.lists(terms(MONOID, 2, 2), min_size=3, max_size=3))
    left = subst(subst(t, sigma), tau)
    right = subst(t, [subst(s, tau) for s in sigma])
    assert left == right


@settings(max_examples=200, deadline=None)
@given(terms(MONOID, 3, 4))
def test_subst_unit_laws(t):
    assert subst(t, [Var(i) for i in range(3)]) == t
    env = [App(E), Var(0), App(MUL, [Var(0), Var(0)])]
    for i in range(3):
        assert subst(Var(i), env) == env[i]


def test_polynomial_apply_examples():
    assert polynomial_apply(Signature.of(e=0, m=2), 3) == 10
    assert polynomial_apply(Signature(), 5) == 0
    assert polynomial_apply(Signature.of(u=1), 4) == 4
    assert len(list(polynomial_elements(Signature.of(e=0, m=2), range(3)))) == 10


@pytest.mark.parametrize("depth,expected", [(0, 1), (1, 2), (2, 5), (3, 26)])
def test_magma_stage_counts(depth, expected):
    assert len(list(enumerate_terms(MAGMA, 1, depth))) == expected


@pytest.mark.parametrize("sig", [MAGMA, MONOID, POINTED], ids=["magma", "monoid", "pointed"])
@pytest.mark.parametrize("ctx", [0, 1, 2, 3])
def test_stage_law(sig, ctx):
    arities = [op.arity for op in sig]
    stage = list(enumerate_terms(sig, ctx, 0))
    for d in range(3):
        nxt = list(enumerate_terms(sig, ctx, d + 1))
        assert len(nxt) == ctx + len(list(polynomial_elements(sig, stage)))
        assert len(nxt) == stage_count(arities, ctx, d + 1)
        # each stage extends the previous one, without duplicates
        assert nxt[: len(stage)] == stage
        assert len(set(nxt)) == len(nxt)
        stage = nxt
    # depth 4 is too large to list for magma; compare cardinalities only
    assert ctx + polynomial_apply(sig, len(stage)) == stage_count(arities, ctx, 4)


def test_enumeration_edge_cases():
    assert list(enumerate_terms(Signature(), 3, 5)) == [Var(0), Var(1), Var(2)]
    assert list(enumerate_terms(POINTED, 0, 1)) == [App(POINTED.lookup("pt"))]
    with pytest.raises(BudgetExceeded):
        list(enumerate_terms(MAGMA, 2, 4, cap=100))


def test_enumeration_order_is_depth_then_symbol():
    ts = list(enumerate_terms(MONOID, 1, 2))
    assert ts[:3] == [Var(0), App(E), App(MUL, [Var(0), Var(0)])]
    assert [t.depth for t in ts] == sorted(t.depth for t in ts)


def test_stage_stabilization():
    assert stage_sizes(POINTED, 2, 3) == ([2, 3, 3, 3], 1)
    sizes, stable = stage_sizes(MAGMA, 1, 3)
    assert sizes == [1, 2, 5, 26] and stable is None


def test_extend_morphism_examples():
    gamma = Signature.of(p=2)
    p = gamma.lookup("p")
    swap = SignatureMorphism(gamma, MONOID, {p: App(MUL, [Var(1), Var(0)])})
    assert extend_morphism(swap, App(p, [Var(0), Var(1)])) == App(MUL, [Var(1), Var(0)])
    assert extend_morphism(swap, Var(2)) == Var(2)
    with pytest.raises(ContractViolation):
        extend_morphism(swap, App(E))


def test_signature_morphism_validation():
    gamma = Signature.of(p=2)
    with pytest.raises(ContractViolation):
        SignatureMorphism(gamma, MONOID, {gamma.lookup("p"): Var(2)})
    with pytest.raises(ContractViolation):
        SignatureMorphism(gamma, MONOID, {})


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_extend_morphism_commutes_with_subst(data):
    gamma = Signature.of(c=0, p=2)
    mor = SignatureMorphism(
        gamma, MONOID, {gamma.lookup("c"): App(E), gamma.lookup("p"): App(MUL, [Var(1), App(MUL, [Var(0), Var(1)])])}
    )
    t = data.draw(terms(gamma, 2, 3))
    env = data.draw(st.lists(terms(gamma, 2, 2), min_size=2, max_size=2))
    assert extend_morphism(mor, subst(t, env)) == subst(extend_morphism(mor, t), [extend_morphism(mor, s) for s in env])


def test_morphism_composition():
    ident = SignatureMorphism.identity(MONOID)
    t = App(MUL, [App(E), Var(0)])
    assert extend_morphism(ident, t) == t
    gamma = Signature.of(p=2)
    p = gamma.lookup("p")
    swap = SignatureMorphism(gamma, MONOID, {p: App(MUL, [Var(1), Var(0)])})
    assert swap.then(ident)(p) == swap(p)
