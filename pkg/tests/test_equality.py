import itertools

import pytest
from hypothesis import given, settings, strategies as st

from monadpres.algebra import eval_term
from monadpres.catalog import catalog_get
from monadpres.congruence import CongruenceClosure, replay_instances, saturate
from monadpres.equality import (
    Distinct,
    Equal,
    EqualityBudget,
    Unknown,
    completion,
    equal_mod_E,
    find_separating_model,
    normal_form,
    replay,
)
from monadpres.errors import ContractViolation
from monadpres.presentation import Presentation, enumerate_models
from monadpres.rewriting import Rewriter, Rule, apply_sub, complete, critical_pairs, kbo_greater, match, unify
from monadpres.terms import App, OpSymbol, Signature, Var, enumerate_terms

from strategies import terms

MONOID = catalog_get("monoid").presentation
GROUP = catalog_get("group").presentation
MUL = MONOID.signature.lookup("mul")
E = MONOID.signature.lookup("e")
GMUL, GE, INV = (GROUP.signature.lookup(n) for n in ("mul", "e", "inv"))
x0, x1, x2 = Var(0), Var(1), Var(2)


def m(a, b, op=MUL):
    return App(op, [a, b])


def words_monoid():
    """The monoid axioms over two extra generator constants a and b."""
    sig = Signature([E, MUL, OpSymbol("a", 0), OpSymbol("b", 0)])
    return Presentation(sig, MONOID.equations, "Words")


def flatten(t):
    if t.op.arity == 0:
        return () if t.op.name == "e" else (t.op.name,)
    return flatten(t.args[0]) + flatten(t.args[1])


def test_monoid_completes_to_three_rules():
    c = completion(MONOID)
    assert c.ok
    assert {(r.lhs, r.rhs) for r in c.rules} == {
        (m(m(x0, x1), x2), m(x0, m(x1, x2))),
        (m(App(E), x0), x0),
        (m(x0, App(E)), x0),
    }


def test_group_completes_to_ten_rules():
    c = completion(GROUP)
    assert c.ok and len(c.rules) == 10
    rw = Rewriter(c.rules)
    i = lambda t: App(INV, [t])  # noqa: E731
    assert rw.normalize(i(i(x0))) == x0
    assert rw.normalize(i(m(x0, x1, GMUL))) == m(i(x1), i(x0), GMUL)


def test_completion_gives_up_on_commutativity():
    c = completion(catalog_get("commutative-magma").presentation)
    assert not c.ok and "orient" in c.reason


def test_completion_round_budget():
    c = complete(((e.lhs, e.rhs) for e in GROUP.equations), GROUP.signature, max_rounds=3)
    assert not c.ok and c.rounds == 3


def test_normal_form_examples():
    W = words_monoid()
    a, b = App(W.signature.lookup("a")), App(W.signature.lookup("b"))
    assert normal_form(W, m(a, m(App(E), b))) == m(a, b)
    assert normal_form(MONOID, x0, 1) == x0
    assert normal_form(catalog_get("commutative-magma").presentation, x0) is None


def test_fifteen_normal_forms_over_two_generators():
    W = words_monoid()
    ground = [t for t in enumerate_terms(W.signature, 0, 3) if len(flatten(t)) <= 3]
    nfs = {normal_form(W, t) for t in ground}
    words = {flatten(t) for t in ground}
    assert len(nfs) == len(words) == 1 + 2 + 4 + 8
    # normal forms are right-nested words: two terms share one iff they flatten alike
    for s, t in itertools.combinations(ground[:60], 2):
        assert (normal_form(W, s) == normal_form(W, t)) == (flatten(s) == flatten(t))


@settings(max_examples=100, deadline=None)
@given(terms(MONOID.signature, 3, 4))
def test_normal_form_idempotent(t):
    nf = normal_form(MONOID, t, 3)
    assert normal_form(MONOID, nf, 3) == nf


def test_equation_instances_share_normal_forms():
    inner = list(enumerate_terms(MONOID.signature, 2, 1))
    for e in MONOID.equations:
        for env in itertools.product(inner, repeat=e.ctx):
            sub = dict(enumerate(env))
            assert normal_form(MONOID, apply_sub(e.lhs, sub)) == normal_form(MONOID, apply_sub(e.rhs, sub))


@settings(max_examples=200, deadline=None)
@given(terms(GROUP.signature, 2, 3), terms(GROUP.signature, 2, 3), terms(GROUP.signature, 2, 2))
def test_kbo_is_a_strict_order_closed_under_substitution(s, t, u):
    prec = {op: i for i, op in enumerate(GROUP.signature)}
    weights = {GE: 1, GMUL: 1, INV: 0}
    if kbo_greater(s, t, prec, weights):
        assert not kbo_greater(t, s, prec, weights)
        sub = {0: u, 1: App(INV, [u])}
        assert kbo_greater(apply_sub(s, sub), apply_sub(t, sub), prec, weights)
    assert not kbo_greater(s, s, prec, weights)


def test_match_and_unify():
    assert match(m(x0, x1), m(App(E), x2)) == {0: App(E), 1: x2}
    assert match(m(x0, x0), m(App(E), x2)) is None
    sub = unify(m(x0, App(E)), m(m(x1, x2), x1))
    assert sub is not None
    assert apply_sub(apply_sub(m(x0, App(E)), sub), sub) == apply_sub(apply_sub(m(m(x1, x2), x1), sub), sub)
    assert unify(x0, m(x0, x1)) is None


def test_critical_pairs_of_associativity():
    assoc = Rule(m(m(x0, x1), x2), m(x0, m(x1, x2)))
    pairs = list(critical_pairs(assoc, assoc))
    assert pairs
    rw = Rewriter([assoc])
    assert all(rw.normalize(a) == rw.normalize(b) for a, b in pairs)


def test_rewriter_trace_replays():
    rw = Rewriter(completion(MONOID).rules)
    t = m(m(App(E), m(x0, x1)), m(x2, App(E)))
    steps = rw.trace(t)
    cur = t
    for i, path, nxt in steps:
        assert rw.check_step(cur, i, path, nxt)
        cur = nxt
    assert cur == rw.normalize(t) == m(x0, m(x1, x2))
    assert not rw.check_step(t, 0, (), t)


def test_congruence_closure_basics():
    f = OpSymbol("f", 1)
    a = App(OpSymbol("a", 0))
    fa = App(f, [a])
    ffa = App(f, [fa])
    cc = CongruenceClosure()
    cc.add(ffa)
    assert not cc.equal(ffa, a)
    cc.merge(fa, a)
    assert cc.equal(ffa, a)
    assert replay_instances([(fa, a)], App(f, [ffa]), a)
    assert not replay_instances([], fa, a)


def test_saturation_records_replayable_instances():
    C = catalog_get("commutative-monoid").presentation
    eqs = [(e.ctx, e.lhs, e.rhs) for e in C.equations]
    t, u = m(x0, m(x1, x2)), m(x2, m(x1, x0))
    leaves = [x0, x1, x2, App(E)]
    res = saturate(eqs, t, u, leaves, rounds=3)
    assert res.merged
    assert replay_instances([(i.lhs, i.rhs) for i in res.instances], t, u)


def test_equal_mod_e_examples():
    v = equal_mod_E(MONOID, m(x0, m(x1, x2)), m(m(x0, x1), x2), 3)
    assert isinstance(v, Equal) and v.engine == "axiom"
    v = equal_mod_E(MONOID, m(x0, x1), m(x1, x0), 2)
    assert isinstance(v, Distinct)
    assert v.witness.size == 3
    assert replay(MONOID, m(x0, x1), m(x1, x0), 2, v)
    zero = EqualityBudget(kb_rounds=0, inst_depth=0, model_size=0)
    v = equal_mod_E(MONOID, m(App(E), m(x0, App(E))), x0, 1, zero)
    assert isinstance(v, Unknown)
    # an axiom instance is recognised even with nothing to spend
    assert isinstance(equal_mod_E(MONOID, m(App(E), x0), x0, 1, zero), Equal)


def test_malformed_terms_are_rejected():
    with pytest.raises(ContractViolation):
        equal_mod_E(MONOID, x2, x0, 2)


def test_closure_engine_decides_commutative_identities():
    C = catalog_get("commutative-monoid").presentation
    t, u = m(x0, m(x1, x2)), m(x2, m(x1, x0))
    v = equal_mod_E(C, t, u, 3)
    assert isinstance(v, Equal) and v.engine == "closure"
    assert replay(C, t, u, 3, v)
    tampered = Equal("closure", {"instances": v.certificate["instances"][:1]})
    assert not replay(C, t, u, 3, tampered)


def test_model_engine_without_completion():
    C = catalog_get("commutative-monoid").presentation
    v = equal_mod_E(C, m(x0, x0), x0, 1)
    assert isinstance(v, Distinct) and v.engine == "model"
    assert replay(C, m(x0, x0), x0, 1, v)


def test_separating_model_is_smallest():
    A, x = find_separating_model(MONOID, m(x0, x1), m(x1, x0), 2, 3)
    assert A.size == 3
    assert eval_term(A, m(x0, x1), x) != eval_term(A, m(x1, x0), x)
    assert find_separating_model(MONOID, m(x0, x1), m(x1, x0), 2, 2) is None


def test_budget_from_environment():
    b = EqualityBudget.from_env({"MONADPRES_BUDGET": "kb_rounds=5, model_size=2"})
    assert (b.kb_rounds, b.inst_depth, b.model_size) == (5, 2, 2)
    assert EqualityBudget.from_env({}) == EqualityBudget()
    with pytest.raises(ValueError):
        EqualityBudget.from_env({"MONADPRES_BUDGET": "depth=3"})


@pytest.mark.parametrize("name", ["monoid", "group", "commutative-monoid", "semilattice-with-zero"])
def test_verdicts_are_sound_on_small_models(name):
    P = catalog_get(name).presentation
    models = list(enumerate_models(P, 4))
    pool = list(enumerate_terms(P.signature, 2, 2))[:40]
    for t, u in itertools.islice(itertools.combinations(pool, 2), 0, None, 23):
        v = equal_mod_E(P, t, u, 2, EqualityBudget(model_size=2))
        assert replay(P, t, u, 2, v)
        if isinstance(v, Equal):
            for A in models:
                for x in itertools.product(range(A.size), repeat=2):
                    assert eval_term(A, t, x) == eval_term(A, u, x)
