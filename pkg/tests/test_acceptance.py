"""The twelve acceptance criteria, each timed and reported on one line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS/FAIL lines.
"""

import contextlib
import itertools
import json
import os
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from monadpres.algebra import em_law_check, enumerate_algebras, eval_term
from monadpres.catalog import BOOLEAN_RIG, catalog_get, delta, instantiate_rig_theory
from monadpres.colimit import (
    Arrow,
    MonadDiagram,
    canonical_presentation,
    coequalizer,
    coproduct_with_injections,
    verify_algebraic,
)
from monadpres.dsl import parse_term
from monadpres.equality import Distinct, Equal, completion, equal_mod_E, normal_form, replay
from monadpres.presentation import Presentation, enumerate_models, model_counts
from monadpres.quiver import check_functor, enumerate_functors, quotient_hom
from monadpres.terms import App, OpSymbol, Signature, SignatureMorphism, Var, enumerate_terms, subst

from oracles import as_tuple, brute_models, count_monoids, evaluate, module_oracle_tables, presentation_as_tuples, stage_count, words

MONOID = catalog_get("monoid").presentation
GROUP = catalog_get("group").presentation
MUL = MONOID.signature.lookup("mul")


@contextlib.contextmanager
def criterion(capsys, number, title, limit=None):
    """Time the body, enforce the limit, and print one verdict line."""
    note = {}
    start = time.perf_counter()
    failure = None
    try:
        yield note
    except Exception as exc:  # reported, then re-raised
        failure = exc
    elapsed = time.perf_counter() - start
    if failure is None and limit is not None and elapsed >= limit:
        failure = AssertionError(f"took {elapsed:.2f}s, limit {limit}s")
    verdict = "PASS" if failure is None else "FAIL"
    bound = f" (limit {limit}s)" if limit is not None else ""
    extra = f" [{note['detail']}]" if "detail" in note else ""
    with capsys.disabled():
        print(f"\ncriterion {number:2d} {verdict}: {title} in {elapsed:.2f}s{bound}{extra}")
    if failure is not None:
        raise failure


# 1 -----------------------------------------------------------------------

FULL_STAGE = 3000
SAMPLES_PER_DEPTH = 300


def random_term(rng, sig, ctx, depth):
    """A term of depth exactly ``depth`` (or a variable at depth 0)."""
    if depth == 0:
        return Var(rng.randrange(ctx))
    ops = [op for op in sig if op.arity > 0] if depth > 1 else list(sig)
    op = rng.choice(ops)
    if op.arity == 0:
        return App(op)
    deep = rng.randrange(op.arity)
    args = [random_term(rng, sig, ctx, depth - 1 if i == deep else rng.randrange(depth)) for i in range(op.arity)]
    return App(op, args)


def monad_laws_hold(t, ctx, sigma, tau):
    ident = [Var(i) for i in range(ctx)]
    if subst(t, ident) != t:
        return False
    if any(subst(Var(i), sigma) != sigma[i] for i in range(ctx)):
        return False
    composed = [subst(s, tau) for s in sigma]
    return subst(subst(t, sigma), tau) == subst(t, composed)


def test_c01_monad_laws(capsys):
    rng = random.Random(1)
    with criterion(capsys, 1, "unit and associativity of substitution", 5.0) as note:
        exhaustive = sampled = 0
        for name in ("magma", "monoid", "pointed-set"):
            sig = catalog_get(name).presentation.signature
            arities = [op.arity for op in sig]
            for ctx in (1, 2, 3):
                sigma = [random_term(rng, sig, ctx, 1) for _ in range(ctx)]
                tau = [random_term(rng, sig, ctx, 1) for _ in range(ctx)]
                full = max(d for d in range(5) if stage_count(arities, ctx, d) <= FULL_STAGE)
                for t in enumerate_terms(sig, ctx, full):
                    assert monad_laws_hold(t, ctx, sigma, tau), (name, ctx, t)
                    exhaustive += 1
                for depth in range(full + 1, 5):
                    for _ in range(SAMPLES_PER_DEPTH):
                        t = random_term(rng, sig, ctx, depth)
                        assert monad_laws_hold(t, ctx, sigma, tau), (name, ctx, t)
                        sampled += 1
        sig = MONOID.signature
        for _ in range(1000):
            n, k, j = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 3)
            t = random_term(rng, sig, n, rng.randint(0, 3))
            sigma = [random_term(rng, sig, k, rng.randint(0, 2)) for _ in range(n)]
            tau = [random_term(rng, sig, j, rng.randint(0, 2)) for _ in range(k)]
            assert subst(subst(t, sigma), tau) == subst(t, [subst(s, tau) for s in sigma])
        note["detail"] = (
            f"{exhaustive} terms exhaustively, {sampled} sampled where a stage exceeds {FULL_STAGE} terms, "
            "1000 random associativity instances"
        )


# 2 -----------------------------------------------------------------------


def test_c02_free_monad_chain(capsys):
    with criterion(capsys, 2, "stage counts follow the recurrence", 1.0):
        for name in ("magma", "monoid", "pointed-set"):
            sig = catalog_get(name).presentation.signature
            arities = [op.arity for op in sig]
            for ctx in (1, 2, 3):
                per_depth = [0] * 4
                for t in enumerate_terms(sig, ctx, 3):
                    per_depth[t.depth] += 1
                sizes = list(itertools.accumulate(per_depth))
                assert sizes == [stage_count(arities, ctx, d) for d in range(4)], (name, ctx)
        magma = catalog_get("magma").presentation.signature
        assert [sum(1 for _ in enumerate_terms(magma, 1, d)) for d in range(4)] == [1, 2, 5, 26]


# 3 -----------------------------------------------------------------------


def test_c03_term_algebras_are_signature_algebras(capsys):
    rng = random.Random(3)
    magma = catalog_get("magma").presentation.signature
    with criterion(capsys, 3, "Eilenberg-Moore laws for every binary table on 2 elements", 10.0):
        algebras = list(enumerate_algebras(magma, 2))
        assert len(algebras) == 16
        assert all(em_law_check(A, 2) for A in algebras)
        for _ in range(1000):
            A = rng.choice(algebras)
            n, k = rng.randint(1, 3), rng.randint(1, 3)
            t = random_term(rng, magma, n, rng.randint(0, 3))
            sigma = [random_term(rng, magma, k, rng.randint(0, 2)) for _ in range(n)]
            x = [rng.randrange(2) for _ in range(k)]
            inner = [eval_term(A, s, x) for s in sigma]
            assert eval_term(A, subst(t, sigma), x) == eval_term(A, t, inner)
            tables = {"mul": dict(zip(itertools.product(range(2), repeat=2), A.tables[0]))}
            assert evaluate(as_tuple(t), tables, inner) == eval_term(A, t, inner)


# 4 -----------------------------------------------------------------------


def test_c04_presentation_models(capsys):
    with criterion(capsys, 4, "monoid counts 1, 4 and commutative magma count 8", 10.0):
        counts = model_counts(MONOID, 2)
        assert counts == {1: 1, 2: 4} == {m: count_monoids(m) for m in (1, 2)}
        comm = catalog_get("commutative-magma").presentation
        assert model_counts(comm, 2)[2] == 8 == len(brute_models(*presentation_as_tuples(comm), 2))


# 5 -----------------------------------------------------------------------

MONOID_PAIRS = [
    ("mul(x0,mul(x1,x2))", "mul(mul(x0,x1),x2)"),
    ("mul(e,x0)", "x0"),
    ("mul(x0,e)", "x0"),
    ("mul(e,e)", "e"),
    ("mul(e,mul(x0,e))", "x0"),
    ("mul(mul(x0,e),mul(e,x1))", "mul(x0,x1)"),
    ("mul(mul(x0,x1),mul(x2,x0))", "mul(x0,mul(mul(x1,x2),x0))"),
    ("mul(mul(mul(x0,x1),x2),x0)", "mul(x0,mul(x1,mul(x2,x0)))"),
    ("mul(x0,mul(e,mul(x1,e)))", "mul(mul(x0,x1),e)"),
    ("mul(mul(e,x2),mul(x1,e))", "mul(x2,x1)"),
    ("mul(x0,x1)", "mul(x1,x0)"),
    ("mul(x0,x0)", "x0"),
    ("mul(x0,x1)", "x0"),
    ("mul(x0,x1)", "e"),
    ("mul(x0,mul(x1,x0))", "mul(x1,mul(x0,x0))"),
    ("mul(x0,x0)", "e"),
    ("mul(x0,mul(x1,x2))", "mul(x2,mul(x1,x0))"),
    ("mul(mul(x0,x1),x1)", "mul(x0,x1)"),
    ("x0", "x1"),
    ("mul(x0,mul(x0,x0))", "x0"),
    ("mul(x0,x1)", "mul(x0,mul(x1,x1))"),
    ("mul(e,x1)", "mul(x1,e)"),
    ("mul(mul(x1,x0),e)", "mul(x1,mul(e,x0))"),
    ("e", "mul(e,mul(e,e))"),
    ("mul(x2,x2)", "mul(x2,mul(e,x2))"),
]

GROUP_PAIRS = [
    ("mul(inv(x0),x0)", "e"),
    ("mul(x0,inv(x0))", "e"),
    ("inv(inv(x0))", "x0"),
    ("inv(e)", "e"),
    ("inv(mul(x0,x1))", "mul(inv(x1),inv(x0))"),
    ("mul(inv(x0),mul(x0,x1))", "x1"),
    ("mul(x0,mul(inv(x0),x1))", "x1"),
    ("mul(mul(x0,x1),inv(x1))", "x0"),
    ("inv(mul(inv(x0),x1))", "mul(inv(x1),x0)"),
    ("mul(x0,mul(x1,x2))", "mul(mul(x0,x1),x2)"),
    ("inv(inv(inv(x0)))", "inv(x0)"),
    ("mul(inv(mul(x0,x1)),x0)", "inv(x1)"),
    ("mul(e,inv(x2))", "inv(mul(x2,e))"),
    ("mul(mul(x0,inv(x1)),x1)", "x0"),
    ("inv(mul(x0,mul(x1,x2)))", "mul(inv(x2),mul(inv(x1),inv(x0)))"),
    ("mul(x0,x1)", "mul(x1,x0)"),
    ("mul(x0,x0)", "e"),
    ("inv(x0)", "x0"),
    ("mul(x0,mul(x0,x0))", "e"),
    ("inv(mul(x0,x1))", "mul(inv(x0),inv(x1))"),
    ("x0", "e"),
    ("mul(x0,mul(x1,inv(x0)))", "x1"),
    ("mul(inv(x0),inv(x1))", "inv(mul(x0,x1))"),
    ("mul(x0,x1)", "x1"),
    ("x0", "x2"),
]


def agrees_everywhere(models, t, u, ctx):
    ta, ua = as_tuple(t), as_tuple(u)
    for tables, m in models:
        for x in itertools.product(range(m), repeat=ctx):
            if evaluate(ta, tables, x) != evaluate(ua, tables, x):
                return False
    return True


def oracle_tables(P, max_size):
    """Models as oracle table dicts, each paired with its carrier size."""
    out = []
    for A in enumerate_models(P, max_size):
        tables = {
            op.name: dict(zip(itertools.product(range(A.size), repeat=op.arity), A.table(op)))
            for op in P.signature
        }
        out.append((tables, A.size))
    return out


def test_c05_quotient_soundness(capsys):
    assert len(MONOID_PAIRS) + len(GROUP_PAIRS) == 50
    with criterion(capsys, 5, "Equal verdicts hold in every model of size at most 3", 60.0) as note:
        verdicts = {"equal": 0, "distinct": 0, "unknown": 0}
        for P, pairs in ((MONOID, MONOID_PAIRS), (GROUP, GROUP_PAIRS)):
            models = oracle_tables(P, 3)
            for lhs, rhs in pairs:
                t, u = parse_term(lhs, P.signature, 3), parse_term(rhs, P.signature, 3)
                v = equal_mod_E(P, t, u, 3)
                verdicts[v.status] += 1
                assert replay(P, t, u, 3, v), (lhs, rhs)
                if isinstance(v, Equal):
                    assert agrees_everywhere(models, t, u, 3), (lhs, rhs)
                if isinstance(v, Distinct) and v.witness is not None:
                    assert eval_term(v.witness, t, v.assignment) != eval_term(v.witness, u, v.assignment)
        comm = equal_mod_E(MONOID, App(MUL, [Var(0), Var(1)]), App(MUL, [Var(1), Var(0)]), 2)
        assert isinstance(comm, Distinct) and comm.witness.size == 3
        x = comm.assignment
        assert comm.witness.apply(MUL, x) != comm.witness.apply(MUL, x[::-1])
        note["detail"] = ", ".join(f"{k} {n}" for k, n in verdicts.items())


# 6 -----------------------------------------------------------------------


def test_c06_normal_forms(capsys):
    with criterion(capsys, 6, "15 normal forms for words of length at most 3", 5.0):
        assert completion(MONOID).ok
        sig = Signature([*MONOID.signature, OpSymbol("a", 0), OpSymbol("b", 0)])
        W = Presentation(sig, MONOID.equations, "Words")

        def flatten(t):
            if t.op.arity == 0:
                return () if t.op.name == "e" else (t.op.name,)
            return flatten(t.args[0]) + flatten(t.args[1])

        ground = [t for t in enumerate_terms(sig, 0, 3) if len(flatten(t)) <= 3]
        nfs = {normal_form(W, t) for t in ground}
        assert len(nfs) == len(words("ab", 3)) == 15
        assert {flatten(t) for t in nfs} == set(words("ab", 3))


# 7 -----------------------------------------------------------------------


def test_c07_coproduct(capsys):
    with criterion(capsys, 7, "coproduct of monoids has 16 = 4 x 4 models on 2 elements", 30.0):
        cp = coproduct_with_injections(MONOID, MONOID)
        report = verify_algebraic(MonadDiagram((MONOID, MONOID)), cp.presentation, [cp.left, cp.right], 2)
        size2 = report.sizes[-1]
        assert (size2.size, size2.colimit_models, size2.families) == (2, 16, 16)
        assert size2.injective and size2.surjective and report.ok
        assert sorted(j for _, j in size2.pairing) == list(range(16))


# 8 -----------------------------------------------------------------------


def test_c08_coequalizer(capsys):
    gamma = Signature.of(c=2)
    c = gamma.lookup("c")
    t = SignatureMorphism(gamma, MONOID.signature, {c: App(MUL, [Var(0), Var(1)])})
    u = SignatureMorphism(gamma, MONOID.signature, {c: App(MUL, [Var(1), Var(0)])})
    with criterion(capsys, 8, "coequalizer models are exactly the commutative monoids", 60.0):
        Q = coequalizer(gamma, t, u, MONOID)
        comm = catalog_get("commutative-monoid").presentation
        for m in (1, 2, 3):
            ours = set(enumerate_models(Q, 3, sizes=[m]))
            assert ours == set(enumerate_models(comm, 3, sizes=[m]))
            # membership: a monoid belongs iff the two parallel terms agree in it
            members = {
                A for A in enumerate_models(MONOID, 3, sizes=[m])
                if all(A.apply(MUL, (a, b)) == A.apply(MUL, (b, a)) for a in range(m) for b in range(m))
            }
            assert ours == members
        D = MonadDiagram((Presentation(gamma, (), "Gamma"), MONOID), (Arrow(0, 1, t), Arrow(0, 1, u)))
        cocone = [SignatureMorphism(gamma, Q.signature, dict(t.assign)), SignatureMorphism.identity(MONOID.signature)]
        assert verify_algebraic(D, Q, cocone, 3).ok


# 9 -----------------------------------------------------------------------


def test_c09_canonical_presentation(capsys):
    with criterion(capsys, 9, "depth-2 canonical presentation keeps the monoid model counts", 60.0):
        can = canonical_presentation(MONOID, 2)
        assert model_counts(can, 3) == model_counts(MONOID, 3) == {1: 1, 2: 4, 3: 33}
        assert count_monoids(3) == 33


# 10 ----------------------------------------------------------------------


def compose(F, edges, x):
    for e in edges:
        x = F.maps[e][x]
    return x


def test_c10_quiver(capsys):
    square = catalog_get("commuting-square").presentation
    loop = catalog_get("loop-involution").presentation
    with criterion(capsys, 10, "quiver quotients and the exhaustive functor check", 10.0):
        assert len(quotient_hom(square, "A", "D", 3)) == 1
        assert len(quotient_hom(loop, "O", "O", 3)) == 2
        for CP in (square, loop):
            for F in enumerate_functors(CP.quiver, 2):
                direct = all(
                    compose(F, r.lhs.edges, x) == compose(F, r.rhs.edges, x)
                    for r in CP.relations
                    for x in range(F.sets[r.lhs.source])
                )
                assert check_functor(CP, F) == direct


# 11 ----------------------------------------------------------------------


def test_c11_rig_instantiations(capsys):
    with criterion(capsys, 11, "modules and affine spaces over the Boolean rig", 10.0):
        P = instantiate_rig_theory(BOOLEAN_RIG, "module")
        sig = P.signature
        ours = sorted(
            (A.table(sig.lookup("zero"))[0], A.table(sig.lookup("add"))) for A in enumerate_models(P, 2, sizes=[2])
        )
        assert ours == sorted(module_oracle_tables(2))
        assert len(delta(BOOLEAN_RIG, 2)) == 3
        direct = [v for v in itertools.product((0, 1), repeat=2) if max(v) == 1]
        assert len(direct) == 3
        affine = instantiate_rig_theory(BOOLEAN_RIG, "affine", max_arity=2)
        assert len([op for op in affine.signature if op.arity == 2]) == 3


# 12 ----------------------------------------------------------------------

RUNNER = """
import json, sys
sys.path.insert(0, {tests!r})
from test_cli import CORPUS_COMMANDS
from monadpres.cli import run_command
out = []
for argv in CORPUS_COMMANDS:
    for prefix in ([], ["--json"]):
        out.append(run_command(prefix + argv))
sys.stdout.write(json.dumps(out))
"""


def test_c12_determinism(capsys):
    tests = str(Path(__file__).parent)
    script = RUNNER.format(tests=tests)
    with criterion(capsys, 12, "two runs of the CLI corpus are byte-identical") as note:
        runs = []
        for seed in ("1", "2"):
            env = dict(os.environ, PYTHONHASHSEED=seed)
            env.pop("MONADPRES_BUDGET", None)
            proc = subprocess.run([sys.executable, "-c", script], capture_output=True, env=env, check=True)
            runs.append(proc.stdout)
        assert runs[0] == runs[1]
        note["detail"] = f"{len(json.loads(runs[0]))} reports"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
