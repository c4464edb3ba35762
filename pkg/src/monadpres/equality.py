"""Deciding equality of terms modulo the equations of a presentation.

Three engines run in a fixed order under an explicit budget:

1. bounded completion; a convergent system decides the question outright;
2. congruence closure over instances found by e-matching;
3. finite model search for a separating model.

The quotient monad itself is never built; these verdicts stand in for it.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .algebra import FiniteAlgebra, _eval
from .congruence import replay_instances, saturate
from .errors import BudgetExceeded
from .presentation import Presentation, legal_sizes, satisfies
from .rewriting import Completion, Rewriter, Rule, complete, match
from .search import search_models
from .terms import App, Term, Var, check_term

__all__ = [
    "EqualityBudget",
    "Equal",
    "Distinct",
    "Unknown",
    "equal_mod_E",
    "normal_form",
    "completion",
    "replay",
    "find_separating_model",
]

BUDGET_ENV = "MONADPRES_BUDGET"


@dataclass(frozen=True)
class EqualityBudget:
    kb_rounds: int = 200
    inst_depth: int = 2
    model_size: int = 3
    max_terms: int = 20000
    max_nodes: int = 200000

    @classmethod
    def from_env(cls, environ=None) -> "EqualityBudget":
        """Defaults, overridden by ``MONADPRES_BUDGET="kb_rounds=50,model_size=2"``."""
        raw = (os.environ if environ is None else environ).get(BUDGET_ENV, "")
        budget = cls()
        for item in filter(None, (s.strip() for s in raw.split(","))):
            key, _, value = item.partition("=")
            if key not in cls.__dataclass_fields__:
                raise ValueError(f"unknown budget field {key!r} in ${BUDGET_ENV}")
            budget = replace(budget, **{key: int(value)})
        return budget


@dataclass(frozen=True)
class Equal:
    engine: str
    certificate: dict = field(hash=False)
    status = "equal"


@dataclass(frozen=True)
class Distinct:
    engine: str
    witness: FiniteAlgebra | None = None
    assignment: tuple[int, ...] | None = None
    certificate: dict = field(default_factory=dict, hash=False)
    status = "distinct"


@dataclass(frozen=True)
class Unknown:
    report: dict = field(hash=False)
    status = "unknown"


@lru_cache(maxsize=64)
def completion(P: Presentation, kb_rounds: int = 200) -> Completion:
    return complete(((e.lhs, e.rhs) for e in P.equations), P.signature, kb_rounds)


def normal_form(P: Presentation, t: Term, ctx: int | None = None, kb_rounds: int = 200) -> Term | None:
    """Canonical representative of ``t`` modulo ``P``, or None when completion gives up."""
    if ctx is not None:
        check_term(P.signature, t, ctx)
    c = completion(P, kb_rounds)
    if not c.ok:
        return None
    return Rewriter(c.rules).normalize(t)


def find_separating_model(
    P: Presentation, t: Term, u: Term, ctx: int, max_size: int, max_nodes: int | None = None
) -> tuple[FiniteAlgebra, tuple[int, ...]] | None:
    """Smallest-carrier model of ``P`` with an assignment telling t and u apart."""
    eqs = [(e.ctx, e.lhs, e.rhs) for e in P.equations]
    for m in legal_sizes(P.signature, max_size):
        if m == 0 and ctx > 0:
            continue
        for A in search_models(P.signature, eqs, m, max_nodes=max_nodes):
            for x in itertools.product(range(m), repeat=ctx):
                if _eval(A, t, x) != _eval(A, u, x):
                    return A, x
    return None


def _axiom_instance(P: Presentation, t: Term, u: Term):
    for k, e in enumerate(P.equations):
        for a, b in ((e.lhs, e.rhs), (e.rhs, e.lhs)):
            sub = match(a, t)
            if sub is not None and match(b, u, sub) is not None:
                return k
    return None


def equal_mod_E(
    P: Presentation, t: Term, u: Term, ctx: int, budget: EqualityBudget | None = None
):
    """Equal, Distinct or Unknown for ``t = u`` in the theory of ``P``."""
    budget = budget or EqualityBudget()
    check_term(P.signature, t, ctx)
    check_term(P.signature, u, ctx)
    report: dict = {}

    if t == u:
        return Equal("syntactic", {})
    k = _axiom_instance(P, t, u)
    if k is not None:
        return Equal("axiom", {"equation": k, "label": P.equations[k].label})

    if budget.kb_rounds > 0:
        c = completion(P, budget.kb_rounds)
        report["completion"] = c.reason or "convergent"
        if c.ok:
            rw = Rewriter(c.rules)
            cert = {
                "rules": [(r.lhs, r.rhs) for r in c.rules],
                "lhs_trace": rw.trace(t),
                "rhs_trace": rw.trace(u),
            }
            nt, nu = rw.normalize(t), rw.normalize(u)
            cert["normal_forms"] = (nt, nu)
            if nt == nu:
                return Equal("completion", cert)
            found = None
            if budget.model_size > 0:
                try:
                    found = find_separating_model(P, t, u, ctx, budget.model_size, budget.max_nodes)
                except BudgetExceeded:
                    found = None
            if found is not None:
                return Distinct("completion+model", found[0], found[1], cert)
            return Distinct("completion", None, None, cert)

    if budget.inst_depth > 0:
        leaves = [Var(i) for i in range(ctx)] + [App(op) for op in P.signature.constants]
        eqs = [(e.ctx, e.lhs, e.rhs) for e in P.equations]
        sat = saturate(eqs, t, u, leaves, budget.inst_depth, budget.max_terms)
        report["closure"] = {"rounds": sat.rounds, "universe": sat.universe, "exhausted": sat.exhausted}
        if sat.merged:
            return Equal(
                "closure",
                {"instances": [(i.equation, i.lhs, i.rhs) for i in sat.instances]},
            )

    if budget.model_size > 0:
        try:
            found = find_separating_model(P, t, u, ctx, budget.model_size, budget.max_nodes)
        except BudgetExceeded:
            found = None
            report["models"] = "node budget exhausted"
        if found is not None:
            return Distinct("model", found[0], found[1], {})
        report.setdefault("models", f"no separating model up to size {budget.model_size}")

    return Unknown(report)


def replay(P: Presentation, t: Term, u: Term, ctx: int, verdict) -> bool:
    """Re-check a verdict's certificate independently of the engine that produced it."""
    if isinstance(verdict, Unknown):
        return True
    if isinstance(verdict, Equal):
        cert = verdict.certificate
        if verdict.engine == "syntactic":
            return t == u
        if verdict.engine == "axiom":
            return _axiom_instance(P, t, u) == cert["equation"]
        if verdict.engine == "completion":
            return _replay_traces(cert, t, u) and cert["normal_forms"][0] == cert["normal_forms"][1]
        if verdict.engine == "closure":
            for k, a, b in cert["instances"]:
                e = P.equations[k]
                ok = any(
                    (s := match(x, a)) is not None and match(y, b, s) is not None
                    for x, y in ((e.lhs, e.rhs), (e.rhs, e.lhs))
                )
                if not ok:
                    return False
            return replay_instances(((a, b) for _, a, b in cert["instances"]), t, u)
        return False
    if isinstance(verdict, Distinct):
        if verdict.witness is not None:
            A, x = verdict.witness, verdict.assignment
            if not satisfies(A, P) or len(x) != ctx:
                return False
            if _eval(A, t, x) == _eval(A, u, x):
                return False
        if verdict.engine.startswith("completion"):
            cert = verdict.certificate
            if not _replay_traces(cert, t, u):
                return False
            nt, nu = cert["normal_forms"]
            return nt != nu
        return verdict.witness is not None
    return False


def _replay_traces(cert: dict, t: Term, u: Term) -> bool:
    rw = Rewriter([Rule(l, r) for l, r in cert["rules"]])
    for start, trace, end in ((t, cert["lhs_trace"], cert["normal_forms"][0]),
                              (u, cert["rhs_trace"], cert["normal_forms"][1])):
        cur = start
        for i, path, nxt in trace:
            if not rw.check_step(cur, i, path, nxt):
                return False
            cur = nxt
        if cur != end or not rw.is_normal(cur):
            return False
    return True
