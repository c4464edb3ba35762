"""Term rewriting and bounded Knuth-Bendix completion.

The reduction order is the Knuth-Bendix order: compare total weight first,
then symbol precedence (later-declared symbols are bigger), then arguments
left to right.  Variables and symbols weigh 1, except that a unary symbol
declared last weighs 0, which is what lets inverse laws orient.  The usual
variable-count condition makes it a reduction order.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .terms import App, Signature, Term, Var

__all__ = [
    "Rule",
    "Completion",
    "kbo_greater",
    "kbo_weights",
    "match",
    "unify",
    "apply_sub",
    "complete",
    "Rewriter",
]

Sub = dict  # variable index -> Term


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs!r} -> {self.rhs!r}"


def _var_counts(t: Term) -> Counter:
    c: Counter = Counter()
    stack = [t]
    while stack:
        s = stack.pop()
        if type(s) is Var:
            c[s.index] += 1
        else:
            stack.extend(s.args)
    return c


def kbo_weights(signature: Signature) -> dict:
    weights = {op: 1 for op in signature}
    if len(signature) and signature.ops[-1].arity == 1:
        weights[signature.ops[-1]] = 0
    return weights


def _weight(t: Term, weights: Mapping | None) -> int:
    if weights is None:
        return t.size
    if type(t) is Var:
        return 1
    return weights.get(t.op, 1) + sum(_weight(a, weights) for a in t.args)


def kbo_greater(s: Term, t: Term, prec: Mapping, weights: Mapping | None = None) -> bool:
    if s == t:
        return False
    vs, vt = _var_counts(s), _var_counts(t)
    if any(vs[v] < n for v, n in vt.items()):
        return False
    return _kbo(s, t, prec, weights)


def _kbo(s: Term, t: Term, prec: Mapping, weights: Mapping | None) -> bool:
    # variable condition already checked by the caller
    ws, wt = _weight(s, weights), _weight(t, weights)
    if ws != wt:
        return ws > wt
    if type(s) is Var:
        return False
    if type(t) is Var:
        # s = f(f(..f(t))) with f of weight 0
        return True
    ps, pt = prec[s.op], prec[t.op]
    if ps != pt:
        return ps > pt
    for a, b in zip(s.args, t.args):
        if a != b:
            return kbo_greater(a, b, prec, weights)
    return False


def apply_sub(t: Term, sub: Mapping[int, Term]) -> Term:
    if type(t) is Var:
        return sub.get(t.index, t)
    if not t.args:
        return t
    return App(t.op, [apply_sub(a, sub) for a in t.args])


def match(pattern: Term, term: Term, sub: Sub | None = None) -> Sub | None:
    """Substitution ``s`` with ``apply_sub(pattern, s) == term``, extending ``sub``."""
    sub = {} if sub is None else dict(sub)
    stack = [(pattern, term)]
    while stack:
        p, t = stack.pop()
        if type(p) is Var:
            bound = sub.get(p.index)
            if bound is None:
                sub[p.index] = t
            elif bound != t:
                return None
        elif type(t) is App and t.op == p.op:
            stack.extend(zip(p.args, t.args))
        else:
            return None
    return sub


def _walk(t: Term, sub: Sub) -> Term:
    while type(t) is Var and t.index in sub:
        t = sub[t.index]
    return t


def _occurs(v: int, t: Term, sub: Sub) -> bool:
    t = _walk(t, sub)
    if type(t) is Var:
        return t.index == v
    return any(_occurs(v, a, sub) for a in t.args)


def unify(s: Term, t: Term) -> Sub | None:
    """Most general unifier of ``s`` and ``t`` (fully resolved), or None."""
    sub: Sub = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, sub), _walk(b, sub)
        if a == b:
            continue
        if type(a) is Var:
            if _occurs(a.index, b, sub):
                return None
            sub[a.index] = b
        elif type(b) is Var:
            if _occurs(b.index, a, sub):
                return None
            sub[b.index] = a
        elif a.op == b.op:
            stack.extend(zip(a.args, b.args))
        else:
            return None

    def resolve(x: Term) -> Term:
        x = _walk(x, sub)
        if type(x) is Var or not x.args:
            return x
        return App(x.op, [resolve(y) for y in x.args])

    return {v: resolve(Var(v)) for v in sub}


def _max_var(t: Term) -> int:
    c = _var_counts(t)
    return max(c, default=-1)


def _rename(rule: Rule, offset: int) -> Rule:
    sub = {v: Var(v + offset) for v in set(_var_counts(rule.lhs)) | set(_var_counts(rule.rhs))}
    return Rule(apply_sub(rule.lhs, sub), apply_sub(rule.rhs, sub))


def _positions(t: Term, path=()):
    """Non-variable positions of ``t`` with their subterms, preorder."""
    if type(t) is Var:
        return
    yield path, t
    for i, a in enumerate(t.args):
        yield from _positions(a, path + (i,))


def _replace(t: Term, path: Sequence[int], new: Term) -> Term:
    if not path:
        return new
    args = list(t.args)
    args[path[0]] = _replace(args[path[0]], path[1:], new)
    return App(t.op, args)


def critical_pairs(r1: Rule, r2: Rule) -> Iterable[tuple[Term, Term]]:
    """Overlaps of ``r2`` into non-variable positions of ``r1.lhs``."""
    same = r1 == r2
    offset = max(_max_var(r1.lhs), _max_var(r1.rhs)) + 1
    r2 = _rename(r2, offset)
    for path, sub_t in _positions(r1.lhs):
        if same and not path:
            continue
        sigma = unify(sub_t, r2.lhs)
        if sigma is None:
            continue
        left = apply_sub(r1.rhs, sigma)
        right = apply_sub(_replace(r1.lhs, path, r2.rhs), sigma)
        yield left, right


class Rewriter:
    """Innermost normalization by a fixed rule list, with optional traces."""

    def __init__(self, rules: Sequence[Rule]):
        self.rules = tuple(rules)
        self._by_op: dict = {}
        for i, r in enumerate(self.rules):
            key = r.lhs.op if type(r.lhs) is App else None
            self._by_op.setdefault(key, []).append(i)
        self._cache: dict[Term, Term] = {}

    def _step_root(self, t: Term):
        cands = self._by_op.get(t.op, []) + self._by_op.get(None, [])
        for i in sorted(cands):
            sub = match(self.rules[i].lhs, t)
            if sub is not None:
                return i, apply_sub(self.rules[i].rhs, sub)
        return None

    def normalize(self, t: Term) -> Term:
        cached = self._cache.get(t)
        if cached is not None:
            return cached
        if type(t) is Var:
            s = t
        else:
            s = App(t.op, [self.normalize(a) for a in t.args]) if t.args else t
            step = self._step_root(s)
            if step is not None:
                s = self.normalize(step[1])
        self._cache[t] = s
        return s

    def trace(self, t: Term) -> list[tuple[int, tuple[int, ...], Term]]:
        """Leftmost-innermost rewrite sequence to normal form: (rule, position, result) steps."""
        steps = []
        while True:
            found = self._find_redex(t, ())
            if found is None:
                return steps
            path, i, new_sub = found
            t = _replace(t, path, new_sub)
            steps.append((i, path, t))

    def _find_redex(self, t: Term, path):
        if type(t) is Var:
            return None
        for k, a in enumerate(t.args):
            r = self._find_redex(a, path + (k,))
            if r is not None:
                return r
        step = self._step_root(t)
        if step is not None:
            return path, step[0], step[1]
        return None

    def is_normal(self, t: Term) -> bool:
        return self._find_redex(t, ()) is None

    def check_step(self, before: Term, rule_index: int, path: Sequence[int], after: Term) -> bool:
        s = before
        for k in path:
            if type(s) is Var or k >= len(s.args):
                return False
            s = s.args[k]
        rule = self.rules[rule_index]
        sub = match(rule.lhs, s)
        return sub is not None and _replace(before, path, apply_sub(rule.rhs, sub)) == after


@dataclass(frozen=True)
class Completion:
    """Outcome of bounded completion: a convergent rule list, or why none was found."""

    rules: tuple[Rule, ...] | None
    rounds: int
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.rules is not None


def _tidy(rule: Rule) -> Rule:
    """Rename variables to x0, x1, .. in order of first occurrence."""
    order: dict[int, int] = {}

    def walk(t):
        if type(t) is Var:
            order.setdefault(t.index, len(order))
        else:
            for a in t.args:
                walk(a)

    walk(rule.lhs)
    return Rule(apply_sub(rule.lhs, {v: Var(i) for v, i in order.items()}),
                apply_sub(rule.rhs, {v: Var(i) for v, i in order.items()}))


def complete(
    equations: Iterable[tuple[Term, Term]], signature: Signature, max_rounds: int = 200
) -> Completion:
    """Huet-style completion, giving up after ``max_rounds`` rule-pair overlap computations."""
    prec = {op: i for i, op in enumerate(signature)}
    weights = kbo_weights(signature)
    todo = deque(equations)
    postponed: list[tuple[Term, Term]] = []
    rules: list[Rule] = []
    pairs: deque = deque()
    rounds = 0

    while True:
        while todo:
            s, t = todo.popleft()
            rw = Rewriter(rules)
            s, t = rw.normalize(s), rw.normalize(t)
            if s == t:
                continue
            if kbo_greater(s, t, prec, weights):
                new = Rule(s, t)
            elif kbo_greater(t, s, prec, weights):
                new = Rule(t, s)
            else:
                # retried once more rules are known
                postponed.append((s, t))
                continue
            single = Rewriter([new])
            kept: list[Rule] = []
            for r in rules:
                if not single.is_normal(r.lhs):
                    todo.append((r.lhs, r.rhs))
                else:
                    kept.append(r)
            rules = kept + [new]
            rw = Rewriter(rules)
            rules = [Rule(r.lhs, rw.normalize(r.rhs)) for r in rules]
            new = rules[-1]
            for r in rules:
                pairs.append((new, r))
            if postponed:
                todo.extend(postponed)
                postponed = []
        live = set(rules)
        while pairs and not (pairs[0][0] in live and pairs[0][1] in live):
            pairs.popleft()
        if not pairs:
            if postponed:
                s, t = postponed[0]
                return Completion(None, rounds, f"cannot orient {s!r} = {t!r}")
            # final joinability sweep guards against pairs dropped by interreduction
            rw = Rewriter(rules)
            for a in rules:
                for b in rules:
                    for l, r in critical_pairs(a, b):
                        if rw.normalize(l) != rw.normalize(r):
                            todo.append((l, r))
            if not todo:
                return Completion(tuple(_tidy(r) for r in rules), rounds)
            continue
        a, b = pairs.popleft()
        rounds += 1
        if rounds > max_rounds:
            return Completion(None, rounds - 1, f"no convergent system within {max_rounds} rounds")
        todo.extend(critical_pairs(a, b))
        if a != b:
            todo.extend(critical_pairs(b, a))
