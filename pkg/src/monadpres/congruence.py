"""Ground congruence closure with bounded instantiation of equations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .terms import App, Term, Var

__all__ = ["CongruenceClosure", "Instance", "saturate", "replay_instances"]


class CongruenceClosure:
    """Union-find over a growing universe of ground terms, closed under congruence.

    Variables inside terms are treated as constants.
    """

    def __init__(self):
        self.ids: dict[Term, int] = {}
        self.terms: list[Term] = []
        self.parent: list[int] = []
        self.members: list[list[int]] = []
        self.uses: list[list[int]] = []
        self.sig: dict[tuple, int] = {}
        self._pending: list[tuple[int, int]] = []

    def __len__(self):
        return len(self.terms)

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def _key(self, i: int):
        t = self.terms[i]
        if type(t) is Var:
            return None
        return (t.op, tuple(self.find(self.ids[a]) for a in t.args))

    def add(self, t: Term) -> int:
        i = self.ids.get(t)
        if i is not None:
            return i
        if type(t) is App:
            for a in t.args:
                self.add(a)
        i = len(self.terms)
        self.ids[t] = i
        self.terms.append(t)
        self.parent.append(i)
        self.members.append([i])
        self.uses.append([])
        if type(t) is App:
            for a in t.args:
                self.uses[self.find(self.ids[a])].append(i)
            key = self._key(i)
            other = self.sig.get(key)
            if other is None:
                self.sig[key] = i
            else:
                self._pending.append((i, other))
                self._propagate()
        return i

    def merge(self, a: Term, b: Term) -> None:
        self._pending.append((self.add(a), self.add(b)))
        self._propagate()

    def _propagate(self) -> None:
        pending = self._pending
        while pending:
            a, b = pending.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            if len(self.members[ra]) < len(self.members[rb]):
                ra, rb = rb, ra
            # rb joins ra; re-signature everything that used rb
            moved = self.uses[rb]
            for u in moved:
                key = self._key(u)
                if self.sig.get(key) == u:
                    del self.sig[key]
            self.parent[rb] = ra
            self.members[ra].extend(self.members[rb])
            self.members[rb] = []
            for u in moved:
                key = self._key(u)
                other = self.sig.get(key)
                if other is None:
                    self.sig[key] = u
                elif self.find(other) != self.find(u):
                    pending.append((u, other))
            self.uses[ra].extend(moved)
            self.uses[rb] = []

    def equal(self, a: Term, b: Term) -> bool:
        ia, ib = self.ids.get(a), self.ids.get(b)
        if ia is None or ib is None:
            return a == b
        return self.find(ia) == self.find(ib)

    def class_members(self, i: int) -> list[int]:
        return self.members[self.find(i)]


@dataclass(frozen=True)
class Instance:
    """A ground instance ``lhs = rhs`` of the equation with index ``equation``."""

    equation: int
    lhs: Term
    rhs: Term


@dataclass
class SaturationResult:
    merged: bool
    instances: list[Instance] = field(default_factory=list)
    rounds: int = 0
    universe: int = 0
    exhausted: bool = False


def _ematch(cc: CongruenceClosure, pat: Term, cls: int, sub: dict):
    """Yield (substitution, ground instance of pat) for matches of ``pat`` in class ``cls``."""
    if type(pat) is Var:
        bound = sub.get(pat.index)
        if bound is None:
            s = dict(sub)
            s[pat.index] = cc.terms[min(cc.class_members(cls))]
            yield s, s[pat.index]
        elif cc.find(cc.ids[bound]) == cc.find(cls):
            yield sub, bound
        return
    for mid in sorted(cc.class_members(cls)):
        t = cc.terms[mid]
        if type(t) is not App or t.op != pat.op:
            continue
        yield from _match_args(cc, pat, t.args, 0, sub, [])


def _match_args(cc, pat, args, k, sub, acc):
    if k == len(args):
        yield sub, App(pat.op, acc)
        return
    for s, g in _ematch(cc, pat.args[k], cc.find(cc.ids[args[k]]), sub):
        yield from _match_args(cc, pat, args, k + 1, s, acc + [g])


def _ground(t: Term, sub: dict) -> Term:
    if type(t) is Var:
        return sub[t.index]
    if not t.args:
        return t
    return App(t.op, [_ground(a, sub) for a in t.args])


def saturate(
    equations: Sequence[tuple[int, Term, Term]],
    t: Term,
    u: Term,
    leaves: Sequence[Term],
    rounds: int,
    max_terms: int = 20000,
) -> SaturationResult:
    """Instantiate equations by e-matching for ``rounds`` rounds, stopping once t ~ u.

    A side that is a bare variable matches only the subterms of ``t`` and
    ``u``.  Variables of the other side left unbound by a match range over
    ``leaves``.  Every instance added is recorded, so replaying the
    recorded instances reproduces the closure exactly.
    """
    cc = CongruenceClosure()
    cc.add(t)
    cc.add(u)
    seeds = sorted({cc.find(i) for i in range(len(cc))})
    result = SaturationResult(merged=cc.equal(t, u))
    seen: set[tuple[Term, Term]] = set()
    for r in range(rounds):
        if result.merged:
            break
        result.rounds = r + 1
        classes = sorted({cc.find(i) for i in range(len(cc))})
        found: list[Instance] = []
        for k, (n, lhs, rhs) in enumerate(equations):
            for pat, other in ((lhs, rhs), (rhs, lhs)):
                targets = [cc.find(c) for c in seeds] if type(pat) is Var else classes
                for cls in targets:
                    for sub, g in _ematch(cc, pat, cls, {}):
                        free = sorted(_vars(other) - set(sub))
                        for choice in itertools.product(leaves, repeat=len(free)):
                            s = dict(sub)
                            s.update(zip(free, choice))
                            inst = (g, _ground(other, s))
                            if inst[0] == inst[1] or inst in seen:
                                continue
                            seen.add(inst)
                            found.append(Instance(k, *inst))
        if not found:
            break
        for inst in found:
            cc.merge(inst.lhs, inst.rhs)
            result.instances.append(inst)
            if len(cc) > max_terms:
                result.exhausted = True
                break
        result.merged = cc.equal(t, u)
        if result.exhausted:
            break
    result.universe = len(cc)
    return result


def _vars(t: Term) -> set[int]:
    if type(t) is Var:
        return {t.index}
    out: set[int] = set()
    for a in t.args:
        out |= _vars(a)
    return out


def replay_instances(instances: Iterable[tuple[Term, Term]], t: Term, u: Term) -> bool:
    """Plain congruence closure over the given ground equations: does it merge t and u?"""
    cc = CongruenceClosure()
    cc.add(t)
    cc.add(u)
    for a, b in instances:
        cc.merge(a, b)
    return cc.equal(t, u)
