"""Finite model search with constraint propagation.

All table cells of all symbols are laid out in one array, symbol after
symbol in declaration order and row-major inside each table.  The search
branches on the first unassigned cell, trying values in increasing order,
so models come out in the same lexicographic order as a plain
``enumerate_algebras`` sweep filtered by satisfaction.

Each equation is grounded over every assignment of its variables.  A
ground instance is re-examined whenever a cell blocking its evaluation gets
a value; once one side is known and the other side is a single unknown cell
whose arguments are known, that cell is forced.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

from .algebra import FiniteAlgebra
from .errors import BudgetExceeded, ContractViolation
from .terms import Signature, Term, Var

__all__ = ["search_models"]


def _compile(t: Term, offsets: dict, sig: Signature):
    if type(t) is Var:
        return t.index
    return (offsets[t.op], tuple(_compile(a, offsets, sig) for a in t.args))


def search_models(
    sig: Signature,
    equations: Sequence[tuple[int, Term, Term]],
    m: int,
    max_nodes: int | None = None,
) -> Iterator[FiniteAlgebra]:
    """All algebras of carrier size ``m`` satisfying every ``(ctx, lhs, rhs)``."""
    if m < 0 or (m == 0 and sig.constants):
        raise ContractViolation(f"no algebras on carrier {m} for this signature")
    offsets, widths, total = {}, [], 0
    for op in sig:
        offsets[op] = total
        widths.append(m ** op.arity)
        total += m ** op.arity

    val = [-1] * total
    watch: list[set[int]] = [set() for _ in range(total)]
    insts: list[tuple] = []
    for n, lhs, rhs in equations:
        cl, cr = _compile(lhs, offsets, sig), _compile(rhs, offsets, sig)
        for x in itertools.product(range(m), repeat=n):
            insts.append((cl, cr, x))

    trail: list[int] = []
    queue: list[int] = []

    def ev(node, x):
        # value >= 0, or -(cell+1) for the first unknown cell met
        if type(node) is int:
            return x[node]
        off, args = node
        idx = 0
        for a in args:
            r = ev(a, x)
            if r < 0:
                return r
            idx = idx * m + r
        v = val[off + idx]
        return v if v >= 0 else -(off + idx + 1)

    def ev_root(node, x):
        # as ev, plus whether the blocking cell is the root application
        if type(node) is int:
            return x[node], False
        off, args = node
        idx = 0
        for a in args:
            r = ev(a, x)
            if r < 0:
                return r, False
            idx = idx * m + r
        v = val[off + idx]
        return (v, False) if v >= 0 else (-(off + idx + 1), True)

    def process(i: int) -> bool:
        cl, cr, x = insts[i]
        lv, lroot = ev_root(cl, x)
        rv, rroot = ev_root(cr, x)
        if lv >= 0 and rv >= 0:
            return lv == rv
        if lv >= 0:
            if rroot:
                c = -rv - 1
                val[c] = lv
                trail.append(c)
                queue.append(c)
            else:
                watch[-rv - 1].add(i)
            return True
        if rv >= 0:
            if lroot:
                c = -lv - 1
                val[c] = rv
                trail.append(c)
                queue.append(c)
            else:
                watch[-lv - 1].add(i)
            return True
        watch[-lv - 1].add(i)
        watch[-rv - 1].add(i)
        return True

    def propagate() -> bool:
        while queue:
            c = queue.pop()
            for i in tuple(watch[c]):
                if not process(i):
                    queue.clear()
                    return False
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            val[trail.pop()] = -1

    def snapshot() -> FiniteAlgebra:
        tables, pos = [], 0
        for w in widths:
            tables.append(tuple(val[pos:pos + w]))
            pos += w
        return FiniteAlgebra(sig, m, tuple(tables))

    def first_unassigned(p: int) -> int:
        while p < total and val[p] >= 0:
            p += 1
        return p

    for i in range(len(insts)):
        if not process(i):
            return
    if not propagate():
        return

    p = first_unassigned(0)
    if p == total:
        yield snapshot()
        return
    nodes = 0
    stack = [[p, 0, len(trail)]]
    while stack:
        frame = stack[-1]
        c, v, mark = frame
        undo(mark)
        if v >= m:
            stack.pop()
            continue
        frame[1] = v + 1
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            raise BudgetExceeded("model search nodes", max_nodes)
        val[c] = v
        trail.append(c)
        queue.append(c)
        if not propagate():
            continue
        nxt = first_unassigned(c + 1)
        if nxt == total:
            yield snapshot()
            continue
        stack.append([nxt, 0, len(trail)])
