"""Categories presented by generators and relations over a finite quiver.

Paths are written in diagrammatic order: ``Path("A", "C", ("f", "g"))``
traverses ``f`` first and then ``g``.  The empty path at an object is its
identity.  Hom-sets of the free category may be infinite, so every query
takes an explicit length bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .errors import BudgetExceeded, ContractViolation

__all__ = [
    "Edge",
    "Quiver",
    "Path",
    "Relation",
    "CategoryPresentation",
    "SetFunctorData",
    "QuotientHom",
    "free_hom",
    "quotient_hom",
    "eval_path",
    "check_functor",
    "enumerate_functors",
]


@dataclass(frozen=True)
class Edge:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Path:
    source: str
    target: str
    edges: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.edges and self.source != self.target:
            raise ContractViolation("an empty path must start and end at the same object")

    def __len__(self):
        return len(self.edges)

    def then(self, other: "Path") -> "Path":
        if self.target != other.source:
            raise ContractViolation(f"cannot compose a path ending at {self.target} with one starting at {other.source}")
        return Path(self.source, other.target, self.edges + other.edges)

    def __str__(self):
        return ".".join(self.edges) if self.edges else f"id({self.source})"


@dataclass(frozen=True)
class Quiver:
    objects: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.objects)) != len(self.objects):
            raise ContractViolation("duplicate object")
        names = [e.name for e in self.edges]
        if len(set(names)) != len(names):
            raise ContractViolation("duplicate edge name")
        objs = set(self.objects)
        for e in self.edges:
            if e.source not in objs or e.target not in objs:
                raise ContractViolation(f"edge {e.name} has an endpoint outside the objects")

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e.name == name:
                return e
        raise ContractViolation(f"unknown edge {name!r}")

    def path(self, *names: str) -> Path:
        if not names:
            raise ContractViolation("use identity() for empty paths")
        es = [self.edge(n) for n in names]
        for a, b in zip(es, es[1:]):
            if a.target != b.source:
                raise ContractViolation(f"edges {a.name} and {b.name} do not compose")
        return Path(es[0].source, es[-1].target, tuple(names))

    def identity(self, x: str) -> Path:
        if x not in self.objects:
            raise ContractViolation(f"unknown object {x!r}")
        return Path(x, x)

    def check_path(self, p: Path) -> None:
        if p.source not in self.objects or p.target not in self.objects:
            raise ContractViolation(f"path {p} has an endpoint outside the objects")
        if p.edges:
            q = self.path(*p.edges)
            if (q.source, q.target) != (p.source, p.target):
                raise ContractViolation(f"path {p} has wrong endpoints")


@dataclass(frozen=True)
class Relation:
    lhs: Path
    rhs: Path
    label: str | None = None


@dataclass(frozen=True)
class CategoryPresentation:
    quiver: Quiver
    relations: tuple[Relation, ...] = ()
    name: str = "C"

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        for r in self.relations:
            self.quiver.check_path(r.lhs)
            self.quiver.check_path(r.rhs)
            if (r.lhs.source, r.lhs.target) != (r.rhs.source, r.rhs.target):
                raise ContractViolation(f"relation {r.label or ''} relates non-parallel paths")


def _paths_from(Q: Quiver, x: str, max_len: int) -> Iterator[Path]:
    """All paths out of ``x`` of length <= max_len, by length then edge declaration order."""
    layer = [Path(x, x)]
    out_edges: dict[str, list[Edge]] = {o: [] for o in Q.objects}
    for e in Q.edges:
        out_edges[e.source].append(e)
    for _ in range(max_len + 1):
        yield from layer
        layer = [Path(p.source, e.target, p.edges + (e.name,)) for p in layer for e in out_edges[p.target]]


def free_hom(Q: Quiver, x: str, y: str, max_len: int, max_paths: int | None = None) -> list[Path]:
    """Paths ``x -> y`` of length <= max_len; the identity is included when x == y."""
    if x not in Q.objects or y not in Q.objects:
        raise ContractViolation("unknown object")
    out = []
    for p in _paths_from(Q, x, max_len):
        if p.target == y:
            out.append(p)
            if max_paths is not None and len(out) > max_paths:
                raise BudgetExceeded("hom-set enumeration", max_paths)
    return out


@dataclass
class QuotientHom:
    """Congruence classes of a length-bounded hom-set.

    ``unresolved`` lists rewrites that would leave the length bound; the
    classes they connect are reported separately, never merged.
    """

    classes: list[list[Path]]
    unresolved: list[tuple[Path, Path]] = field(default_factory=list)

    @property
    def representatives(self) -> list[Path]:
        return [c[0] for c in self.classes]

    def __len__(self):
        return len(self.classes)

    def class_of(self, p: Path) -> int:
        for i, c in enumerate(self.classes):
            if p in c:
                return i
        raise KeyError(str(p))


def _occurrences(Q: Quiver, p: Path, side: Path):
    """Start positions where ``side`` occurs as a contiguous subpath of ``p``."""
    if not side.edges:
        objs = [p.source] + [Q.edge(e).target for e in p.edges]
        return [i for i, o in enumerate(objs) if o == side.source]
    k = len(side.edges)
    return [i for i in range(len(p.edges) - k + 1) if p.edges[i:i + k] == side.edges]


def quotient_hom(
    CP: CategoryPresentation, x: str, y: str, max_len: int, max_paths: int | None = None
) -> QuotientHom:
    """Classes of paths ``x -> y`` (length <= max_len) under the relations.

    Representatives are the shortest paths, ties broken by edge declaration
    order.
    """
    Q = CP.quiver
    paths = free_hom(Q, x, y, max_len, max_paths)
    index = {p: i for i, p in enumerate(paths)}
    parent = list(range(len(paths)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    unresolved: list[tuple[Path, Path]] = []
    for p in paths:
        for rel in CP.relations:
            for a, b in ((rel.lhs, rel.rhs), (rel.rhs, rel.lhs)):
                for i in _occurrences(Q, p, a):
                    q = Path(p.source, p.target, p.edges[:i] + b.edges + p.edges[i + len(a.edges):])
                    j = index.get(q)
                    if j is None:
                        if (p, q) not in unresolved:
                            unresolved.append((p, q))
                        continue
                    ri, rj = find(index[p]), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[Path]] = {}
    for i, p in enumerate(paths):
        groups.setdefault(find(i), []).append(p)
    classes = [groups[r] for r in sorted(groups)]
    return QuotientHom(classes, unresolved)


@dataclass(frozen=True)
class SetFunctorData:
    """A finite set ``{0..n-1}`` per object and a function per edge."""

    sets: Mapping[str, int] = field(hash=False)
    maps: Mapping[str, tuple[int, ...]] = field(hash=False)

    def key(self):
        return (tuple(sorted(self.sets.items())), tuple(sorted(self.maps.items())))

    def __eq__(self, other):
        return isinstance(other, SetFunctorData) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def validate(self, Q: Quiver) -> None:
        for o in Q.objects:
            if o not in self.sets:
                raise ContractViolation(f"no set assigned to object {o}")
        for e in Q.edges:
            f = self.maps.get(e.name)
            if f is None:
                raise ContractViolation(f"no function assigned to edge {e.name}")
            if len(f) != self.sets[e.source] or any(not 0 <= v < self.sets[e.target] for v in f):
                raise ContractViolation(f"function for {e.name} does not go {e.source} -> {e.target}")


def eval_path(F: SetFunctorData, p: Path) -> tuple[int, ...]:
    """The function assigned to ``p``: the composite of its edges' functions."""
    f = tuple(range(F.sets[p.source]))
    for name in p.edges:
        g = F.maps[name]
        f = tuple(g[v] for v in f)
    return f


def check_functor(CP: CategoryPresentation, F: SetFunctorData) -> bool:
    """Whether ``F`` extends to a functor out of the presented category."""
    F.validate(CP.quiver)
    return all(eval_path(F, r.lhs) == eval_path(F, r.rhs) for r in CP.relations)


def enumerate_functors(Q: Quiver, max_set_size: int, min_set_size: int = 0) -> Iterator[SetFunctorData]:
    """Every graph morphism into finite sets of sizes in [min_set_size, max_set_size]."""
    sizes_range = range(min_set_size, max_set_size + 1)
    for sizes in itertools.product(sizes_range, repeat=len(Q.objects)):
        sets = dict(zip(Q.objects, sizes))
        choices = [
            list(itertools.product(range(sets[e.target]), repeat=sets[e.source])) for e in Q.edges
        ]
        for fs in itertools.product(*choices):
            yield SetFunctorData(sets, {e.name: f for e, f in zip(Q.edges, fs)})
