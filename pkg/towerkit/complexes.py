"""Finite combinatorial 2-complexes and simplicial complexes.

Responsibilities
----------------
- Complex2: vertices, darts with a reversal involution, faces attached along
  cyclic dart words (loops and repeated darts allowed).
- Subcomplexes, fullness and spans.
- Vertex links and barycentric subdivision.
- SimpComplex: simplicial complexes of dimension at most 2.

Ids are opaque strings. Every iteration goes through sorted ids so results
are reproducible.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .models import InputError, ValidationReport, report

Edge = Tuple[str, str, str]


def reverse_name(dart: str) -> str:
    return dart[1:] if dart.startswith("-") else f"-{dart}"


def _edge_rank(dart: str) -> Tuple[bool, str]:
    return (dart.startswith("-"), dart)


# ---------------------------------------------------------------------------
# Complex2
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Complex2:
    vertices: Tuple[str, ...]
    src: Mapping[str, str]
    dst: Mapping[str, str]
    rev: Mapping[str, str]
    faces: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        vertices: Iterable[str],
        edges: Iterable[Edge],
        faces: Optional[Mapping[str, Sequence[str]]] = None,
    ) -> "Complex2":
        """Build from edges ``(id, from, to)``; dart ``x`` runs forward and ``-x`` backward."""
        src: Dict[str, str] = {}
        dst: Dict[str, str] = {}
        rev: Dict[str, str] = {}
        for edge_id, head, tail in edges:
            if edge_id.startswith("-"):
                raise InputError(f"edge id may not start with '-': {edge_id}")
            if edge_id in src:
                raise InputError(f"duplicate edge id: {edge_id}")
            back = reverse_name(edge_id)
            src[edge_id], dst[edge_id] = head, tail
            src[back], dst[back] = tail, head
            rev[edge_id], rev[back] = back, edge_id
        face_words = {name: tuple(word) for name, word in (faces or {}).items()}
        return cls(tuple(sorted(set(vertices))), src, dst, rev, face_words)

    @cached_property
    def darts(self) -> Tuple[str, ...]:
        return tuple(sorted(self.src))

    @cached_property
    def edges(self) -> Tuple[str, ...]:
        """One representative dart per edge pair, preferring the unprefixed name."""
        return tuple(sorted({self.edge_of(d) for d in self.src}))

    @cached_property
    def face_ids(self) -> Tuple[str, ...]:
        return tuple(sorted(self.faces))

    @cached_property
    def _out(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for d in self.darts:
            out.setdefault(self.src[d], []).append(d)
        return {v: tuple(ds) for v, ds in out.items()}

    def edge_of(self, dart: str) -> str:
        return min(dart, self.rev.get(dart, dart), key=_edge_rank)

    def out_darts(self, vertex: str) -> Tuple[str, ...]:
        return self._out.get(vertex, ())

    def has_cell(self, cell: str) -> bool:
        return cell in self.src or cell in self.faces or cell in set(self.vertices)

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def graph(self) -> nx.MultiGraph:
        """1-skeleton as a networkx multigraph keyed by edge representative."""
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            g.add_edge(self.src[e], self.dst[e], key=e)
        return g

    def is_connected(self) -> bool:
        return bool(self.vertices) and nx.is_connected(self.graph())

    def edge_multiplicity(self, faces: Optional[Iterable[str]] = None) -> Counter[str]:
        """How many face sides run along each edge."""
        counts: Counter[str] = Counter()
        for f in self.face_ids if faces is None else faces:
            for d in self.faces[f]:
                counts[self.edge_of(d)] += 1
        return counts

    def corners(self, vertex: str) -> List[Tuple[str, int]]:
        return [
            (f, i)
            for f in self.face_ids
            for i, d in enumerate(self.faces[f])
            if self.src.get(d) == vertex
        ]

    def summary(self) -> Dict[str, int]:
        return {"vertices": len(self.vertices), "edges": len(self.edges), "faces": len(self.faces)}


def validate_complex(c: Complex2) -> ValidationReport:
    errors: List[str] = []
    vertex_set = set(c.vertices)
    if len(vertex_set) != len(c.vertices):
        errors.append("vertex ids are not unique")
    if set(c.src) != set(c.dst) or set(c.src) != set(c.rev):
        errors.append("src, dst and rev must be defined on the same darts")
    for d in sorted(c.src):
        if c.src[d] not in vertex_set or c.dst.get(d) not in vertex_set:
            errors.append(f"dart {d} has an endpoint outside the vertex set")
        r = c.rev.get(d)
        if r is None:
            continue
        if r == d:
            errors.append(f"rev must be a fixed-point-free involution: rev({d}) = {d}")
            continue
        if r not in c.rev:
            errors.append(f"rev({d}) = {r} is not a dart")
            continue
        if c.rev[r] != d:
            errors.append(f"rev must be a fixed-point-free involution: rev(rev({d})) != {d}")
        if c.src.get(r) != c.dst.get(d):
            errors.append(f"src(rev({d})) must equal dst({d})")
    for f in sorted(c.faces):
        word = c.faces[f]
        if not word:
            errors.append(f"face {f} has an empty boundary word")
            continue
        missing = [d for d in word if d not in c.src]
        if missing:
            errors.append(f"face {f} references unknown darts {missing}")
            continue
        for i, d in enumerate(word):
            following = word[(i + 1) % len(word)]
            if c.dst[d] != c.src[following]:
                errors.append(f"face {f}: boundary closes cyclically violated at position {i}")
                break
    return report(errors, vertices=len(c.vertices), darts=len(c.src), faces=len(c.faces))


# ---------------------------------------------------------------------------
# Subcomplexes and spans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subcomplex:
    parent: Complex2 = field(compare=False, repr=False)
    vertices: FrozenSet[str] = frozenset()
    darts: FrozenSet[str] = frozenset()
    faces: FrozenSet[str] = frozenset()

    @classmethod
    def closure(
        cls,
        parent: Complex2,
        vertices: Iterable[str] = (),
        darts: Iterable[str] = (),
        faces: Iterable[str] = (),
    ) -> "Subcomplex":
        """Smallest subcomplex containing the given cells."""
        face_set = frozenset(faces)
        dart_set = set(darts)
        for f in face_set:
            if f not in parent.faces:
                raise InputError(f"unknown face id: {f}")
            dart_set.update(parent.faces[f])
        for d in list(dart_set):
            if d not in parent.src:
                raise InputError(f"unknown dart id: {d}")
            dart_set.add(parent.rev[d])
        vertex_set = set(vertices)
        unknown = vertex_set - set(parent.vertices)
        if unknown:
            raise InputError(f"unknown vertex ids: {sorted(unknown)}")
        for d in dart_set:
            vertex_set.add(parent.src[d])
        return cls(parent, frozenset(vertex_set), frozenset(dart_set), face_set)

    @classmethod
    def whole(cls, parent: Complex2) -> "Subcomplex":
        return cls(parent, frozenset(parent.vertices), frozenset(parent.src), frozenset(parent.faces))

    @classmethod
    def skeleton(cls, parent: Complex2, dimension: int) -> "Subcomplex":
        darts = frozenset(parent.src) if dimension >= 1 else frozenset()
        faces = frozenset(parent.faces) if dimension >= 2 else frozenset()
        return cls(parent, frozenset(parent.vertices), darts, faces)

    def is_closed(self) -> bool:
        for f in self.faces:
            if not set(self.parent.faces[f]) <= self.darts:
                return False
        for d in self.darts:
            if self.parent.rev[d] not in self.darts or self.parent.src[d] not in self.vertices:
                return False
        return True

    def issubset(self, other: "Subcomplex") -> bool:
        return self.vertices <= other.vertices and self.darts <= other.darts and self.faces <= other.faces

    def union(self, other: "Subcomplex") -> "Subcomplex":
        return Subcomplex(
            self.parent, self.vertices | other.vertices, self.darts | other.darts, self.faces | other.faces
        )

    def is_empty(self) -> bool:
        return not self.vertices

    def to_complex(self) -> Complex2:
        p = self.parent
        return Complex2(
            tuple(sorted(self.vertices)),
            {d: p.src[d] for d in self.darts},
            {d: p.dst[d] for d in self.darts},
            {d: p.rev[d] for d in self.darts},
            {f: p.faces[f] for f in self.faces},
        )

    def summary(self) -> Dict[str, int]:
        return {"vertices": len(self.vertices), "edges": len(self.darts) // 2, "faces": len(self.faces)}


def span(c: Complex2, k: Subcomplex) -> Subcomplex:
    """Smallest full subcomplex of ``c`` containing ``k``."""
    vertices = k.vertices
    darts = frozenset(d for d in c.darts if c.src[d] in vertices and c.dst[d] in vertices)
    faces = frozenset(f for f in c.face_ids if set(c.faces[f]) <= darts)
    return Subcomplex(c, vertices, darts, faces)


def is_full(c: Complex2, k: Subcomplex) -> bool:
    return span(c, k) == k


# ---------------------------------------------------------------------------
# Links
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinkArc:
    face: str
    position: int
    ends: Tuple[str, str]


@dataclass(frozen=True)
class LinkGraph:
    vertex: str
    nodes: Tuple[str, ...]
    arcs: Tuple[LinkArc, ...]

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.nodes)
        for arc in self.arcs:
            g.add_edge(arc.ends[0], arc.ends[1], key=(arc.face, arc.position))
        return g


def corner_ends(c: Complex2, face: str, position: int) -> Tuple[str, str]:
    """Darts leaving the corner vertex: the reversed incoming side and the outgoing side."""
    word = c.faces[face]
    return (c.rev[word[position - 1]], word[position])


def link(c: Complex2, v: str) -> LinkGraph:
    if v not in set(c.vertices):
        raise InputError(f"unknown vertex id: {v}")
    arcs = tuple(LinkArc(f, i, corner_ends(c, f, i)) for f, i in c.corners(v))
    return LinkGraph(v, c.out_darts(v), arcs)


# ---------------------------------------------------------------------------
# Barycentric subdivision
# ---------------------------------------------------------------------------


def barycentric_subdivision(c: Complex2) -> Complex2:
    """Subdivide every k-gon into 2k triangles around a new center vertex.

    New vertices: ``m(e)`` per edge, ``c(f)`` per face. Every dart ``d`` gets a
    half edge ``h(d)`` from its source to the midpoint; every corner ``i`` of a
    face gets spokes ``s(f,i)`` to the corner vertex and ``t(f,i)`` to the
    midpoint of side ``i``.
    """
    vertices = list(c.vertices)
    edges: List[Edge] = []
    for e in c.edges:
        vertices.append(f"m({e})")
    for d in c.darts:
        edges.append((f"h({d})", c.src[d], f"m({c.edge_of(d)})"))
    faces: Dict[str, List[str]] = {}
    for f in c.face_ids:
        center = f"c({f})"
        vertices.append(center)
        word = c.faces[f]
        n = len(word)
        for i, d in enumerate(word):
            edges.append((f"s({f},{i})", center, c.src[d]))
            edges.append((f"t({f},{i})", center, f"m({c.edge_of(d)})"))
        for i, d in enumerate(word):
            nxt = (i + 1) % n
            faces[f"{f}/{2 * i}"] = [f"s({f},{i})", f"h({d})", f"-t({f},{i})"]
            faces[f"{f}/{2 * i + 1}"] = [f"t({f},{i})", f"-h({c.rev[d]})", f"-s({f},{nxt})"]
    return Complex2.build(vertices, edges, faces)


def rename_cells(c: Complex2, names: Mapping[str, str]) -> Complex2:
    """Relabel vertices, edges (by representative) and faces; unnamed ids stay."""

    def dart_name(d: str) -> str:
        e = c.edge_of(d)
        new = names.get(e, e)
        return new if d == e else reverse_name(new)

    vertices = [names.get(v, v) for v in c.vertices]
    edges = [(dart_name(e), names.get(c.src[e], c.src[e]), names.get(c.dst[e], c.dst[e])) for e in c.edges]
    faces = {names.get(f, f): [dart_name(d) for d in c.faces[f]] for f in c.face_ids}
    return Complex2.build(vertices, edges, faces)


# ---------------------------------------------------------------------------
# Simplicial complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimpComplex:
    vertices: FrozenSet[str]
    simplices: FrozenSet[FrozenSet[str]]

    @classmethod
    def build(cls, vertices: Iterable[str], simplices: Iterable[Iterable[str]] = ()) -> "SimpComplex":
        """Downward closure of the given simplices; dimension is capped at 2."""
        closed = set()
        vertex_set = set(vertices)
        for simplex in simplices:
            members = frozenset(simplex)
            if not members:
                continue
            if len(members) > 3:
                raise InputError(f"simplex {sorted(members)} exceeds dimension 2")
            vertex_set |= members
            for size in range(1, len(members) + 1):
                closed.update(frozenset(face) for face in itertools.combinations(sorted(members), size))
        closed.update(frozenset([v]) for v in vertex_set)
        return cls(frozenset(vertex_set), frozenset(closed))

    def of_dimension(self, dim: int) -> List[FrozenSet[str]]:
        return sorted((s for s in self.simplices if len(s) == dim + 1), key=sorted)

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(sorted(self.vertices))
        g.add_edges_from(tuple(sorted(s)) for s in self.of_dimension(1))
        return g

    def link(self, simplex: Iterable[str]) -> "SimpComplex":
        sigma = frozenset(simplex)
        taus = [tau for tau in self.simplices if not (tau & sigma) and (tau | sigma) in self.simplices]
        vertices = {v for tau in taus for v in tau}
        return SimpComplex.build(vertices, taus)

    def induced(self, vertices: Iterable[str]) -> "SimpComplex":
        keep = frozenset(vertices)
        return SimpComplex.build(keep, [s for s in self.simplices if s <= keep])


def validate_simplicial(s: SimpComplex) -> ValidationReport:
    errors: List[str] = []
    for simplex in sorted(s.simplices, key=sorted):
        if len(simplex) > 3:
            errors.append(f"simplex {sorted(simplex)} exceeds dimension 2")
        if not simplex <= s.vertices:
            errors.append(f"simplex {sorted(simplex)} uses unknown vertices")
        for size in range(1, len(simplex)):
            for face in itertools.combinations(sorted(simplex), size):
                if frozenset(face) not in s.simplices:
                    errors.append(f"family is not closed under subsets: {list(face)} missing")
    for v in sorted(s.vertices):
        if frozenset([v]) not in s.simplices:
            errors.append(f"singleton {v} missing")
    return report(errors, vertices=len(s.vertices), simplices=len(s.simplices))


# ---------------------------------------------------------------------------
# Free edges and collapsing
# ---------------------------------------------------------------------------


def free_edges(c: Complex2, darts: Iterable[str], faces: Iterable[str]) -> List[str]:
    """Edges among ``darts`` lying on exactly one side of the given faces."""
    face_list = list(faces)
    edge_set = {c.edge_of(d) for d in darts}
    counts = c.edge_multiplicity(face_list)
    return sorted(e for e in edge_set if counts[e] == 1)


def collapse_faces(c: Complex2, faces: Iterable[str]) -> FrozenSet[str]:
    """Delete faces carrying a free edge until none does; the surviving faces."""
    remaining = set(faces)
    while True:
        counts = c.edge_multiplicity(sorted(remaining))
        victim = next(
            (f for f in sorted(remaining) if any(counts[c.edge_of(d)] == 1 for d in c.faces[f])),
            None,
        )
        if victim is None:
            return frozenset(remaining)
        remaining.discard(victim)
