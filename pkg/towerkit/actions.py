"""Finite groups acting cellularly on 2-complexes.

Responsibilities
----------------
- FinGroup as an explicit multiplication table; subgroups as element sets.
- FinAction: one automorphism (CombMap) per group element.
- Orbits, stabilizers, inversions, fixed subcomplexes, equivariant collapse.
- EqMap: an equivariant pair (f, f#) and its classification.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from .complexes import Complex2, Subcomplex, free_edges
from .maps import CombMap, FaceImage, compose, identity_map, is_injective, is_isomorphism, validate_map
from .models import CellKind, InputError, InversionError, ValidationReport, report

logger = logging.getLogger(__name__)

MAX_GROUP_ORDER = 10_000

# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinGroup:
    elements: Tuple[str, ...]
    identity: str
    table: Mapping[Tuple[str, str], str]

    @classmethod
    def cyclic(cls, n: int, prefix: str = "r") -> "FinGroup":
        names = [f"{prefix}{k}" for k in range(n)]
        table = {(names[i], names[j]): names[(i + j) % n] for i in range(n) for j in range(n)}
        return cls(tuple(names), names[0], table)

    @classmethod
    def trivial(cls, name: str = "e") -> "FinGroup":
        return cls((name,), name, {(name, name): name})

    def mul(self, g: str, h: str) -> str:
        return self.table[(g, h)]

    @cached_property
    def _inverses(self) -> Dict[str, str]:
        inverses: Dict[str, str] = {}
        for g in self.elements:
            for h in self.elements:
                if self.table.get((g, h)) == self.identity:
                    inverses[g] = h
                    break
        return inverses

    def inv(self, g: str) -> str:
        return self._inverses[g]

    @property
    def order(self) -> int:
        return len(self.elements)

    def generated(self, gens: Iterable[str]) -> FrozenSet[str]:
        gens = list(gens)
        unknown = [g for g in gens if g not in self.elements]
        if unknown:
            raise InputError(f"unknown group elements: {unknown}")
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def subgroup(self, elements: Iterable[str]) -> "FinGroup":
        keep = frozenset(elements)
        ordered = tuple(g for g in self.elements if g in keep)
        table = {(g, h): self.mul(g, h) for g in ordered for h in ordered}
        if any(v not in keep for v in table.values()):
            raise InputError("element set is not closed under multiplication")
        return FinGroup(ordered, self.identity, table)

    def is_subgroup(self, elements: Iterable[str]) -> bool:
        keep = frozenset(elements)
        return self.identity in keep and all(self.mul(g, self.inv(h)) in keep for g in keep for h in keep)

    def is_normal(self, elements: Iterable[str]) -> bool:
        keep = frozenset(elements)
        return self.is_subgroup(keep) and all(
            self.mul(self.mul(x, k), self.inv(x)) in keep for x in self.elements for k in keep
        )


def validate_group(group: FinGroup) -> List[str]:
    errors: List[str] = []
    elements = set(group.elements)
    if group.identity not in elements:
        return [f"identity {group.identity} is not an element"]
    for g in group.elements:
        for h in group.elements:
            if group.table.get((g, h)) not in elements:
                errors.append(f"product {g}*{h} is missing or outside the group")
    if errors:
        return errors
    for g in group.elements:
        if group.mul(group.identity, g) != g or group.mul(g, group.identity) != g:
            errors.append(f"identity law fails at {g}")
        if not any(group.mul(g, h) == group.identity for h in group.elements):
            errors.append(f"{g} has no inverse")
    for a in group.elements:
        for b in group.elements:
            ab = group.mul(a, b)
            for c in group.elements:
                if group.mul(ab, c) != group.mul(a, group.mul(b, c)):
                    errors.append(f"associativity fails at ({a}, {b}, {c})")
                    return errors
    return errors


def is_homomorphism(source: FinGroup, target: FinGroup, mapping: Mapping[str, str]) -> bool:
    if any(mapping.get(g) not in target.elements for g in source.elements):
        return False
    return all(
        mapping[source.mul(g, h)] == target.mul(mapping[g], mapping[h])
        for g in source.elements
        for h in source.elements
    )


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinAction:
    group: FinGroup
    space: Complex2
    maps: Mapping[str, CombMap]

    def act(self, g: str, cell: str) -> str:
        return self.maps[g].apply(cell)

    def act_face(self, g: str, face: str) -> FaceImage:
        return self.maps[g].fmap[face]

    @classmethod
    def from_generators(
        cls, space: Complex2, generators: Mapping[str, CombMap], limit: int = MAX_GROUP_ORDER
    ) -> "FinAction":
        """Close a set of automorphisms under composition and tabulate the group."""
        identity = identity_map(space)
        names: List[str] = ["e"]
        maps: Dict[str, CombMap] = {"e": identity}
        index = {_signature(identity): "e"}
        queue = deque(["e"])
        while queue:
            current = queue.popleft()
            for gen_name in sorted(generators):
                product = compose(maps[current], generators[gen_name])
                key = _signature(product)
                if key in index:
                    continue
                name = gen_name if current == "e" else f"{current}*{gen_name}"
                if len(names) >= limit:
                    raise InputError(f"generated group exceeds {limit} elements")
                names.append(name)
                maps[name] = product
                index[key] = name
                queue.append(name)
        table = {(g, h): index[_signature(compose(maps[g], maps[h]))] for g in names for h in names}
        return cls(FinGroup(tuple(names), "e", table), space, maps)


def _signature(m: CombMap) -> Tuple[object, ...]:
    return (
        tuple(sorted(m.vmap.items())),
        tuple(sorted(m.dmap.items())),
        tuple(sorted((f, fi.image, fi.rot, fi.flip) for f, fi in m.fmap.items())),
    )


def trivial_action(c: Complex2, name: str = "e") -> FinAction:
    return FinAction(FinGroup.trivial(name), c, {name: identity_map(c)})


def validate_action(a: FinAction) -> ValidationReport:
    errors = validate_group(a.group)
    if errors:
        return report(errors)
    for g in a.group.elements:
        m = a.maps.get(g)
        if m is None:
            errors.append(f"element {g} has no automorphism")
            continue
        if m.source != a.space or m.target != a.space:
            errors.append(f"automorphism of {g} is not a self-map of the space")
            continue
        checked = validate_map(m)
        if not checked.ok:
            errors.extend(f"{g}: {e}" for e in checked.errors)
        elif not is_isomorphism(m):
            errors.append(f"automorphism of {g} is not bijective")
    if errors:
        return report(errors)
    if not a.maps[a.group.identity].same_as(identity_map(a.space)):
        errors.append("identity element does not act as the identity")
    for g in a.group.elements:
        for h in a.group.elements:
            if not compose(a.maps[g], a.maps[h]).same_as(a.maps[a.group.mul(g, h)]):
                errors.append(f"action is not a homomorphism at ({g}, {h})")
    return report(errors, order=a.group.order)


def _cell_kind(c: Complex2, cell: str) -> CellKind:
    kinds = [
        kind
        for kind, present in (
            (CellKind.VERTEX, cell in set(c.vertices)),
            (CellKind.DART, cell in c.src),
            (CellKind.FACE, cell in c.faces),
        )
        if present
    ]
    if not kinds:
        raise InputError(f"unknown cell id: {cell}")
    if len(kinds) > 1:
        raise InputError(f"cell id {cell} is ambiguous")
    return kinds[0]


def fixes_pointwise(a: FinAction, g: str, cell: str, kind: Optional[CellKind] = None) -> bool:
    kind = kind or _cell_kind(a.space, cell)
    m = a.maps[g]
    if kind is CellKind.FACE:
        return m.fmap[cell] == FaceImage(cell)
    return m.apply(cell) == cell


def fixes_setwise(a: FinAction, g: str, cell: str, kind: Optional[CellKind] = None) -> bool:
    kind = kind or _cell_kind(a.space, cell)
    m = a.maps[g]
    if kind is CellKind.DART:
        return m.dmap[cell] in (cell, a.space.rev[cell])
    return m.apply(cell) == cell


def stabilizer(a: FinAction, cell: str, elements: Optional[Iterable[str]] = None) -> FrozenSet[str]:
    """Pointwise stabilizer of a cell, optionally inside a subgroup."""
    kind = _cell_kind(a.space, cell)
    pool = a.group.elements if elements is None else tuple(elements)
    return frozenset(g for g in pool if fixes_pointwise(a, g, cell, kind))


def orbits(a: FinAction, kind: CellKind, elements: Optional[Iterable[str]] = None) -> List[FrozenSet[str]]:
    """Orbits of vertices, edges (by representative dart) or faces."""
    pool = a.group.elements if elements is None else tuple(elements)
    c = a.space
    if kind is CellKind.VERTEX:
        cells: Iterable[str] = c.vertices

        def move(g: str, x: str) -> str:
            return a.maps[g].vmap[x]
    elif kind is CellKind.DART:
        cells = c.edges

        def move(g: str, x: str) -> str:
            return c.edge_of(a.maps[g].dmap[x])
    else:
        cells = c.face_ids

        def move(g: str, x: str) -> str:
            return a.maps[g].fmap[x].image

    seen: Set[str] = set()
    result: List[FrozenSet[str]] = []
    for x in cells:
        if x in seen:
            continue
        orbit = frozenset(move(g, x) for g in pool)
        seen |= orbit
        result.append(orbit)
    return result


@dataclass(frozen=True)
class OrbitCounts:
    vertices: int
    edges: int
    faces: int

    def to_dict(self) -> Dict[str, int]:
        return {"vertices": self.vertices, "edges": self.edges, "faces": self.faces}


def orbit_counts(a: FinAction, elements: Optional[Iterable[str]] = None) -> OrbitCounts:
    pool = None if elements is None else tuple(elements)
    return OrbitCounts(
        len(orbits(a, CellKind.VERTEX, pool)),
        len(orbits(a, CellKind.DART, pool)),
        len(orbits(a, CellKind.FACE, pool)),
    )


def is_without_inversions(a: FinAction) -> bool:
    c = a.space
    for g in a.group.elements:
        for d in c.edges:
            if fixes_setwise(a, g, d, CellKind.DART) and not fixes_pointwise(a, g, d, CellKind.DART):
                return False
        for f in c.face_ids:
            if fixes_setwise(a, g, f, CellKind.FACE) and not fixes_pointwise(a, g, f, CellKind.FACE):
                return False
    return True


def _require_no_inversions(a: FinAction) -> None:
    if not is_without_inversions(a):
        raise InversionError("the action has inversions")


def fixed_subcomplex(a: FinAction, subgroup: Iterable[str]) -> Subcomplex:
    _require_no_inversions(a)
    elements = tuple(subgroup)
    c = a.space
    vertices = frozenset(v for v in c.vertices if all(a.maps[g].vmap[v] == v for g in elements))
    darts = frozenset(d for d in c.darts if all(a.maps[g].dmap[d] == d for g in elements))
    faces = frozenset(f for f in c.face_ids if all(a.maps[g].fmap[f] == FaceImage(f) for g in elements))
    return Subcomplex(c, vertices, darts, faces)


def is_invariant(a: FinAction, sub: Subcomplex, elements: Optional[Iterable[str]] = None) -> bool:
    pool = a.group.elements if elements is None else tuple(elements)
    for g in pool:
        m = a.maps[g]
        if not {m.vmap[v] for v in sub.vertices} <= sub.vertices:
            return False
        if not {m.dmap[d] for d in sub.darts} <= sub.darts:
            return False
        if not {m.fmap[f].image for f in sub.faces} <= sub.faces:
            return False
    return True


def equivariant_collapse(a: FinAction, z: Subcomplex) -> Subcomplex:
    """Collapse whole orbits of free edges together with their faces until none is left."""
    _require_no_inversions(a)
    if not is_invariant(a, z):
        raise InputError("subcomplex is not invariant under the action")
    c = a.space
    darts = set(z.darts)
    faces = set(z.faces)
    while True:
        free = free_edges(c, darts, faces)
        if not free:
            break
        e = free[0]
        face = next(f for f in sorted(faces) if any(c.edge_of(d) == e for d in c.faces[f]))
        for g in a.group.elements:
            moved = a.maps[g].dmap[e]
            darts.discard(moved)
            darts.discard(c.rev[moved])
            faces.discard(a.maps[g].fmap[face].image)
        logger.debug("collapsed orbit of edge %s with face %s", e, face)
    return Subcomplex(c, z.vertices, frozenset(darts), frozenset(faces))


def restrict_action(a: FinAction, sub: Subcomplex, elements: Optional[Iterable[str]] = None) -> FinAction:
    """Restrict to an invariant subcomplex and, optionally, a subgroup."""
    pool = a.group.elements if elements is None else tuple(elements)
    if not is_invariant(a, sub, pool):
        raise InputError("subcomplex is not invariant under the given elements")
    group = a.group.subgroup(pool)
    space = sub.to_complex()
    maps = {
        g: CombMap(
            space,
            space,
            {v: a.maps[g].vmap[v] for v in sub.vertices},
            {d: a.maps[g].dmap[d] for d in sub.darts},
            {f: a.maps[g].fmap[f] for f in sub.faces},
        )
        for g in group.elements
    }
    return FinAction(group, space, maps)


# ---------------------------------------------------------------------------
# Equivariant maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EqMap:
    source: FinAction
    target: FinAction
    f: CombMap
    fsharp: Mapping[str, str]

    def image_group(self) -> FrozenSet[str]:
        return frozenset(self.fsharp[g] for g in self.source.group.elements)


def identity_eq(a: FinAction) -> EqMap:
    return EqMap(a, a, identity_map(a.space), {g: g for g in a.group.elements})


def compose_eq(m2: EqMap, m1: EqMap) -> EqMap:
    return EqMap(
        m1.source,
        m2.target,
        compose(m2.f, m1.f),
        {g: m2.fsharp[h] for g, h in m1.fsharp.items()},
    )


def is_stabilizer_preserving(m: EqMap, kinds: Iterable[CellKind] = tuple(CellKind)) -> bool:
    """For every source cell, f# restricts to an isomorphism of pointwise stabilizers."""
    source, target = m.source, m.target
    for kind in kinds:
        if kind is CellKind.VERTEX:
            cells: Iterable[str] = source.space.vertices
        elif kind is CellKind.DART:
            cells = source.space.darts
        else:
            cells = source.space.face_ids
        for cell in cells:
            stab = stabilizer(source, cell)
            images = {m.fsharp[g] for g in stab}
            if len(images) != len(stab) or images != set(stabilizer(target, m.f.apply(cell))):
                return False
    return True


def validate_eq_map(m: EqMap) -> ValidationReport:
    errors: List[str] = []
    if m.f.source != m.source.space or m.f.target != m.target.space:
        errors.append("map does not run between the acted-on spaces")
        return report(errors)
    checked = validate_map(m.f)
    if not checked.ok:
        return report(list(checked.errors))
    if not is_homomorphism(m.source.group, m.target.group, m.fsharp):
        errors.append("fsharp is not a group homomorphism")
        return report(errors)
    for g in m.source.group.elements:
        left = compose(m.f, m.source.maps[g])
        right = compose(m.target.maps[m.fsharp[g]], m.f)
        if not left.same_as(right):
            errors.append(f"equivariance f(g.x) = f#(g).f(x) fails for g = {g}")
    if errors:
        return report(errors)
    fsharp_injective = len(set(m.fsharp.values())) == m.source.group.order
    return report(
        errors,
        inclusion=is_injective(m.f) and fsharp_injective,
        zero_surjective=set(m.f.vmap.values()) >= set(m.target.space.vertices),
        fsharp_surjective=m.image_group() == frozenset(m.target.group.elements),
        stabilizer_preserving=is_stabilizer_preserving(m),
    )
