"""Combinatorial maps between 2-complexes and their local-injectivity tests."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from .complexes import Complex2, Subcomplex, link
from .models import InputError, ValidationReport, report


@dataclass(frozen=True)
class FaceImage:
    """Target face plus the rotation/flip aligning the boundary words.

    Unflipped: dart ``i`` of the source word maps to dart ``i + rot`` of the
    target word. Flipped: it maps to the reverse of dart ``rot - i``.
    """

    image: str
    rot: int = 0
    flip: bool = False

    def side(self, i: int, n: int) -> int:
        return (self.rot - i) % n if self.flip else (self.rot + i) % n

    def corner(self, i: int, n: int) -> int:
        return self.side(i - 1, n) if self.flip else self.side(i, n)


@dataclass(frozen=True)
class CombMap:
    source: Complex2 = field(repr=False)
    target: Complex2 = field(repr=False)
    vmap: Mapping[str, str]
    dmap: Mapping[str, str]
    fmap: Mapping[str, FaceImage] = field(default_factory=dict)

    def same_as(self, other: "CombMap") -> bool:
        return (
            dict(self.vmap) == dict(other.vmap)
            and dict(self.dmap) == dict(other.dmap)
            and dict(self.fmap) == dict(other.fmap)
        )

    def apply(self, cell: str) -> str:
        if cell in self.vmap:
            return self.vmap[cell]
        if cell in self.dmap:
            return self.dmap[cell]
        if cell in self.fmap:
            return self.fmap[cell].image
        raise InputError(f"unknown cell id: {cell}")


def expected_face_word(target: Complex2, image: FaceImage, n: int) -> Optional[List[str]]:
    word = target.faces.get(image.image)
    if word is None or len(word) != n:
        return None
    if image.flip:
        return [target.rev[word[image.side(i, n)]] for i in range(n)]
    return [word[image.side(i, n)] for i in range(n)]


def match_face(target: Complex2, word: List[str], hint: Optional[str] = None) -> Optional[FaceImage]:
    """Find a face of ``target`` whose boundary equals ``word`` after some rotation/flip."""
    n = len(word)
    candidates = [hint] if hint is not None and hint in target.faces else list(target.face_ids)
    for g in candidates:
        if len(target.faces[g]) != n:
            continue
        for flip in (False, True):
            for rot in range(n):
                guess = FaceImage(g, rot, flip)
                if expected_face_word(target, guess, n) == word:
                    return guess
    return None


def from_dart_map(
    source: Complex2,
    target: Complex2,
    vmap: Mapping[str, str],
    dmap: Mapping[str, str],
    face_hint: Optional[Mapping[str, str]] = None,
) -> CombMap:
    """Complete a vertex/dart assignment by matching face words; raises if some face has no image."""
    full_dmap = dict(dmap)
    for d, image in dmap.items():
        full_dmap.setdefault(source.rev[d], target.rev[image])
    fmap: Dict[str, FaceImage] = {}
    for f in source.face_ids:
        word = [full_dmap[d] for d in source.faces[f]]
        found = match_face(target, word, (face_hint or {}).get(f))
        if found is None:
            raise InputError(f"face {f} has no image face matching {word}")
        fmap[f] = found
    return CombMap(source, target, dict(vmap), full_dmap, fmap)


def identity_map(c: Complex2) -> CombMap:
    return CombMap(
        c, c, {v: v for v in c.vertices}, {d: d for d in c.darts}, {f: FaceImage(f) for f in c.face_ids}
    )


def inclusion(sub: Subcomplex) -> CombMap:
    return CombMap(
        sub.to_complex(),
        sub.parent,
        {v: v for v in sub.vertices},
        {d: d for d in sub.darts},
        {f: FaceImage(f) for f in sub.faces},
    )


def image(m: CombMap) -> Subcomplex:
    return Subcomplex.closure(
        m.target, m.vmap.values(), m.dmap.values(), (fi.image for fi in m.fmap.values())
    )


def corestrict(m: CombMap, sub: Subcomplex) -> CombMap:
    """Same assignments, viewed as a map into a subcomplex containing the image."""
    if not image(m).issubset(sub):
        raise InputError("image is not contained in the subcomplex")
    return CombMap(m.source, sub.to_complex(), m.vmap, m.dmap, m.fmap)


def restrict(m: CombMap, sub: Subcomplex) -> CombMap:
    return CombMap(
        sub.to_complex(),
        m.target,
        {v: m.vmap[v] for v in sub.vertices},
        {d: m.dmap[d] for d in sub.darts},
        {f: m.fmap[f] for f in sub.faces},
    )


def validate_map(m: CombMap) -> ValidationReport:
    errors: List[str] = []
    s, t = m.source, m.target
    target_vertices = set(t.vertices)
    for v in s.vertices:
        if v not in m.vmap:
            errors.append(f"vertex {v} has no image")
        elif m.vmap[v] not in target_vertices:
            errors.append(f"vertex {v} maps to unknown vertex {m.vmap[v]}")
    for d in s.darts:
        image_dart = m.dmap.get(d)
        if image_dart is None or image_dart not in t.src:
            errors.append(f"dart {d} has no valid image")
            continue
        if m.dmap.get(s.rev[d]) != t.rev[image_dart]:
            errors.append(f"dart map does not commute with rev at {d}")
        if m.vmap.get(s.src[d]) != t.src[image_dart] or m.vmap.get(s.dst[d]) != t.dst[image_dart]:
            errors.append(f"dart map does not commute with src/dst at {d}")
    for f in s.face_ids:
        fi = m.fmap.get(f)
        if fi is None:
            errors.append(f"face {f} has no image")
            continue
        expected = expected_face_word(t, fi, len(s.faces[f]))
        if expected is None:
            errors.append(f"face {f} maps to {fi.image} with a boundary of different length")
            continue
        actual = [m.dmap.get(d) for d in s.faces[f]]
        if actual != expected:
            errors.append(f"face {f} boundary does not map dart-by-dart onto {fi.image}")
    return report(errors)


def _require_valid(m: CombMap) -> None:
    checked = validate_map(m)
    if not checked.ok:
        raise InputError(f"invalid map: {checked.errors[0]}")


def is_immersion(m: CombMap) -> bool:
    """Injective on every vertex link (nodes and arcs)."""
    _require_valid(m)
    s = m.source
    for v in s.vertices:
        local = link(s, v)
        node_images = [m.dmap[d] for d in local.nodes]
        if len(set(node_images)) != len(node_images):
            return False
        arc_images = []
        for arc in local.arcs:
            fi = m.fmap[arc.face]
            arc_images.append((fi.image, fi.corner(arc.position, len(s.faces[arc.face]))))
        if len(set(arc_images)) != len(arc_images):
            return False
    return True


def is_covering(m: CombMap) -> bool:
    """Immersion whose link maps are also onto at every source vertex, and surjective on vertices."""
    if not is_immersion(m):
        return False
    s, t = m.source, m.target
    if set(m.vmap.values()) != set(t.vertices):
        return False
    for v in s.vertices:
        local = link(s, v)
        if len(local.nodes) != len(t.out_darts(m.vmap[v])):
            return False
        if len(local.arcs) != len(t.corners(m.vmap[v])):
            return False
    return True


def face_sides(c: Complex2) -> Dict[str, List[Tuple[str, int]]]:
    """Face sides (face, position) along each edge representative."""
    sides: Dict[str, List[Tuple[str, int]]] = defaultdict(list)
    for f in c.face_ids:
        for i, d in enumerate(c.faces[f]):
            sides[c.edge_of(d)].append((f, i))
    return sides


def is_near_immersion(m: CombMap) -> bool:
    """Face sides over each open edge map injectively; vertices are unconstrained."""
    _require_valid(m)
    s = m.source
    for sides in face_sides(s).values():
        images: Set[Tuple[str, int]] = set()
        for f, i in sides:
            fi = m.fmap[f]
            key = (fi.image, fi.side(i, len(s.faces[f])))
            if key in images:
                return False
            images.add(key)
    return True


def is_zero_surjective(m: CombMap) -> bool:
    return set(m.vmap.values()) >= set(m.target.vertices)


def is_injective(m: CombMap) -> bool:
    return all(
        len(set(values)) == len(values)
        for values in (list(m.vmap.values()), list(m.dmap.values()), [fi.image for fi in m.fmap.values()])
    )


def is_isomorphism(m: CombMap) -> bool:
    t = m.target
    return (
        is_injective(m)
        and set(m.vmap.values()) == set(t.vertices)
        and set(m.dmap.values()) == set(t.darts)
        and {fi.image for fi in m.fmap.values()} == set(t.face_ids)
    )


def _compose_face(outer: FaceImage, inner: FaceImage, n: int) -> FaceImage:
    rot = (outer.rot - inner.rot) % n if outer.flip else (outer.rot + inner.rot) % n
    return FaceImage(outer.image, rot, inner.flip != outer.flip)


def compose(m2: CombMap, m1: CombMap) -> CombMap:
    """``m2 ∘ m1``."""
    if m1.target != m2.source:
        raise InputError("cannot compose: target of the first map is not the source of the second")
    fmap: Dict[str, FaceImage] = {}
    for f, inner in m1.fmap.items():
        n = len(m1.source.faces[f])
        fmap[f] = _compose_face(m2.fmap[inner.image], inner, n)
    return CombMap(
        m1.source,
        m2.target,
        {v: m2.vmap[w] for v, w in m1.vmap.items()},
        {d: m2.dmap[e] for d, e in m1.dmap.items()},
        fmap,
    )


def compose_all(maps: Iterable[CombMap]) -> CombMap:
    """Compose maps listed outermost first."""
    chain = list(maps)
    if not chain:
        raise InputError("nothing to compose")
    result = chain[-1]
    for outer in reversed(chain[:-1]):
        result = compose(outer, result)
    return result
