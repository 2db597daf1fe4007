"""Covering spaces of finite 2-complexes and lifts of group actions.

Responsibilities
----------------
- FiniteCover: the cover read off a closed coset table, with its deck group.
- LazyCover: a cover explored on demand; vertices are path classes compared
  through a WordOracle, and any Unknown answer aborts.
- LiftedGroup: the extension of a base group by pi_1 acting on the universal
  cover, elements ``h|i`` = (h, class of a path from y0 to h.y0 ending on sheet i).
- H-regularity, intermediate covers and lifts of equivariant maps.

Cover cells are named ``<base cell>@<sheet>``; a one-sheeted cover keeps the
base names.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

from .actions import EqMap, FinAction, FinGroup, is_homomorphism, stabilizer, validate_action, validate_eq_map
from .complexes import Complex2
from .maps import CombMap, FaceImage
from .models import (
    Answer,
    InputError,
    NotOneConnectedError,
    OracleUnknown,
    TowerInvariantError,
    ValidationReport,
    WordAnswer,
    report,
)
from .presentations import (
    CosetTable,
    Letter,
    Presentation,
    Word,
    WordOracle,
    coset_enumerate,
    free_reduce,
    is_simply_connected,
    presentation,
)

logger = logging.getLogger(__name__)


def _face_positions(c: Complex2) -> Dict[Tuple[str, int], List[str]]:
    """(dart, position) -> faces whose boundary carries that dart at that position."""
    positions: Dict[Tuple[str, int], List[str]] = {}
    for f in c.face_ids:
        for i, d in enumerate(c.faces[f]):
            positions.setdefault((d, i), []).append(f)
    return positions


def _image_face(
    target: Complex2,
    positions: Mapping[Tuple[str, int], List[str]],
    first_image: str,
    base_image: FaceImage,
    n: int,
    base_of: Callable[[str], str],
) -> FaceImage:
    """Lifted face over ``base_image.image`` whose boundary starts as the lifted first dart dictates."""
    side = base_image.side(0, n)
    key = (target.rev[first_image], side) if base_image.flip else (first_image, side)
    faces = [f for f in positions.get(key, []) if base_of(f) == base_image.image]
    if len(faces) != 1:
        raise TowerInvariantError(f"expected one lifted face of {base_image.image} carrying {key}, found {faces}")
    return FaceImage(faces[0], base_image.rot, base_image.flip)


# ---------------------------------------------------------------------------
# Finite covers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteCover:
    base: Complex2 = field(repr=False)
    presentation: Presentation = field(repr=False)
    table: CosetTable = field(repr=False)
    complex: Complex2 = field(repr=False)
    projection: CombMap = field(repr=False)
    deck: FinAction = field(repr=False)
    sheet_of: Mapping[str, int] = field(repr=False)
    dart_index: Mapping[Tuple[str, int], str] = field(repr=False)

    @property
    def sheets(self) -> int:
        return self.table.index

    def name(self, cell: str, sheet: int) -> str:
        return cell if self.sheets == 1 else f"{cell}@{sheet}"

    @cached_property
    def representatives(self) -> List[Word]:
        return self.table.representatives()

    @cached_property
    def face_positions(self) -> Dict[Tuple[str, int], List[str]]:
        return _face_positions(self.complex)

    def step(self, sheet: int, base_dart: str) -> int:
        letter = self.presentation.letter(base_dart)
        return sheet if letter is None else self.table.act(sheet, letter)

    def lift_path(self, vertex: str, base_darts: Sequence[str]) -> str:
        """Endpoint of the lift of a base path starting at a cover vertex."""
        sheet = self.sheet_of[vertex]
        end = self.projection.vmap[vertex]
        for d in base_darts:
            sheet = self.step(sheet, d)
            end = self.base.dst[d]
        return self.name(end, sheet)

    def sheet_of_word(self, word: Sequence[Letter]) -> int:
        return self.table.trace(0, word)


def _build_cover(c: Complex2, p: Presentation, table: CosetTable) -> FiniteCover:
    n = table.index

    def name(x: str, s: int) -> str:
        return x if n == 1 else f"{x}@{s}"

    def step(s: int, d: str) -> int:
        letter = p.letter(d)
        return s if letter is None else table.act(s, letter)

    vertices = [name(v, s) for v in c.vertices for s in range(n)]
    sheet_of: Dict[str, int] = {name(v, s): s for v in c.vertices for s in range(n)}
    vmap = {name(v, s): v for v in c.vertices for s in range(n)}
    src: Dict[str, str] = {}
    dst: Dict[str, str] = {}
    rev: Dict[str, str] = {}
    dmap: Dict[str, str] = {}
    dart_index: Dict[Tuple[str, int], str] = {}
    for d in c.darts:
        for s in range(n):
            lifted = name(d, s)
            t = step(s, d)
            src[lifted], dst[lifted], rev[lifted] = name(c.src[d], s), name(c.dst[d], t), name(c.rev[d], t)
            dmap[lifted] = d
            dart_index[(d, s)] = lifted
            sheet_of[lifted] = s
    faces: Dict[str, Tuple[str, ...]] = {}
    fmap: Dict[str, FaceImage] = {}
    for f in c.face_ids:
        for s in range(n):
            sheet, word = s, []
            for d in c.faces[f]:
                word.append(name(d, sheet))
                sheet = step(sheet, d)
            if sheet != s:
                raise TowerInvariantError(f"face {f} does not close in the cover on sheet {s}")
            faces[name(f, s)] = tuple(word)
            fmap[name(f, s)] = FaceImage(f)
            sheet_of[name(f, s)] = s
    cover = Complex2(tuple(sorted(vertices)), src, dst, rev, faces)
    projection = CombMap(cover, c, vmap, dmap, fmap)
    reps = table.representatives()

    def translate(k: int, s: int) -> int:
        return table.trace(k, reps[s])

    deck_maps: Dict[str, CombMap] = {}
    for k in range(n):
        deck_maps[f"d{k}"] = CombMap(
            cover,
            cover,
            {name(v, s): name(v, translate(k, s)) for v in c.vertices for s in range(n)},
            {name(d, s): name(d, translate(k, s)) for d in c.darts for s in range(n)},
            {name(f, s): FaceImage(name(f, translate(k, s))) for f in c.face_ids for s in range(n)},
        )
    deck_table = {(f"d{a}", f"d{b}"): f"d{translate(a, b)}" for a in range(n) for b in range(n)}
    deck = FinAction(FinGroup(tuple(f"d{k}" for k in range(n)), "d0", deck_table), cover, deck_maps)
    return FiniteCover(c, p, table, cover, projection, deck, sheet_of, dart_index)


def universal_cover_finite(c: Complex2, limit: int, verify: bool = True) -> FiniteCover:
    """Universal cover when the coset enumeration of the trivial subgroup closes within ``limit``."""
    if not c.is_connected():
        raise InputError("complex is disconnected")
    p = presentation(c)
    table = coset_enumerate(p, [], limit)
    cover = _build_cover(c, p, table)
    logger.debug("universal cover with %d sheets: %s", cover.sheets, cover.complex.summary())
    if verify and is_simply_connected(cover.complex, limit) is Answer.NO:
        raise TowerInvariantError("constructed universal cover is not simply connected")
    return cover


# ---------------------------------------------------------------------------
# Lazy covers
# ---------------------------------------------------------------------------


class LazyCover:
    """Universal cover of a finite base, materialized one cell at a time.

    A vertex is a base vertex plus the word of a path reaching it; two words
    name the same vertex exactly when the oracle calls their quotient trivial.
    """

    def __init__(self, base: Complex2, oracle: WordOracle) -> None:
        self._base = base
        self._oracle = oracle
        self._p = oracle.presentation
        self._sheets: Dict[str, List[Word]] = {v: [] for v in base.vertices}
        self._vertex_base: Dict[str, str] = {}
        self._vertex_word: Dict[str, Word] = {}
        self._src: Dict[str, str] = {}
        self._dst: Dict[str, str] = {}
        self._rev: Dict[str, str] = {}
        self._dart_base: Dict[str, str] = {}
        self._faces: Dict[str, Tuple[str, ...]] = {}
        self._face_base: Dict[str, str] = {}
        self.basepoint = self._vertex(self._p.basepoint, ())

    @property
    def base(self) -> Complex2:
        return self._base

    def _vertex(self, base_vertex: str, word: Sequence[Letter]) -> str:
        word = free_reduce(word)
        known = self._sheets[base_vertex]
        for index, other in enumerate(known):
            answer = self._oracle.equal(other, word)
            if answer is WordAnswer.TRIVIAL:
                return f"{base_vertex}@{index}"
            if answer is WordAnswer.UNKNOWN:
                raise OracleUnknown(f"cannot decide whether two lifts of {base_vertex} coincide", "oracle")
        known.append(word)
        name = f"{base_vertex}@{len(known) - 1}"
        self._vertex_base[name] = base_vertex
        self._vertex_word[name] = word
        return name

    def base_of(self, cell: str) -> str:
        for table in (self._vertex_base, self._dart_base, self._face_base):
            if cell in table:
                return table[cell]
        raise InputError(f"cell {cell} is not materialized")

    def lift_dart(self, vertex: str, base_dart: str) -> str:
        base = self._base
        if self._vertex_base.get(vertex) != base.src.get(base_dart):
            raise InputError(f"dart {base_dart} does not start at the base of {vertex}")
        sheet = vertex.rsplit("@", 1)[1]
        lifted = f"{base_dart}@{sheet}"
        if lifted in self._src:
            return lifted
        letter = self._p.letter(base_dart)
        word = self._vertex_word[vertex] + ((letter,) if letter else ())
        end = self._vertex(base.dst[base_dart], word)
        back = f"{base.rev[base_dart]}@{end.rsplit('@', 1)[1]}"
        self._src[lifted], self._dst[lifted], self._rev[lifted] = vertex, end, back
        self._src[back], self._dst[back], self._rev[back] = end, vertex, lifted
        self._dart_base[lifted], self._dart_base[back] = base_dart, base.rev[base_dart]
        return lifted

    def lift_path(self, vertex: str, base_darts: Sequence[str]) -> List[str]:
        lifted: List[str] = []
        for d in base_darts:
            step = self.lift_dart(vertex, d)
            lifted.append(step)
            vertex = self._dst[step]
        return lifted

    def endpoint(self, vertex: str, base_darts: Sequence[str]) -> str:
        path = self.lift_path(vertex, base_darts)
        return self._dst[path[-1]] if path else vertex

    def lift_vertex(self, base_path: Sequence[str]) -> str:
        return self.endpoint(self.basepoint, base_path)

    def lift_face(self, vertex: str, face: str, position: int = 0) -> str:
        """Lift of ``face`` whose corner ``position`` sits at ``vertex``."""
        base = self._base
        word = base.faces[face]
        back = [base.rev[word[k]] for k in range(position - 1, -1, -1)]
        corner = self.endpoint(vertex, back)
        name = f"{face}@{corner.rsplit('@', 1)[1]}"
        if name not in self._faces:
            boundary = self.lift_path(corner, word)
            if self._dst[boundary[-1]] != corner:
                raise TowerInvariantError(f"lift of face {face} does not close")
            self._faces[name] = tuple(boundary)
            self._face_base[name] = face
        return name

    def dst(self, dart: str) -> str:
        return self._dst[dart]

    def boundary(self, face: str) -> Tuple[str, ...]:
        return self._faces[face]

    def vertices_over(self, base_vertex: str) -> List[str]:
        return [f"{base_vertex}@{k}" for k in range(len(self._sheets[base_vertex]))]

    def materialize(self) -> Tuple[Complex2, CombMap]:
        """Everything lifted so far, with its projection to the base."""
        cover = Complex2(
            tuple(sorted(self._vertex_base)), dict(self._src), dict(self._dst), dict(self._rev), dict(self._faces)
        )
        projection = CombMap(
            cover,
            self._base,
            dict(self._vertex_base),
            dict(self._dart_base),
            {f: FaceImage(b) for f, b in self._face_base.items()},
        )
        return cover, projection


def lazy_cover(c: Complex2, oracle: WordOracle) -> LazyCover:
    if not c.is_connected():
        raise InputError("complex is disconnected")
    return LazyCover(c, oracle)


def lazy_span(cover: LazyCover, vertices: Iterable[str]) -> Tuple[Complex2, CombMap]:
    """Span of a finite vertex set inside a lazy cover, with its projection.

    A lifted cell belongs to the span when it lifts a base cell whose lifted
    boundary lies in the set already collected.
    """
    base = cover.base
    keep = set(vertices)
    darts = set()
    for v in sorted(keep):
        for d in base.out_darts(cover.base_of(v)):
            lifted = cover.lift_dart(v, d)
            if cover.dst(lifted) in keep:
                darts.add(lifted)
    faces = {}
    for v in sorted(keep):
        b = cover.base_of(v)
        for f, i in base.corners(b):
            if i != 0:
                continue
            lifted = cover.lift_face(v, f, 0)
            boundary = cover.boundary(lifted)
            if set(boundary) <= darts:
                faces[lifted] = boundary
    full, projection = cover.materialize()
    region = Complex2(
        tuple(sorted(keep)),
        {d: full.src[d] for d in darts},
        {d: full.dst[d] for d in darts},
        {d: full.rev[d] for d in darts},
        faces,
    )
    return region, CombMap(
        region,
        base,
        {v: projection.vmap[v] for v in keep},
        {d: projection.dmap[d] for d in darts},
        {f: projection.fmap[f] for f in faces},
    )


# ---------------------------------------------------------------------------
# Lifted groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiftedGroup:
    group: FinGroup
    action: FinAction = field(repr=False)
    cover: FiniteCover = field(repr=False)
    base_action: FinAction = field(repr=False)
    projection: Mapping[str, str] = field(repr=False)

    @property
    def kernel(self) -> FrozenSet[str]:
        identity = self.base_action.group.identity
        return frozenset(x for x, h in self.projection.items() if h == identity)

    def element(self, h: str, sheet: int) -> str:
        return f"{h}|{sheet}"

    def eq_projection(self) -> EqMap:
        return EqMap(self.action, self.base_action, self.cover.projection, dict(self.projection))

    def subgroup_of_words(self, words: Iterable[Sequence[Letter]]) -> FrozenSet[str]:
        """Image in the kernel of the pi_1 subgroup generated by ``words``."""
        identity = self.base_action.group.identity
        gens = [self.element(identity, self.cover.sheet_of_word(w)) for w in words]
        return self.group.generated(gens)


def lifted_group(a: FinAction, limit: int) -> LiftedGroup:
    """Lift an action on Y to the universal cover (finite pi_1 only)."""
    c = a.space
    cover = universal_cover_finite(c, limit)
    p = cover.presentation
    y0 = p.basepoint
    reps = cover.representatives
    base_paths: Dict[str, List[str]] = {}
    for v in c.vertices:
        for j, w in enumerate(reps):
            base_paths[cover.name(v, j)] = p.word_loop(w) + p.tree_path(v)

    def automorphism(h: str, sheet: int) -> CombMap:
        hm = a.maps[h]
        start = cover.name(hm.vmap[y0], sheet)
        vmap = {x: cover.lift_path(start, [hm.dmap[d] for d in path]) for x, path in base_paths.items()}
        dmap: Dict[str, str] = {}
        for (d, s), lifted in cover.dart_index.items():
            image_src = vmap[cover.name(c.src[d], s)]
            dmap[lifted] = cover.dart_index[(hm.dmap[d], cover.sheet_of[image_src])]
        fmap: Dict[str, FaceImage] = {}
        for f in c.face_ids:
            n = len(c.faces[f])
            for s in range(cover.sheets):
                lifted_face = cover.name(f, s)
                first = dmap[cover.complex.faces[lifted_face][0]]
                fmap[lifted_face] = _image_face(
                    cover.complex, cover.face_positions, first, hm.fmap[f], n, lambda x: cover.projection.fmap[x].image
                )
        return CombMap(cover.complex, cover.complex, vmap, dmap, fmap)

    names: List[str] = []
    maps: Dict[str, CombMap] = {}
    projection: Dict[str, str] = {}
    for h in a.group.elements:
        for s in range(cover.sheets):
            x = f"{h}|{s}"
            names.append(x)
            maps[x] = automorphism(h, s)
            projection[x] = h
    b0 = cover.name(y0, 0)
    table: Dict[Tuple[str, str], str] = {}
    for x in names:
        for y in names:
            end = maps[x].vmap[maps[y].vmap[b0]]
            table[(x, y)] = f"{a.group.mul(projection[x], projection[y])}|{cover.sheet_of[end]}"
    identity = f"{a.group.identity}|0"
    group = FinGroup(tuple(names), identity, table)
    logger.debug("lifted group of order %d over %d sheets", group.order, cover.sheets)
    return LiftedGroup(group, FinAction(group, cover.complex, maps), cover, a, projection)


def verify_lifted_group(lg: LiftedGroup) -> ValidationReport:
    """Order, exactness, equivariance and vertex-stabilizer checks for a lifted group."""
    errors: List[str] = []
    base_group = lg.base_action.group
    expected_order = lg.cover.sheets * base_group.order
    if lg.group.order != expected_order:
        errors.append(f"|lifted group| = {lg.group.order}, expected {expected_order}")
    checked = validate_action(lg.action)
    errors.extend(f"lifted action: {e}" for e in checked.errors)
    if not is_homomorphism(lg.group, base_group, lg.projection):
        errors.append("projection to the base group is not a homomorphism")
    if set(lg.projection.values()) != set(base_group.elements):
        errors.append("projection to the base group is not onto")
    kernel = lg.kernel
    if len(kernel) != lg.cover.sheets:
        errors.append(f"kernel has {len(kernel)} elements, pi_1 has {lg.cover.sheets}")
    for x in sorted(kernel):
        deck_name = f"d{x.rsplit('|', 1)[1]}"
        if not lg.action.maps[x].same_as(lg.cover.deck.maps[deck_name]):
            errors.append(f"kernel element {x} does not act as a deck transformation")
    if not errors:
        eq = validate_eq_map(lg.eq_projection())
        errors.extend(f"projection: {e}" for e in eq.errors)
    stabilizers_ok = True
    if not errors:
        for v in lg.cover.complex.vertices:
            upstairs = stabilizer(lg.action, v)
            downstairs = stabilizer(lg.base_action, lg.cover.projection.vmap[v])
            images = {lg.projection[x] for x in upstairs}
            if len(images) != len(upstairs) or images != set(downstairs):
                stabilizers_ok = False
                errors.append(f"stabilizer of {v} does not restrict to an isomorphism")
                break
    return report(
        errors,
        order=lg.group.order,
        pi1_order=lg.cover.sheets,
        base_order=base_group.order,
        stabilizers_isomorphic=stabilizers_ok,
    )


def is_h_regular(subgroup_words: Iterable[Sequence[Letter]], a: FinAction, limit: int) -> bool:
    lg = lifted_group(a, limit)
    return lg.group.is_normal(lg.subgroup_of_words(subgroup_words))


# ---------------------------------------------------------------------------
# Intermediate covers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntermediateLift:
    complex: Complex2 = field(repr=False)
    action: FinAction = field(repr=False)
    eq_map: EqMap = field(repr=False)
    sheets: int = 1


def intermediate_lift(subgroup_words: Iterable[Sequence[Letter]], a: FinAction, limit: int) -> IntermediateLift:
    """Cover of Y for a normal-in-H~ subgroup K of pi_1, with the action of H~/K."""
    lg = lifted_group(a, limit)
    cover = lg.cover
    k_elements = lg.subgroup_of_words(subgroup_words)
    if not lg.group.is_normal(k_elements):
        raise InputError("the subgroup is not H-regular")
    k_sheets = sorted(int(x.rsplit("|", 1)[1]) for x in k_elements)
    reps = cover.representatives
    orbit_of: Dict[int, FrozenSet[int]] = {}
    for s in range(cover.sheets):
        orbit_of[s] = frozenset(cover.table.trace(k, reps[s]) for k in k_sheets)
    classes = sorted(set(orbit_of.values()), key=min)
    class_index = {s: classes.index(orbit_of[s]) for s in range(cover.sheets)}
    single = len(classes) == 1
    base = a.space

    def quotient(cell: str) -> str:
        if cell in cover.projection.vmap:
            b = cover.projection.vmap[cell]
        elif cell in cover.projection.dmap:
            b = cover.projection.dmap[cell]
        else:
            b = cover.projection.fmap[cell].image
        return b if single else f"{b}@{class_index[cover.sheet_of[cell]]}"

    up = cover.complex
    src = {quotient(d): quotient(up.src[d]) for d in up.darts}
    dst = {quotient(d): quotient(up.dst[d]) for d in up.darts}
    rev = {quotient(d): quotient(up.rev[d]) for d in up.darts}
    faces = {quotient(f): tuple(quotient(d) for d in up.faces[f]) for f in up.face_ids}
    down = Complex2(tuple(sorted({quotient(v) for v in up.vertices})), src, dst, rev, faces)

    cosets: Dict[FrozenSet[str], List[str]] = {}
    for x in lg.group.elements:
        coset = frozenset(lg.group.mul(x, k) for k in k_elements)
        cosets.setdefault(coset, []).append(x)
    full_kernel = k_elements == lg.kernel

    def coset_name(coset: FrozenSet[str]) -> str:
        return lg.projection[min(coset)] if full_kernel else min(coset)

    coset_of = {x: coset for coset in cosets for x in coset}
    names = {coset: coset_name(coset) for coset in cosets}
    elements = tuple(sorted(names.values()))
    table = {
        (names[c1], names[c2]): names[coset_of[lg.group.mul(min(c1), min(c2))]] for c1 in cosets for c2 in cosets
    }
    identity = names[coset_of[lg.group.identity]]
    group = FinGroup(elements, identity, table)
    maps: Dict[str, CombMap] = {}
    for coset, label in names.items():
        sigma = lg.action.maps[min(coset)]
        vmap = {quotient(v): quotient(sigma.vmap[v]) for v in up.vertices}
        dmap = {quotient(d): quotient(sigma.dmap[d]) for d in up.darts}
        fmap = {
            quotient(f): FaceImage(quotient(sigma.fmap[f].image), sigma.fmap[f].rot, sigma.fmap[f].flip)
            for f in up.face_ids
        }
        maps[label] = CombMap(down, down, vmap, dmap, fmap)
    action = FinAction(group, down, maps)
    proj_v = {quotient(v): cover.projection.vmap[v] for v in up.vertices}
    proj_d = {quotient(d): cover.projection.dmap[d] for d in up.darts}
    proj_f = {quotient(f): cover.projection.fmap[f] for f in up.face_ids}
    fsharp = {names[coset]: lg.projection[min(coset)] for coset in cosets}
    eq = EqMap(action, a, CombMap(down, base, proj_v, proj_d, proj_f), fsharp)
    checked = validate_eq_map(eq)
    if not checked.ok or not checked.properties.get("stabilizer_preserving"):
        raise TowerInvariantError(f"intermediate cover projection failed its checks: {list(checked.errors)}")
    return IntermediateLift(down, action, eq, len(classes))


# ---------------------------------------------------------------------------
# Lifting equivariant maps
# ---------------------------------------------------------------------------


def lift_eq_map(m: EqMap, lg: LiftedGroup, coset_limit: int = 2000) -> EqMap:
    """Lift ``m: X -> Y`` through the universal cover of Y, equivariantly."""
    x_space = m.source.space
    if is_simply_connected(x_space, coset_limit) is not Answer.YES:
        raise NotOneConnectedError("source complex is not certified one-connected")
    if m.target.space != lg.base_action.space:
        raise InputError("map target is not the base of the lifted group")
    cover = lg.cover
    f = m.f
    x0 = x_space.vertices[0]
    vmap: Dict[str, str] = {x0: cover.lift_path(cover.name(cover.presentation.basepoint, 0),
                                                cover.presentation.tree_path(f.vmap[x0]))}
    dmap: Dict[str, str] = {}
    queue = deque([x0])
    while queue:
        u = queue.popleft()
        for d in x_space.out_darts(u):
            lifted = cover.dart_index[(f.dmap[d], cover.sheet_of[vmap[u]])]
            end = cover.complex.dst[lifted]
            dmap[d] = lifted
            w = x_space.dst[d]
            if w not in vmap:
                vmap[w] = end
                queue.append(w)
            elif vmap[w] != end:
                raise TowerInvariantError(f"lift of the map is not well defined at {w}")
    fmap: Dict[str, FaceImage] = {}
    for face in x_space.face_ids:
        n = len(x_space.faces[face])
        first = dmap[x_space.faces[face][0]]
        fmap[face] = _image_face(
            cover.complex, cover.face_positions, first, f.fmap[face], n, lambda x: cover.projection.fmap[x].image
        )
    lifted_map = CombMap(x_space, cover.complex, vmap, dmap, fmap)
    base_vertex = vmap[x0]
    fsharp: Dict[str, str] = {}
    for g in m.source.group.elements:
        wanted = vmap[m.source.maps[g].vmap[x0]]
        h = m.fsharp[g]
        match = next(
            (
                lg.element(h, s)
                for s in range(cover.sheets)
                if lg.action.maps[lg.element(h, s)].vmap[base_vertex] == wanted
            ),
            None,
        )
        if match is None:
            raise TowerInvariantError(f"no lift of {h} carries the lifted basepoint as required by {g}")
        fsharp[g] = match
    lifted = EqMap(m.source, lg.action, lifted_map, fsharp)
    checked = validate_eq_map(lifted)
    if not checked.ok:
        raise TowerInvariantError(f"lifted map failed validation: {checked.errors[0]}")
    return lifted


# ---------------------------------------------------------------------------
# Lifting automorphisms into a lazily explored region
# ---------------------------------------------------------------------------


def lift_region_maps(
    cover: LazyCover,
    region: Complex2,
    base_maps: Mapping[str, CombMap],
    start: str,
    images: Mapping[str, str],
) -> Dict[str, CombMap]:
    """Lift base automorphisms to a finite invariant region of a lazy cover.

    ``images[label]`` is where the lift of ``base_maps[label]`` sends ``start``.
    """
    paths: Dict[str, List[str]] = {start: []}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for d in region.out_darts(u):
            w = region.dst[d]
            if w not in paths:
                paths[w] = paths[u] + [cover.base_of(d)]
                queue.append(w)
    if len(paths) != len(region.vertices):
        raise InputError("region is not connected")
    positions = _face_positions(region)
    result: Dict[str, CombMap] = {}
    region_vertices = set(region.vertices)
    for label, hm in base_maps.items():
        vmap = {v: cover.endpoint(images[label], [hm.dmap[d] for d in path]) for v, path in paths.items()}
        if not set(vmap.values()) <= region_vertices:
            raise InputError("region is not invariant under the lifted automorphisms")
        dmap = {d: cover.lift_dart(vmap[region.src[d]], hm.dmap[cover.base_of(d)]) for d in region.darts}
        if not set(dmap.values()) <= set(region.src):
            raise InputError("region is not invariant under the lifted automorphisms")
        fmap: Dict[str, FaceImage] = {}
        for face in region.face_ids:
            base_face = cover.base_of(face)
            n = len(region.faces[face])
            fmap[face] = _image_face(
                region, positions, dmap[region.faces[face][0]], hm.fmap[base_face], n, cover.base_of
            )
        result[label] = CombMap(region, region, vmap, dmap, fmap)
    return result
