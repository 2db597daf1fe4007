"""Van Kampen disk diagrams, spherical diagrams and filling estimates.

Disk search works on a *frontier*: the loop is laid out as a cycle and faces
are attached at frontier vertices, each attachment followed by folding every
adjacent pair of frontier darts whose images cancel. An empty frontier means
the region bounded by the loop is filled. Iterative deepening on the number of
faces makes the first diagram found one of least area.
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .complexes import Complex2, link
from .maps import CombMap, from_dart_map, is_immersion, is_near_immersion, validate_map
from .models import InputError, TowerInvariantError, UndecidedError, WordAnswer
from .presentations import default_oracle, free_reduce

logger = logging.getLogger(__name__)

Dart = Tuple[int, int]
Variant = Tuple[str, Tuple[str, ...]]


@dataclass(frozen=True)
class DiskDiagram:
    complex: Complex2 = field(repr=False)
    map: CombMap = field(repr=False)
    boundary: Tuple[str, ...]
    loop: Tuple[str, ...]

    @property
    def area(self) -> int:
        return len(self.complex.faces)

    def is_reduced(self) -> bool:
        """No two faces fold onto the same side of a target face across an edge."""
        return is_near_immersion(self.map)


@dataclass(frozen=True)
class SphereDiagram:
    complex: Complex2 = field(repr=False)
    map: CombMap = field(repr=False)

    @property
    def faces(self) -> int:
        return len(self.complex.faces)


def check_closed_path(c: Complex2, path: Sequence[str]) -> None:
    if not path:
        raise InputError("loop is empty")
    for d in path:
        if d not in c.src:
            raise InputError(f"unknown dart id: {d}")
    for first, second in zip(path, list(path[1:]) + [path[0]]):
        if c.dst[first] != c.src[second]:
            raise InputError(f"loop is not closed or not contiguous at {first} -> {second}")


def face_variants(c: Complex2) -> Dict[str, List[Variant]]:
    """Every rotation of every face boundary and of its inverse, keyed by start vertex."""
    found: Dict[str, Set[Variant]] = {v: set() for v in c.vertices}
    for f in c.face_ids:
        word = c.faces[f]
        inverse = tuple(c.rev[d] for d in reversed(word))
        for w in (word, inverse):
            for k in range(len(w)):
                rotated = w[k:] + w[:k]
                found[c.src[rotated[0]]].add((f, rotated))
    return {v: sorted(vs) for v, vs in found.items()}


def _first_fold(images: Sequence[str], rev: Dict[str, str]) -> Optional[int]:
    n = len(images)
    if n < 2:
        return None
    for i in range(n):
        if images[(i + 1) % n] == rev[images[i]]:
            return i
    return None


def _fold_all(images: Tuple[str, ...], rev: Dict[str, str]) -> Tuple[str, ...]:
    current = list(images)
    while True:
        i = _first_fold(current, rev)
        if i is None:
            return tuple(current)
        _drop_pair(current, i)


def _drop_pair(items: List, i: int) -> None:
    if i == len(items) - 1:
        del items[i]
        del items[0]
    else:
        del items[i : i + 2]


def _canonical(word: Tuple[str, ...]) -> Tuple[str, ...]:
    return min(word[k:] + word[:k] for k in range(len(word))) if word else word


class _FillingSearch:
    def __init__(self, c: Complex2) -> None:
        self.c = c
        self.rev = dict(c.rev)
        self.variants = face_variants(c)

    def run(self, loop: Sequence[str], max_area: int) -> Optional[List[Tuple[int, Variant]]]:
        start = _fold_all(tuple(loop), self.rev)
        for bound in range(max_area + 1):
            failed: Dict[Tuple[str, ...], int] = {}
            moves: List[Tuple[int, Variant]] = []
            if self._search(start, bound, failed, moves):
                logger.debug("filling of area %d found for a loop of length %d", bound, len(loop))
                return moves
        return None

    def _search(
        self, frontier: Tuple[str, ...], budget: int, failed: Dict[Tuple[str, ...], int], moves: List
    ) -> bool:
        if not frontier:
            return True
        if budget == 0:
            return False
        key = _canonical(frontier)
        if failed.get(key, -1) >= budget:
            return False
        n = len(frontier)
        for k in range(n):
            before, after = frontier[k - 1], frontier[k]
            for variant in self.variants[self.c.src[after]]:
                word = variant[1]
                if word[0] != self.rev[before] and word[-1] != self.rev[after]:
                    continue
                moves.append((k, variant))
                if self._search(_fold_all(frontier[:k] + word + frontier[k:], self.rev), budget - 1, failed, moves):
                    return True
                moves.pop()
        failed[key] = budget
        return False


class _DiagramBuilder:
    """Replays frontier moves, gluing diagram cells as darts fold together."""

    def __init__(self, c: Complex2, loop: Sequence[str]) -> None:
        self.c = c
        self.rev = dict(c.rev)
        self.vertex_parent: List[int] = []
        self.vertex_image: List[str] = []
        self.edge_ends: List[Tuple[int, int]] = []
        self.edge_image: List[str] = []
        self.alias: Dict[int, Tuple[int, int]] = {}
        self.faces: List[Tuple[str, List[Dart]]] = []
        corners = [self._vertex(c.src[d]) for d in loop]
        n = len(loop)
        self.frontier: List[Dart] = [self._edge(corners[i], corners[(i + 1) % n], d) for i, d in enumerate(loop)]
        self.boundary: List[Dart] = list(self.frontier)
        self._fold_all()

    def _vertex(self, image: str) -> int:
        self.vertex_parent.append(len(self.vertex_parent))
        self.vertex_image.append(image)
        return len(self.vertex_parent) - 1

    def _edge(self, u: int, w: int, image: str) -> Dart:
        self.edge_ends.append((u, w))
        self.edge_image.append(image)
        return (len(self.edge_ends) - 1, 1)

    def find(self, v: int) -> int:
        while self.vertex_parent[v] != v:
            self.vertex_parent[v] = self.vertex_parent[self.vertex_parent[v]]
            v = self.vertex_parent[v]
        return v

    def resolve(self, dart: Dart) -> Dart:
        e, s = dart
        while e in self.alias:
            e, t = self.alias[e]
            s *= t
        return (e, s)

    def image(self, dart: Dart) -> str:
        e, s = dart
        return self.edge_image[e] if s > 0 else self.c.rev[self.edge_image[e]]

    def src(self, dart: Dart) -> int:
        e, s = self.resolve(dart)
        return self.find(self.edge_ends[e][0] if s > 0 else self.edge_ends[e][1])

    def dst(self, dart: Dart) -> int:
        e, s = self.resolve(dart)
        return self.find(self.edge_ends[e][1] if s > 0 else self.edge_ends[e][0])

    def insert(self, k: int, face: str, word: Sequence[str]) -> None:
        corner = self.src(self.frontier[k])
        ends = [corner] + [self._vertex(self.c.src[d]) for d in word[1:]] + [corner]
        darts = [self._edge(ends[i], ends[i + 1], d) for i, d in enumerate(word)]
        self.faces.append((face, darts))
        self.frontier[k:k] = darts
        self._fold_all()

    def _fold_all(self) -> None:
        while True:
            i = _first_fold([self.image(d) for d in self.frontier], self.rev)
            if i is None:
                return
            x, y = self.frontier[i], self.frontier[(i + 1) % len(self.frontier)]
            self._glue(x, y)
            _drop_pair(self.frontier, i)

    def _glue(self, x: Dart, y: Dart) -> None:
        a, b = self.src(x), self.dst(y)
        if a != b:
            self.vertex_parent[max(a, b)] = min(a, b)
        r1, t1 = self.resolve(x)
        r2, t2 = self.resolve(y)
        if r1 != r2:
            self.alias[r2] = (r1, -t1 * t2)

    def build(self, loop: Sequence[str]) -> DiskDiagram:
        roots = sorted({self.find(v) for v in range(len(self.vertex_parent))})
        vname = {r: f"p{i}" for i, r in enumerate(roots)}
        live = [e for e in range(len(self.edge_ends)) if e not in self.alias]
        ename = {e: f"e{i}" for i, e in enumerate(live)}

        def dart_name(dart: Dart) -> str:
            e, s = self.resolve(dart)
            return ename[e] if s > 0 else f"-{ename[e]}"

        edges = [
            (ename[e], vname[self.find(self.edge_ends[e][0])], vname[self.find(self.edge_ends[e][1])]) for e in live
        ]
        faces = {f"t{i}": [dart_name(d) for d in darts] for i, (_, darts) in enumerate(self.faces)}
        diagram = Complex2.build(vname.values(), edges, faces)
        vmap = {vname[r]: self.vertex_image[r] for r in roots}
        dmap = {ename[e]: self.edge_image[e] for e in live}
        hints = {f"t{i}": face for i, (face, _) in enumerate(self.faces)}
        m = from_dart_map(diagram, self.c, vmap, dmap, hints)
        checked = validate_map(m)
        if not checked.ok:
            raise TowerInvariantError(f"disk diagram map is invalid: {checked.errors[0]}")
        if not diagram.is_connected() or diagram.euler_characteristic() != 1:
            raise TowerInvariantError("disk diagram is not a disk")
        return DiskDiagram(diagram, m, tuple(dart_name(d) for d in self.boundary), tuple(loop))


def minimal_area(c: Complex2, loop: Sequence[str], max_area: int) -> Optional[int]:
    check_closed_path(c, loop)
    moves = _FillingSearch(c).run(loop, max_area)
    return None if moves is None else len(moves)


def search_disk(c: Complex2, loop: Sequence[str], max_area: int) -> Optional[DiskDiagram]:
    """Least-area disk diagram for a closed dart path, or None within ``max_area``."""
    check_closed_path(c, loop)
    moves = _FillingSearch(c).run(loop, max_area)
    if moves is None:
        logger.info("no disk diagram of area <= %d for loop %s", max_area, list(loop))
        return None
    builder = _DiagramBuilder(c, loop)
    for k, (face, word) in moves:
        builder.insert(k, face, word)
    if builder.frontier:
        raise TowerInvariantError("replayed filling left an open frontier")
    return builder.build(loop)


# ---------------------------------------------------------------------------
# Dehn function estimate
# ---------------------------------------------------------------------------


def closed_paths(c: Complex2, max_length: int) -> Iterator[Tuple[str, ...]]:
    """Cyclically reduced closed dart paths up to rotation and reversal."""
    seen: Set[Tuple[str, ...]] = set()
    for start in c.vertices:
        stack: List[Tuple[str, ...]] = [(d,) for d in reversed(c.out_darts(start))]
        while stack:
            path = stack.pop()
            if c.dst[path[-1]] == start and path[-1] != c.rev[path[0]]:
                inverse = tuple(c.rev[d] for d in reversed(path))
                key = min(_canonical(path), _canonical(inverse))
                if key not in seen:
                    seen.add(key)
                    yield key
            if len(path) < max_length:
                for d in reversed(c.out_darts(c.dst[path[-1]])):
                    if d != c.rev[path[-1]]:
                        stack.append(path + (d,))


def dehn_estimate(c: Complex2, n: int, max_area: int, coset_limit: int = 2000) -> Dict[int, int]:
    """Largest least filling area over null-homotopic loops of each length bound 1..n."""
    if n < 1:
        raise InputError("length bound must be at least 1")
    oracle = default_oracle(c, coset_limit, max_area)
    p = oracle.presentation
    search = _FillingSearch(c)
    by_length: Counter[int] = Counter()
    for loop in closed_paths(c, n):
        moves = search.run(loop, max_area)
        if moves is not None:
            by_length[len(loop)] = max(by_length[len(loop)], len(moves))
            continue
        start = c.src[loop[0]]
        tree = p.tree_path(start)
        word = free_reduce(p.letters(tree + list(loop) + [c.rev[d] for d in reversed(tree)]))
        answer = oracle.decide(word)
        if answer is WordAnswer.NONTRIVIAL:
            continue
        raise UndecidedError(
            f"loop {list(loop)} has no filling of area <= {max_area} ({answer.value})", "area_limit", max_area
        )
    table: Dict[int, int] = {}
    best = 0
    for length in range(1, n + 1):
        best = max(best, by_length[length])
        table[length] = best
    return table


# ---------------------------------------------------------------------------
# Spherical diagrams
# ---------------------------------------------------------------------------


def _sphere_from_pairing(
    c: Complex2, copies: Sequence[Tuple[str, bool, Tuple[str, ...]]], pairing: Dict[Tuple[int, int], Tuple[int, int]]
) -> Optional[SphereDiagram]:
    corner_ids: Dict[Tuple[int, int], int] = {}
    for k, (_, _, word) in enumerate(copies):
        for i in range(len(word)):
            corner_ids[(k, i)] = len(corner_ids)
    uf = nx.utils.UnionFind(corner_ids.values())

    def corner(k: int, i: int) -> int:
        return corner_ids[(k, i % len(copies[k][2]))]

    edges: List[Tuple[str, int, int]] = []
    side_dart: Dict[Tuple[int, int], str] = {}
    dmap: Dict[str, str] = {}
    for (k, i), (j, l) in sorted(pairing.items()):
        if (k, i) > (j, l):
            continue
        uf.union(corner(k, i), corner(j, l + 1))
        uf.union(corner(k, i + 1), corner(j, l))
        name = f"e{len(edges)}"
        edges.append((name, corner(k, i), corner(k, i + 1)))
        side_dart[(k, i)], side_dart[(j, l)] = name, f"-{name}"
        dmap[name] = copies[k][2][i]
    roots = {cid: uf[cid] for cid in corner_ids.values()}
    vnames = {r: f"p{n}" for n, r in enumerate(sorted(set(roots.values())))}
    vmap = {vnames[roots[corner_ids[(k, i)]]]: c.src[copies[k][2][i]] for (k, i) in corner_ids}
    faces = {f"t{k}": [side_dart[(k, i)] for i in range(len(word))] for k, (_, _, word) in enumerate(copies)}
    sphere = Complex2.build(
        vnames.values(), [(name, vnames[roots[u]], vnames[roots[w]]) for name, u, w in edges], faces
    )
    if not sphere.is_connected() or sphere.euler_characteristic() != 2:
        return None
    for v in sphere.vertices:
        if not nx.is_connected(link(sphere, v).to_networkx()):
            return None
    hints = {f"t{k}": face for k, (face, _, _) in enumerate(copies)}
    m = from_dart_map(sphere, c, vmap, dmap, hints)
    if not validate_map(m).ok or not is_near_immersion(m):
        return None
    return SphereDiagram(sphere, m)


def _target_side(c: Complex2, copy: Tuple[str, bool, Tuple[str, ...]], i: int) -> Tuple[str, int]:
    face, flipped, word = copy
    n = len(word)
    return (face, (n - 1 - i) % n if flipped else i)


def sphere_search(c: Complex2, max_faces: int) -> Optional[SphereDiagram]:
    """Near-immersed spherical diagram with at most ``max_faces`` faces, or None."""
    if max_faces < 1:
        raise InputError("max_faces must be at least 1")
    variants = [(f, False, tuple(c.faces[f])) for f in c.face_ids] + [
        (f, True, tuple(c.rev[d] for d in reversed(c.faces[f]))) for f in c.face_ids
    ]
    variants.sort()
    for size in range(1, max_faces + 1):
        for copies in itertools.combinations_with_replacement(variants, size):
            sides = Counter(d for _, _, word in copies for d in word)
            if any(sides[d] != sides[c.rev[d]] for d in sides):
                continue
            found = _match_sides(c, list(copies))
            if found is not None:
                logger.info("near-immersed sphere with %d faces found", size)
                return found
    return None


def _match_sides(c: Complex2, copies: List[Tuple[str, bool, Tuple[str, ...]]]) -> Optional[SphereDiagram]:
    sides = [(k, i) for k, (_, _, word) in enumerate(copies) for i in range(len(word))]
    pairing: Dict[Tuple[int, int], Tuple[int, int]] = {}

    def extend() -> Optional[SphereDiagram]:
        free = next((s for s in sides if s not in pairing), None)
        if free is None:
            return _sphere_from_pairing(c, copies, pairing)
        k, i = free
        wanted = c.rev[copies[k][2][i]]
        mine = _target_side(c, copies[k], i)
        for j, l in sides:
            if (j, l) in pairing or (j, l) == free or copies[j][2][l] != wanted:
                continue
            if _target_side(c, copies[j], l) == mine:
                continue
            pairing[free], pairing[(j, l)] = (j, l), free
            found = extend()
            if found is not None:
                return found
            del pairing[free], pairing[(j, l)]
        return None

    return extend()


# ---------------------------------------------------------------------------
# Fine-graph inequality
# ---------------------------------------------------------------------------


class FineOutcome(str, Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class FineCheck:
    outcome: FineOutcome
    diam_source: Optional[int] = None
    diam_image: Optional[int] = None
    constant: Optional[int] = None
    dehn: Optional[int] = None
    reason: str = ""

    def to_dict(self) -> Dict[str, object]:
        return {
            "outcome": self.outcome.value,
            "diam_source": self.diam_source,
            "diam_image": self.diam_image,
            "constant": self.constant,
            "dehn": self.dehn,
            "reason": self.reason,
        }


def _diameter(c: Complex2, removed: str, vertices: Sequence[str]) -> Optional[int]:
    g = nx.Graph(c.graph())
    g.remove_node(removed)
    best = 0
    for u, w in itertools.combinations(sorted(set(vertices)), 2):
        try:
            best = max(best, nx.shortest_path_length(g, u, w))
        except nx.NetworkXNoPath:
            return None
    return best


def fine_inequality_check(
    m: CombMap,
    x0: str,
    neighbors: Sequence[str],
    max_area: int,
    sphere_limit: int = 4,
    coset_limit: int = 2000,
) -> FineCheck:
    """diam(f(A)) <= C * Dehn(diam(A) + 2) for a neighbor set A of x0."""
    from .checkers import DROutcome, dr_certify

    x, y = m.source, m.target
    if x0 not in set(x.vertices):
        raise InputError(f"unknown vertex id: {x0}")
    adjacent = {x.dst[d] for d in x.out_darts(x0)}
    if not set(neighbors) <= adjacent:
        raise InputError("every vertex of A must be adjacent to x0")
    if x0 in set(neighbors):
        raise InputError("A may not contain x0")
    if not is_immersion(m):
        raise InputError("the fine inequality needs an immersion X -> Y")
    certificate = dr_certify(y, sphere_limit, coset_limit)
    if certificate.outcome is not DROutcome.CERTIFIED:
        return FineCheck(FineOutcome.UNDECIDED, reason=f"target is not certified DR ({certificate.outcome.value})")
    diam_a = _diameter(x, x0, neighbors)
    diam_fa = _diameter(y, m.vmap[x0], [m.vmap[a] for a in neighbors])
    if diam_a is None or diam_fa is None:
        return FineCheck(FineOutcome.UNDECIDED, reason="A is not connected in the punctured 1-skeleton")
    constant = max((len(w) for w in y.faces.values()), default=0)
    try:
        dehn = dehn_estimate(y, diam_a + 2, max_area, coset_limit)[diam_a + 2]
    except UndecidedError as exc:
        return FineCheck(FineOutcome.UNDECIDED, diam_a, diam_fa, constant, reason=str(exc))
    outcome = FineOutcome.HOLDS if diam_fa <= constant * dehn else FineOutcome.VIOLATED
    if outcome is FineOutcome.VIOLATED:
        logger.warning("fine inequality violated on certified input: %d > %d * %d", diam_fa, constant, dehn)
    return FineCheck(outcome, diam_a, diam_fa, constant, dehn)
