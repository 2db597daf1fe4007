"""Equivariant towers, maximal lifting and the subgroup core.

Responsibilities
----------------
- TowerStep / TowerCert: a factorization Y_n -> ... -> Y through inclusions
  and covers, stored from Y outward.
- Complexity (d - r, e), compared lexicographically.
- max_f_tower_lift / max_tower_lift: repeatedly pass to the span (or image) of
  the lifted map in a cover until the complexity stops decreasing.
- is_maximal_lift and validate_tower.
- subgroup_core: build a one-connected G-complex over Y and push it through
  the lifting engine.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .actions import (
    EqMap,
    FinAction,
    FinGroup,
    compose_eq,
    identity_eq,
    orbit_counts,
    orbits,
    restrict_action,
    validate_eq_map,
)
from .complexes import Complex2, Subcomplex, is_full, span
from .covers import LazyCover, lazy_span, lift_eq_map, lift_region_maps, lifted_group
from .diagrams import search_disk
from .ledger import NullLedger, RunLedger
from .maps import (
    CombMap,
    FaceImage,
    compose,
    corestrict,
    image,
    inclusion,
    is_covering,
    is_immersion,
    is_isomorphism,
    is_near_immersion,
    is_zero_surjective,
)
from .models import (
    Answer,
    Budgets,
    CellKind,
    InputError,
    NotOneConnectedError,
    TowerInvariantError,
    UndecidedError,
    ValidationReport,
    report,
)
from .presentations import default_oracle, is_simply_connected, presentation

logger = logging.getLogger(__name__)


class StepKind(str, Enum):
    INCLUSION = "Inclusion"
    FULL_INCLUSION = "FullInclusion"
    COVER = "Cover"


class LiftMode(str, Enum):
    TOWER = "tower"
    F_TOWER = "f-tower"


@dataclass(frozen=True)
class TowerStep:
    kind: StepKind
    eq_map: EqMap = field(repr=False)
    complete: bool = True
    h_regular: bool = True

    def is_trivial(self) -> bool:
        m = self.eq_map
        images = set(m.fsharp.values())
        return is_isomorphism(m.f) and len(images) == m.source.group.order == m.target.group.order

    def to_dict(self) -> Dict[str, object]:
        m = self.eq_map
        return {
            "kind": self.kind.value,
            "complete": self.complete,
            "h_regular": self.h_regular,
            "source": m.source.space.summary(),
            "target": m.target.space.summary(),
            "source_group_order": m.source.group.order,
            "target_group_order": m.target.group.order,
        }


def compose_steps(steps: Sequence[TowerStep]) -> EqMap:
    """Composite Y_n -> Y of steps listed from Y outward."""
    if not steps:
        raise InputError("a tower needs at least one step")
    result = steps[-1].eq_map
    for outer in reversed(steps[:-1]):
        result = compose_eq(outer.eq_map, result)
    return result


@dataclass(frozen=True)
class TowerCert:
    steps: Tuple[TowerStep, ...]
    composite: EqMap = field(repr=False)

    @property
    def length(self) -> int:
        return len(self.steps)

    def is_trivial(self) -> bool:
        return all(step.is_trivial() for step in self.steps)

    def kinds(self) -> List[str]:
        return [step.kind.value for step in self.steps]

    def to_dict(self) -> Dict[str, object]:
        return {"length": self.length, "trivial": self.is_trivial(), "steps": [s.to_dict() for s in self.steps]}


@dataclass(frozen=True, order=True)
class Complexity:
    orbit_gap: int
    edges: int

    def to_list(self) -> List[int]:
        return [self.orbit_gap, self.edges]


@dataclass(frozen=True)
class LiftResult:
    lift: EqMap = field(repr=False)
    tower: TowerCert = field(repr=False)
    complexities: Tuple[Complexity, ...] = ()

    def to_dict(self) -> Dict[str, object]:
        return {
            "lift_target": self.lift.target.space.summary(),
            "lift_group_order": self.lift.target.group.order,
            "tower": self.tower.to_dict(),
            "complexities": [c.to_list() for c in self.complexities],
        }


def complexity(m: EqMap) -> Complexity:
    d = orbit_counts(m.source).vertices
    hit = set(m.f.vmap.values())
    image_group = [g for g in m.target.group.elements if g in m.image_group()]
    r = sum(1 for orbit in orbits(m.target, CellKind.VERTEX, image_group) if orbit <= hit)
    return Complexity(d - r, orbit_counts(m.target).edges)


# ---------------------------------------------------------------------------
# Validation and maximality
# ---------------------------------------------------------------------------


def _same_eq(a: EqMap, b: EqMap) -> bool:
    return (
        a.source.space == b.source.space
        and a.target.space == b.target.space
        and a.f.same_as(b.f)
        and dict(a.fsharp) == dict(b.fsharp)
    )


def validate_tower(t: TowerCert) -> ValidationReport:
    errors: List[str] = []
    f_tower = True
    for index, step in enumerate(t.steps):
        m = step.eq_map
        checked = validate_eq_map(m)
        if not checked.ok:
            errors.extend(f"step {index}: {e}" for e in checked.errors)
            continue
        if step.kind in (StepKind.INCLUSION, StepKind.FULL_INCLUSION):
            if not checked.properties["inclusion"]:
                errors.append(f"step {index}: inclusion is not injective")
            full = is_full(m.target.space, image(m.f))
            if step.kind is StepKind.FULL_INCLUSION and not full:
                errors.append(f"step {index}: image is not a full subcomplex")
            f_tower = f_tower and full
        else:
            local = is_covering(m.f) if step.complete else is_immersion(m.f)
            if not local:
                errors.append(f"step {index}: cover projection is not locally bijective")
            if not step.h_regular:
                errors.append(f"step {index}: cover is not H-regular")
    for index, (outer, inner) in enumerate(zip(t.steps, t.steps[1:])):
        if outer.eq_map.source.space != inner.eq_map.target.space or (
            outer.eq_map.source.group.elements != inner.eq_map.target.group.elements
        ):
            errors.append(f"steps {index} and {index + 1} do not compose")
    immersion = False
    if not errors and t.steps:
        composite = compose_steps(t.steps)
        if not _same_eq(composite, t.composite):
            errors.append("stored composite differs from the composition of the steps")
        immersion = is_immersion(t.composite.f)
        if not immersion:
            errors.append("composite is not an immersion")
    return report(errors, f_tower=f_tower, immersion=immersion, length=t.length)


def _require_one_connected(c: Complex2, coset_limit: int) -> None:
    answer = is_simply_connected(c, coset_limit)
    if answer is Answer.NO:
        raise NotOneConnectedError("source complex is not simply connected")
    if answer is Answer.UNKNOWN:
        raise UndecidedError("cannot certify that the source is one-connected", "coset_limit", coset_limit)


def is_maximal_lift(m: EqMap, mode: LiftMode, coset_limit: int = 2000) -> bool:
    _require_one_connected(m.source.space, coset_limit)
    checked = validate_eq_map(m)
    if not checked.ok:
        raise InputError(f"invalid equivariant map: {checked.errors[0]}")
    target = m.target.space
    if mode is LiftMode.TOWER:
        onto = (
            set(m.f.vmap.values()) == set(target.vertices)
            and set(m.f.dmap.values()) == set(target.darts)
            and {fi.image for fi in m.f.fmap.values()} == set(target.face_ids)
        )
    else:
        onto = is_zero_surjective(m.f)
    if not onto or not checked.properties["fsharp_surjective"]:
        return False
    answer = is_simply_connected(target, coset_limit)
    if answer is Answer.UNKNOWN:
        raise UndecidedError("cannot decide whether the target is simply connected", "coset_limit", coset_limit)
    return answer is Answer.YES


# ---------------------------------------------------------------------------
# Lifting engine
# ---------------------------------------------------------------------------


def _pass_to_subcomplex(lifted: EqMap, full: bool) -> Tuple[TowerStep, EqMap]:
    """Restrict the codomain to the span (or image) of the map and to the image group."""
    ambient = lifted.target
    sub = image(lifted.f)
    if full:
        sub = span(ambient.space, sub)
    used = lifted.image_group()
    action = restrict_action(ambient, sub, [g for g in ambient.group.elements if g in used])
    step_map = EqMap(action, ambient, inclusion(sub), {g: g for g in action.group.elements})
    narrowed = EqMap(lifted.source, action, corestrict(lifted.f, sub), dict(lifted.fsharp))
    return TowerStep(StepKind.FULL_INCLUSION if full else StepKind.INCLUSION, step_map), narrowed


def _lift_finite(current: EqMap, budgets: Budgets) -> Tuple[EqMap, EqMap]:
    lg = lifted_group(current.target, budgets.coset_limit)
    return lg.eq_projection(), lift_eq_map(current, lg, budgets.coset_limit)


def _lift_lazy(current: EqMap, budgets: Budgets) -> Tuple[EqMap, EqMap]:
    """Lift into a finite invariant region of the universal cover explored on demand."""
    base_action = current.target
    y = base_action.space
    x_action = current.source
    x = x_action.space
    oracle = default_oracle(y, budgets.coset_limit, budgets.area_limit)
    cover = LazyCover(y, oracle)
    f = current.f
    x0 = x.vertices[0]
    vmap = {x0: cover.lift_vertex(oracle.presentation.tree_path(f.vmap[x0]))}
    dmap: Dict[str, str] = {}
    queue = deque([x0])
    while queue:
        u = queue.popleft()
        for d in x.out_darts(u):
            lifted = cover.lift_dart(vmap[u], f.dmap[d])
            dmap[d] = lifted
            w, end = x.dst[d], cover.dst(lifted)
            if w not in vmap:
                vmap[w] = end
                queue.append(w)
            elif vmap[w] != end:
                raise TowerInvariantError(f"lift of the map is not well defined at {w}")
    fmap: Dict[str, FaceImage] = {}
    for face in x.face_ids:
        fi = f.fmap[face]
        corner = vmap[x.src[x.faces[face][0]]]
        lifted_face = cover.lift_face(corner, fi.image, fi.corner(0, len(x.faces[face])))
        fmap[face] = FaceImage(lifted_face, fi.rot, fi.flip)
    hit = set(vmap.values())
    core, _ = lazy_span(cover, hit)
    for v in sorted(hit):
        for d in y.out_darts(cover.base_of(v)):
            cover.lift_dart(v, d)
    whole, projection = cover.materialize()
    darts = set(core.src) | {d for d in whole.src if whole.src[d] in hit or whole.dst[d] in hit}
    vertices = hit | {whole.dst[d] for d in darts}
    region = Subcomplex(whole, frozenset(vertices), frozenset(darts), frozenset(core.faces)).to_complex()
    base_maps = {g: base_action.maps[current.fsharp[g]] for g in x_action.group.elements}
    images = {g: vmap[x_action.maps[g].vmap[x0]] for g in x_action.group.elements}
    lifted_maps = lift_region_maps(cover, region, base_maps, vmap[x0], images)
    label: Dict[str, str] = {}
    for g in x_action.group.elements:
        label[g] = next((k for k in sorted(set(label.values())) if lifted_maps[k].same_as(lifted_maps[g])), g)
    names = tuple(sorted(set(label.values()), key=x_action.group.elements.index))
    table = {(a, b): label[x_action.group.mul(a, b)] for a in names for b in names}
    group = FinGroup(names, label[x_action.group.identity], table)
    region_action = FinAction(group, region, {k: lifted_maps[k] for k in names})
    down = CombMap(
        region,
        y,
        {v: projection.vmap[v] for v in region.vertices},
        {d: projection.dmap[d] for d in region.darts},
        {face: projection.fmap[face] for face in region.face_ids},
    )
    cover_map = EqMap(region_action, base_action, down, {k: current.fsharp[k] for k in names})
    lifted_map = EqMap(x_action, region_action, CombMap(x, region, vmap, dmap, fmap), label)
    logger.debug("lazy cover region: %s, lifted group order %d", region.summary(), group.order)
    return cover_map, lifted_map


def _lift_tower(m: EqMap, budgets: Budgets, mode: LiftMode, ledger: Optional[RunLedger]) -> LiftResult:
    ledger = ledger or NullLedger()
    full = mode is LiftMode.F_TOWER
    _require_one_connected(m.source.space, budgets.coset_limit)
    checked = validate_eq_map(m)
    if not checked.ok:
        raise InputError(f"invalid equivariant map: {checked.errors[0]}")
    d = orbit_counts(m.source).vertices
    first, current = _pass_to_subcomplex(m, full)
    steps: List[TowerStep] = [first]
    measure = complexity(current)
    history = [measure]
    ledger.record("tower", "step", first.kind.value, **first.to_dict())
    ledger.record("tower", "complexity", str(measure.to_list()), round=0, value=measure.to_list())
    for round_number in range(1, budgets.max_rounds + 1):
        target = current.target.space
        if is_simply_connected(target, budgets.coset_limit) is Answer.YES:
            logger.info("lift target is simply connected after %d rounds", round_number - 1)
            break
        complete = bool(target.faces)
        if complete:
            try:
                cover_map, lifted = _lift_finite(current, budgets)
            except UndecidedError:
                logger.info("finite universal cover undecided; exploring a lazy region")
                complete = False
        if not complete:
            cover_map, lifted = _lift_lazy(current, budgets)
        narrowing, candidate = _pass_to_subcomplex(lifted, full)
        new_measure = complexity(candidate)
        if orbit_counts(candidate.source).vertices != d:
            raise TowerInvariantError("vertex orbit count of the source changed while lifting")
        down = compose(cover_map.f, narrowing.eq_map.f)
        logger.debug("round %d complexity %s -> %s", round_number, measure.to_list(), new_measure.to_list())
        if full:
            if new_measure == measure:
                if len(set(down.vmap.values())) != len(down.vmap) or not is_zero_surjective(down):
                    raise TowerInvariantError("equal complexity but the lift is not bijective on vertices")
                break
            if new_measure > measure:
                raise TowerInvariantError(f"complexity increased: {measure.to_list()} -> {new_measure.to_list()}")
        else:
            if is_isomorphism(down):
                break
            if new_measure.orbit_gap > measure.orbit_gap:
                raise TowerInvariantError("orbit gap increased while lifting")
        cover_step = TowerStep(StepKind.COVER, cover_map, complete=complete)
        steps.extend([cover_step, narrowing])
        for step in (cover_step, narrowing):
            ledger.record("tower", "step", step.kind.value, **step.to_dict())
        value = new_measure.to_list()
        ledger.record("tower", "complexity", str(value), round=round_number, value=value)
        current, measure = candidate, new_measure
        history.append(measure)
    else:
        raise UndecidedError("no maximal lift within the round budget", "max_rounds", budgets.max_rounds)
    if not is_maximal_lift(current, mode, budgets.coset_limit):
        raise TowerInvariantError("final lift fails the maximality characterization")
    tower = TowerCert(tuple(steps), compose_steps(steps))
    if not _same_eq(compose_eq(tower.composite, current), m):
        raise TowerInvariantError("tower composed with the lift does not reproduce the input map")
    ledger.record("tower", "done", f"{tower.length} steps", kinds=tower.kinds())
    return LiftResult(current, tower, tuple(history))


def max_f_tower_lift(m: EqMap, budgets: Optional[Budgets] = None, ledger: Optional[RunLedger] = None) -> LiftResult:
    return _lift_tower(m, budgets or Budgets(), LiftMode.F_TOWER, ledger)


def max_tower_lift(m: EqMap, budgets: Optional[Budgets] = None, ledger: Optional[RunLedger] = None) -> LiftResult:
    return _lift_tower(m, budgets or Budgets(), LiftMode.TOWER, ledger)


# ---------------------------------------------------------------------------
# Subgroup core
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoreResult:
    action: FinAction = field(repr=False)
    eq_map: EqMap = field(repr=False)
    lift: LiftResult = field(repr=False)
    skeleton: Subcomplex = field(repr=False)

    @property
    def core(self) -> FinAction:
        return self.lift.lift.target

    def to_dict(self) -> Dict[str, object]:
        return {
            "x": self.action.space.summary(),
            "group_order": self.action.group.order,
            "one_skeleton": self.skeleton.summary(),
            "core": self.core.space.summary(),
            "lift": self.lift.to_dict(),
        }


def shortest_path(c: Complex2, start: str, goal: str) -> List[str]:
    """Shortest dart path, lexicographically least among shortest ones."""
    distance = nx.single_source_shortest_path_length(c.graph(), goal)
    if start not in distance:
        raise InputError(f"{goal} is not reachable from {start}")
    path: List[str] = []
    vertex = start
    while vertex != goal:
        step = min(d for d in c.out_darts(vertex) if distance.get(c.dst[d]) == distance[vertex] - 1)
        path.append(step)
        vertex = c.dst[step]
    return path


def _attach_disks(
    a: FinAction, group: Sequence[str], skeleton: Subcomplex, disks: Sequence[Tuple[CombMap, Tuple[str, ...]]]
) -> Tuple[FinAction, EqMap]:
    """Glue a copy of every disk for every group element onto the invariant 1-skeleton."""
    y = a.space
    vertices = set(skeleton.vertices)
    src = {d: y.src[d] for d in skeleton.darts}
    dst = {d: y.dst[d] for d in skeleton.darts}
    rev = {d: y.rev[d] for d in skeleton.darts}
    faces: Dict[str, Tuple[str, ...]] = {}
    vmap = {v: v for v in skeleton.vertices}
    dmap = {d: d for d in skeleton.darts}
    fmap: Dict[str, FaceImage] = {}
    copy_names: List[Tuple[str, Dict[str, str]]] = []
    for i, (disk_map, boundary) in enumerate(disks):
        disk = disk_map.source
        on_boundary = set(boundary) | {disk.rev[d] for d in boundary}
        boundary_vertices = {disk.src[d] for d in boundary}
        for g in group:
            moved = compose(a.maps[g], disk_map)
            rename: Dict[str, str] = {}
            for v in disk.vertices:
                rename[v] = moved.vmap[v] if v in boundary_vertices else f"{v}[{g}/{i}]"
            for d in disk.darts:
                if d in on_boundary:
                    rename[d] = moved.dmap[d]
                elif d.startswith("-"):
                    rename[d] = f"-{d[1:]}[{g}/{i}]"
                else:
                    rename[d] = f"{d}[{g}/{i}]"
            for face in disk.face_ids:
                rename[face] = f"{face}[{g}/{i}]"
            for v in disk.vertices:
                if v not in boundary_vertices:
                    vertices.add(rename[v])
                    vmap[rename[v]] = moved.vmap[v]
            for d in disk.darts:
                if d not in on_boundary:
                    src[rename[d]], dst[rename[d]] = rename[disk.src[d]], rename[disk.dst[d]]
                    rev[rename[d]] = rename[disk.rev[d]]
                    dmap[rename[d]] = moved.dmap[d]
            for face in disk.face_ids:
                faces[rename[face]] = tuple(rename[d] for d in disk.faces[face])
                fmap[rename[face]] = moved.fmap[face]
            copy_names.append((f"{g}/{i}", rename))
    x = Complex2(tuple(sorted(vertices)), src, dst, rev, faces)
    sub_group = a.group.subgroup(group)
    maps: Dict[str, CombMap] = {}
    for h in sub_group.elements:
        hm = a.maps[h]

        def move(cell: str) -> str:
            if "[" not in cell:
                return hm.apply(cell)
            stem, tag = cell.rsplit("[", 1)
            g, i = tag.rstrip("]").split("/")
            return f"{stem}[{sub_group.mul(h, g)}/{i}]"

        maps[h] = CombMap(
            x,
            x,
            {v: move(v) for v in x.vertices},
            {d: move(d) for d in x.darts},
            {face: FaceImage(move(face)) for face in x.face_ids},
        )
    action = FinAction(sub_group, x, maps)
    eq_map = EqMap(action, a, CombMap(x, y, vmap, dmap, fmap), {g: g for g in sub_group.elements})
    return action, eq_map


def subgroup_core(
    a: FinAction,
    gens: Iterable[str],
    budgets: Optional[Budgets] = None,
    basepoint: Optional[str] = None,
    ledger: Optional[RunLedger] = None,
) -> CoreResult:
    """One-connected G-complex over Y for G = <gens>, then its maximal F-tower lift."""
    budgets = budgets or Budgets()
    y = a.space
    _require_one_connected(y, budgets.coset_limit)
    gens = sorted(set(gens))
    elements = a.group.generated(gens)
    group = [g for g in a.group.elements if g in elements]
    y0 = y.vertices[0] if basepoint is None else basepoint
    if y0 not in set(y.vertices):
        raise InputError(f"unknown vertex id: {y0}")
    paths = [shortest_path(y, y0, a.maps[g].vmap[y0]) for g in gens]
    seed = Subcomplex.closure(y, [y0], [d for path in paths for d in path])
    translates = [
        Subcomplex.closure(y, [a.maps[g].vmap[v] for v in seed.vertices], [a.maps[g].dmap[d] for d in seed.darts])
        for g in group
    ]
    skeleton = translates[0]
    for t in translates[1:]:
        skeleton = skeleton.union(t)
    graph = skeleton.to_complex()
    p = presentation(graph, y0)
    disks: List[Tuple[CombMap, Tuple[str, ...]]] = []
    for gen in p.generators:
        loop = p.dart_loop(gen)
        diagram = search_disk(y, loop, budgets.area_limit)
        if diagram is None:
            raise UndecidedError(f"no disk diagram for loop {loop}", "area_limit", budgets.area_limit)
        disks.append((diagram.map, diagram.boundary))
    logger.debug("core 1-skeleton %s with %d relator disks", skeleton.summary(), len(disks))
    action, eq_map = _attach_disks(a, group, skeleton, disks)
    checked = validate_eq_map(eq_map)
    if not checked.ok:
        raise TowerInvariantError(f"assembled complex does not map equivariantly: {checked.errors[0]}")
    if is_simply_connected(action.space, budgets.coset_limit) is not Answer.YES:
        raise UndecidedError("cannot certify that the assembled complex is one-connected", "coset_limit")
    lift = max_f_tower_lift(eq_map, budgets, ledger)
    verdict = validate_tower(lift.tower)
    if not verdict.ok or not verdict.properties["f_tower"]:
        raise TowerInvariantError(f"core tower failed validation: {list(verdict.errors)}")
    if not is_near_immersion(lift.tower.composite.f):
        raise TowerInvariantError("core tower is not a near-immersion")
    return CoreResult(action, eq_map, lift, skeleton)


def tower_is_identity(t: TowerCert) -> bool:
    return _same_eq(t.composite, identity_eq(t.composite.target))
