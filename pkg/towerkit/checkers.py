"""Curvature, largeness, reducibility and fineness checks.

All angle arithmetic is exact: an angle is a Fraction ``p/q`` standing for
``p*pi/q``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .actions import FinAction, fixed_subcomplex
from .complexes import Complex2, SimpComplex, Subcomplex, collapse_faces, link
from .diagrams import SphereDiagram, sphere_search
from .models import Answer, InputError, ValidationReport, report
from .presentations import collapses_to_point, is_simply_connected

logger = logging.getLogger(__name__)

AngleAssignment = Mapping[str, Sequence[Fraction]]


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    certificate: Any = None
    warnings: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "certificate": self.certificate, "warnings": list(self.warnings)}


# ---------------------------------------------------------------------------
# Flag and k-large
# ---------------------------------------------------------------------------


def is_flag(s: SimpComplex) -> CheckResult:
    """Every 3-clique of the 1-skeleton spans a 2-simplex; 4-cliques are warned about."""
    warnings: List[str] = []
    for clique in nx.enumerate_all_cliques(s.graph()):
        if len(clique) == 3 and frozenset(clique) not in s.simplices:
            return CheckResult(False, {"clique": sorted(clique)})
        if len(clique) == 4:
            warnings.append(f"4-clique {sorted(clique)} would need a 3-simplex")
        if len(clique) > 4:
            break
    return CheckResult(True, None, tuple(sorted(warnings)))


def _canonical_cycle(cycle: Sequence[str]) -> List[str]:
    n = len(cycle)
    start = cycle.index(min(cycle))
    forward = [cycle[(start + i) % n] for i in range(n)]
    backward = [cycle[(start - i) % n] for i in range(n)]
    return min(forward, backward)


def _require_k(k: int) -> None:
    if k < 6:
        raise InputError(f"k must be at least 6, got {k}")


def is_k_large(s: SimpComplex, k: int) -> CheckResult:
    """Flag and no full cycle of length 4..k-1."""
    _require_k(k)
    flag = is_flag(s)
    if not flag:
        return flag
    short = [
        _canonical_cycle(cycle)
        for cycle in nx.chordless_cycles(s.graph(), length_bound=k - 1)
        if 4 <= len(cycle) <= k - 1
    ]
    if short:
        worst = min(short, key=lambda cyc: (len(cyc), cyc))
        return CheckResult(False, {"cycle": worst}, flag.warnings)
    return CheckResult(True, None, flag.warnings)


def is_locally_k_large(s: SimpComplex, k: int) -> CheckResult:
    _require_k(k)
    for simplex in sorted(s.simplices, key=lambda sigma: (len(sigma), sorted(sigma))):
        checked = is_k_large(s.link(simplex), k)
        if not checked:
            return CheckResult(False, {"simplex": sorted(simplex), "violation": checked.certificate})
    return CheckResult(True)


# ---------------------------------------------------------------------------
# Negative curvature
# ---------------------------------------------------------------------------


def validate_angles(c: Complex2, angles: AngleAssignment) -> ValidationReport:
    errors: List[str] = []
    for f in c.face_ids:
        corners = angles.get(f)
        if corners is None:
            errors.append(f"face {f} has no angles")
        elif len(corners) != len(c.faces[f]):
            errors.append(f"face {f} has {len(c.faces[f])} corners but {len(corners)} angles")
        elif any(Fraction(a) < 0 for a in corners):
            errors.append(f"face {f} has a negative angle")
    for f in sorted(set(angles) - set(c.faces)):
        errors.append(f"angles given for unknown face {f}")
    return report(errors)


def _lightest_circuit(c: Complex2, v: str, angles: AngleAssignment) -> Optional[Tuple[Fraction, Tuple[str, int]]]:
    g = nx.MultiGraph()
    local = link(c, v)
    g.add_nodes_from(local.nodes)
    for arc in local.arcs:
        weight = Fraction(angles[arc.face][arc.position])
        g.add_edge(arc.ends[0], arc.ends[1], key=(arc.face, arc.position), weight=weight)
    best: Optional[Tuple[Fraction, Tuple[str, int]]] = None
    for u, w, key, data in sorted(g.edges(keys=True, data=True), key=lambda e: e[2]):
        if u == w:
            total = data["weight"]
        else:
            rest = g.copy()
            rest.remove_edge(u, w, key=key)
            try:
                total = data["weight"] + nx.dijkstra_path_length(rest, w, u, weight="weight")
            except nx.NetworkXNoPath:
                continue
        if best is None or total < best[0]:
            best = (total, key)
    return best


def check_negative_curvature(c: Complex2, angles: AngleAssignment) -> CheckResult:
    """Face angle sums below (n-2) and every link circuit of measure at least 2 (times pi)."""
    checked = validate_angles(c, angles)
    if not checked:
        raise InputError(f"invalid angle assignment: {checked.errors[0]}")
    for f in c.face_ids:
        total = sum((Fraction(a) for a in angles[f]), Fraction(0))
        n = len(c.faces[f])
        if total >= n - 2:
            return CheckResult(False, {"face": f, "angle_sum": str(total), "bound": n - 2})
    for v in c.vertices:
        lightest = _lightest_circuit(c, v, angles)
        if lightest is not None and lightest[0] < 2:
            measure, (face, position) = lightest
            return CheckResult(False, {"vertex": v, "circuit_measure": str(measure), "through": [face, position]})
    return CheckResult(True)


# ---------------------------------------------------------------------------
# Diagrammatic reducibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DRCore:
    core: Subcomplex = field(repr=False)

    @property
    def empty(self) -> bool:
        return not self.core.faces

    def to_dict(self) -> Dict[str, Any]:
        return {"empty": self.empty, "faces": sorted(self.core.faces)}


def dr_core(c: Complex2, sub: Optional[Subcomplex] = None) -> DRCore:
    """Residue after deleting faces with a free edge for as long as possible."""
    faces = c.face_ids if sub is None else sorted(sub.faces)
    survivors = collapse_faces(c, faces)
    return DRCore(Subcomplex.closure(c, faces=survivors))


class DROutcome(str, Enum):
    CERTIFIED = "Certified"
    REFUTED = "Refuted"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class DRCertificate:
    outcome: DROutcome
    sphere: Optional[SphereDiagram] = field(default=None, repr=False)
    reason: str = ""


def dr_certify(c: Complex2, sphere_limit: int = 4, coset_limit: int = 2000) -> DRCertificate:
    try:
        connected = is_simply_connected(c, coset_limit)
    except InputError:
        connected = Answer.NO
    core = dr_core(c)
    if connected is Answer.YES and core.empty:
        return DRCertificate(DROutcome.CERTIFIED, reason="one-connected with empty free-edge core")
    sphere = sphere_search(c, sphere_limit)
    if sphere is not None:
        return DRCertificate(DROutcome.REFUTED, sphere, f"near-immersed sphere with {sphere.faces} faces")
    reason = "free-edge core is not empty" if connected is Answer.YES else f"one-connectedness is {connected.value}"
    logger.info("DR undecided: %s; no sphere with <= %d faces", reason, sphere_limit)
    return DRCertificate(DROutcome.UNKNOWN, reason=reason)


# ---------------------------------------------------------------------------
# Fineness
# ---------------------------------------------------------------------------


def fineness_profile(g: Complex2, max_length: int) -> Dict[str, List[int]]:
    """For each edge, circuit counts by length 1..max_length (index 0 is length 1)."""
    if g.faces:
        raise InputError("fineness profile needs a complex without faces")
    if max_length < 1:
        raise InputError("max_length must be at least 1")
    profile: Dict[str, List[int]] = {}
    for e in g.edges:
        counts = [0] * max_length
        u, w = g.src[e], g.dst[e]
        if u == w:
            counts[0] = 1
        else:
            for length in _path_lengths(g, w, u, {e, g.rev[e]}, max_length - 1):
                counts[length] += 1
        profile[e] = counts
    return profile


def _path_lengths(g: Complex2, start: str, goal: str, banned: Iterable[str], bound: int) -> List[int]:
    """Lengths of vertex-simple dart paths from start to goal avoiding banned darts."""
    banned = set(banned)
    found: List[int] = []
    stack = [(start, 0, frozenset([start]))]
    while stack:
        vertex, depth, visited = stack.pop()
        if depth >= bound:
            continue
        for d in g.out_darts(vertex):
            if d in banned:
                continue
            nxt = g.dst[d]
            if nxt == goal:
                found.append(depth + 1)
            elif nxt not in visited:
                stack.append((nxt, depth + 1, visited | {nxt}))
    return found


# ---------------------------------------------------------------------------
# Fixed points
# ---------------------------------------------------------------------------


def check_fixed_point_property(a: FinAction, subgroup: Iterable[str]) -> CheckResult:
    """Fixed subcomplex of a subgroup is nonempty and collapses to a point."""
    elements = sorted(subgroup)
    fixed = fixed_subcomplex(a, elements)
    if fixed.is_empty():
        return CheckResult(False, {"subgroup": elements, "reason": "empty fixed set"})
    if not collapses_to_point(fixed.to_complex()):
        return CheckResult(False, {"subgroup": elements, "reason": "fixed set does not collapse", **fixed.summary()})
    return CheckResult(True, {"subgroup": elements, **fixed.summary()})


def all_deletion_orders_agree(c: Complex2) -> bool:
    """Exhaustive confluence check of free-face deletion (small complexes only)."""
    cores = set()

    def explore(remaining: frozenset) -> None:
        counts = c.edge_multiplicity(sorted(remaining))
        choices = [f for f in sorted(remaining) if any(counts[c.edge_of(d)] == 1 for d in c.faces[f])]
        if not choices:
            cores.add(remaining)
            return
        for f in choices:
            explore(remaining - {f})

    explore(frozenset(c.face_ids))
    return len(cores) == 1
