"""Canonical small complexes, actions and maps referenced by name.

Vertex ids are ``v0, v1, ...`` (plus ``c`` for a wheel hub); in a cycle the
edge ``a`` runs v0 -> v1, ``b`` runs v1 -> v2 and so on.
"""
from __future__ import annotations

import re
import string
from typing import Callable, Dict, List, Union

from .actions import EqMap, FinAction, FinGroup, trivial_action
from .complexes import Complex2, SimpComplex, Subcomplex
from .maps import CombMap, FaceImage, inclusion
from .models import InputError

Fixture = Union[Complex2, SimpComplex, FinAction]


def _letters(n: int) -> List[str]:
    if n <= len(string.ascii_lowercase):
        return list(string.ascii_lowercase[:n])
    return [f"e{i}" for i in range(n)]


def cycle(n: int) -> Complex2:
    """Cycle graph with n vertices and no faces (n = 1 is a single loop)."""
    if n < 1:
        raise InputError("a cycle needs at least one vertex")
    names = _letters(n)
    edges = [(names[i], f"v{i}", f"v{(i + 1) % n}") for i in range(n)]
    return Complex2.build([f"v{i}" for i in range(n)], edges)


def disk3() -> Complex2:
    """
        v2
       /  \\
      c    b      one face [a, b, c]
     /      \\
    v0---a---v1
    """
    return Complex2.build(["v0", "v1", "v2"], _triangle_edges(), {"f": ["a", "b", "c"]})


def sphere2() -> Complex2:
    """Two triangles glued along their whole boundary."""
    return Complex2.build(["v0", "v1", "v2"], _triangle_edges(), {"f0": ["a", "b", "c"], "f1": ["a", "b", "c"]})


def _triangle_edges() -> List[tuple]:
    return [("a", "v0", "v1"), ("b", "v1", "v2"), ("c", "v2", "v0")]


def torus1() -> Complex2:
    return Complex2.build(["v"], [("a", "v", "v"), ("b", "v", "v")], {"f": ["a", "b", "-a", "-b"]})


def z3pres() -> Complex2:
    return Complex2.build(["v"], [("a", "v", "v")], {"f": ["a", "a", "a"]})


def s3pres() -> Complex2:
    """Presentation complex of <a, b | a^2, b^2, (ab)^3>."""
    return Complex2.build(
        ["v"],
        [("a", "v", "v"), ("b", "v", "v")],
        {"fa": ["a", "a"], "fb": ["b", "b"], "fab": ["a", "b", "a", "b", "a", "b"]},
    )


def path2() -> Complex2:
    return Complex2.build(["v0", "v1", "v2"], [("a", "v0", "v1"), ("b", "v1", "v2")])


def theta() -> Complex2:
    return Complex2.build(["v0", "v1"], [("a", "v0", "v1"), ("b", "v0", "v1"), ("c", "v0", "v1")])


def cyc2() -> Complex2:
    return Complex2.build(["v0", "v1"], [("a", "v0", "v1"), ("b", "v0", "v1")])


def wheel(n: int) -> Complex2:
    """
    Hub ``c``, rim cycle ``v0 .. v{n-1}``, spokes ``s{i}: c -> v{i}``, rim
    edges ``e{i}: v{i} -> v{i+1}`` and triangles ``t{i} = [s{i}, e{i}, -s{i+1}]``.
    """
    if n < 3:
        raise InputError("a wheel needs at least three spokes")
    vertices = ["c"] + [f"v{i}" for i in range(n)]
    edges = [(f"s{i}", "c", f"v{i}") for i in range(n)]
    edges += [(f"e{i}", f"v{i}", f"v{(i + 1) % n}") for i in range(n)]
    faces = {f"t{i}": [f"s{i}", f"e{i}", f"-s{(i + 1) % n}"] for i in range(n)}
    return Complex2.build(vertices, edges, faces)


def _rotate(c: Complex2, n: int, k: int) -> CombMap:
    def shift(cell: str) -> str:
        match = re.fullmatch(r"(-?[a-z])(\d+)", cell)
        if match is None:
            return cell
        return f"{match.group(1)}{(int(match.group(2)) + k) % n}"

    return CombMap(
        c,
        c,
        {v: shift(v) for v in c.vertices},
        {d: shift(d) for d in c.darts},
        {f: FaceImage(shift(f)) for f in c.face_ids},
    )


def wheel_rotation(n: int, step: int = 1) -> FinAction:
    """Rotations of Wheel(n) by multiples of ``step``; element ``r{k}`` turns by k."""
    if step < 1 or n % step:
        raise InputError(f"step {step} does not divide {n}")
    c = wheel(n)
    turns = list(range(0, n, step))
    names = [f"r{k}" for k in turns]
    table = {(f"r{i}", f"r{j}"): f"r{(i + j) % n}" for i in turns for j in turns}
    group = FinGroup(tuple(names), "r0", table)
    return FinAction(group, c, {f"r{k}": _rotate(c, n, k) for k in turns})


def sphere2_swap() -> FinAction:
    """Z/2 exchanging the two faces of Sphere2 and fixing the 1-skeleton."""
    c = sphere2()
    swap = CombMap(
        c,
        c,
        {v: v for v in c.vertices},
        {d: d for d in c.darts},
        {"f0": FaceImage("f1"), "f1": FaceImage("f0")},
    )
    identity = CombMap(c, c, {v: v for v in c.vertices}, {d: d for d in c.darts}, {f: FaceImage(f) for f in c.faces})
    group = FinGroup(("e", "s"), "e", {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"})
    return FinAction(group, c, {"e": identity, "s": swap})


def cyc2_inversion() -> FinAction:
    """Z/2 swapping v0 and v1 while sending each edge to itself reversed."""
    c = cyc2()
    flip = CombMap(c, c, {"v0": "v1", "v1": "v0"}, {"a": "-a", "-a": "a", "b": "-b", "-b": "b"})
    identity = CombMap(c, c, {v: v for v in c.vertices}, {d: d for d in c.darts})
    group = FinGroup(("e", "t"), "e", {("e", "e"): "e", ("e", "t"): "t", ("t", "e"): "t", ("t", "t"): "e"})
    return FinAction(group, c, {"e": identity, "t": flip})


# ---------------------------------------------------------------------------
# Simplicial fixtures
# ---------------------------------------------------------------------------


def simplicial_cycle(n: int) -> SimpComplex:
    vertices = [f"v{i}" for i in range(n)]
    return SimpComplex.build(vertices, [(vertices[i], vertices[(i + 1) % n]) for i in range(n)])


def octahedron() -> SimpComplex:
    """Antipodal pairs (x0, x1), (y0, y1), (z0, z1); eight triangles."""
    triangles = [(f"x{i}", f"y{j}", f"z{k}") for i in (0, 1) for j in (0, 1) for k in (0, 1)]
    return SimpComplex.build([], triangles)


def tetra_boundary() -> SimpComplex:
    vertices = ["v0", "v1", "v2", "v3"]
    return SimpComplex.build(vertices, [[v for v in vertices if v != skip] for skip in vertices])


def wheel_simplicial(n: int) -> SimpComplex:
    return SimpComplex.build([], [("c", f"v{i}", f"v{(i + 1) % n}") for i in range(n)])


# ---------------------------------------------------------------------------
# Maps between fixtures
# ---------------------------------------------------------------------------


def path2_to_cyc3() -> EqMap:
    """Path2 onto the darts a, b of Cyc3, trivial groups."""
    source, target = path2(), cycle(3)
    f = CombMap(source, target, {v: v for v in source.vertices}, {d: d for d in source.darts})
    return EqMap(trivial_action(source), trivial_action(target), f, {"e": "e"})


def vertex_to_cyc3(vertex: str = "v0") -> EqMap:
    target = cycle(3)
    point = Subcomplex.closure(target, [vertex])
    f = inclusion(point)
    return EqMap(trivial_action(f.source), trivial_action(target), f, {"e": "e"})


def wheel_double_wrap(step: int = 2) -> EqMap:
    """Wheel6 -> Wheel3 wrapping twice; ``step`` 1 maps Z/6 onto Z/3, step 2 maps Z/3 onto Z/3."""
    source, target = wheel_rotation(6, step), wheel_rotation(3, 1)

    def fold(cell: str) -> str:
        match = re.fullmatch(r"(-?[a-z])(\d+)", cell)
        return cell if match is None else f"{match.group(1)}{int(match.group(2)) % 3}"

    s, t = source.space, target.space
    f = CombMap(
        s,
        t,
        {v: fold(v) for v in s.vertices},
        {d: fold(d) for d in s.darts},
        {face: FaceImage(fold(face)) for face in s.face_ids},
    )
    return EqMap(source, target, f, {g: fold(g) for g in source.group.elements})


def disk3_to_z3pres() -> EqMap:
    """Collapse the triangle onto the relator loop of Z3pres."""
    source, target = disk3(), z3pres()
    dmap = {d: ("-a" if d.startswith("-") else "a") for d in source.darts}
    f = CombMap(source, target, {v: "v" for v in source.vertices}, dmap, {"f": FaceImage("f")})
    return EqMap(trivial_action(source), trivial_action(target), f, {"e": "e"})


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


_CATALOG: Dict[str, Callable[[], Fixture]] = {
    "disk3": disk3,
    "sphere2": sphere2,
    "torus1": torus1,
    "z3pres": z3pres,
    "s3pres": s3pres,
    "path2": path2,
    "theta": theta,
    "cyc2": cyc2,
    "oct": octahedron,
    "five_cycle": lambda: simplicial_cycle(5),
    "six_cycle": lambda: simplicial_cycle(6),
    "tetra_boundary": tetra_boundary,
    "wheel6_simplicial": lambda: wheel_simplicial(6),
    "sphere2_swap": sphere2_swap,
    "cyc2_inversion": cyc2_inversion,
    "wheel6_z6": lambda: wheel_rotation(6, 1),
    "wheel6_z3": lambda: wheel_rotation(6, 2),
    "wheel6_z2": lambda: wheel_rotation(6, 3),
    "wheel3_z3": lambda: wheel_rotation(3, 1),
}

_PATTERNS = (
    (re.compile(r"cyc(\d+)"), cycle),
    (re.compile(r"wheel(\d+)"), wheel),
)


def fixture_names() -> List[str]:
    return sorted(_CATALOG) + ["cyc<n>", "wheel<n>"]


def fixtures(name: str) -> Fixture:
    """Look up a catalog entry; ``cyc<n>`` and ``wheel<n>`` take any size."""
    key = name.strip().lower()
    if key in _CATALOG:
        return _CATALOG[key]()
    for pattern, factory in _PATTERNS:
        match = pattern.fullmatch(key)
        if match:
            return factory(int(match.group(1)))
    raise InputError(f"unknown fixture: {name}")


_MAP_CATALOG: Dict[str, Callable[[], EqMap]] = {
    "path2_cyc3": path2_to_cyc3,
    "vertex_cyc3": vertex_to_cyc3,
    "wheel6_wheel3": lambda: wheel_double_wrap(2),
    "wheel6_wheel3_z6": lambda: wheel_double_wrap(1),
    "disk3_z3pres": disk3_to_z3pres,
}


def eqmap_fixture(name: str) -> EqMap:
    key = name.strip().lower()
    if key not in _MAP_CATALOG:
        raise InputError(f"unknown map fixture: {name}")
    return _MAP_CATALOG[key]()


def map_fixture_names() -> List[str]:
    return sorted(_MAP_CATALOG)
