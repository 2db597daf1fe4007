"""JSON documents for complexes, maps, actions, angle assignments and eq-maps.

Every loader checks the document against its schema first and raises
InputError listing all problems; dumpers produce plain dicts ready for
``json.dumps(..., sort_keys=True)``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from .actions import EqMap, FinAction, FinGroup, trivial_action, validate_action
from .checkers import AngleAssignment
from .complexes import Complex2, SimpComplex, validate_complex, validate_simplicial
from .fixtures import eqmap_fixture, fixtures
from .maps import CombMap, FaceImage, match_face
from .models import InputError
from .validation import validate_document

FIXTURE_PREFIX = "fixture:"

Document = Union[str, Mapping[str, Any]]


def read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc


def dump_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _checked(doc: Mapping[str, Any], schema: str) -> Mapping[str, Any]:
    if not isinstance(doc, Mapping):
        raise InputError(f"{schema} document must be a JSON object")
    errors = validate_document(dict(doc), schema)
    if errors:
        raise InputError(f"invalid {schema} document: " + "; ".join(errors))
    return doc


def _fixture(doc: Document) -> Optional[object]:
    if isinstance(doc, str):
        if not doc.startswith(FIXTURE_PREFIX):
            raise InputError(f"expected a document or '{FIXTURE_PREFIX}<name>', got {doc!r}")
        return fixtures(doc[len(FIXTURE_PREFIX):])
    return None


# ---- complexes ----


def complex_from_doc(doc: Document) -> Complex2:
    named = _fixture(doc)
    if named is not None:
        if isinstance(named, FinAction):
            return named.space
        if not isinstance(named, Complex2):
            raise InputError(f"fixture {doc} is not a 2-complex")
        return named
    doc = _checked(doc, "complex2")
    edges = [(e["id"], e["from"], e["to"]) for e in doc["edges"]]
    faces: Dict[str, List[str]] = {}
    for entry in doc.get("faces", []):
        if entry["id"] in faces:
            raise InputError(f"duplicate face id: {entry['id']}")
        faces[entry["id"]] = list(entry["boundary"])
    c = Complex2.build(doc["vertices"], edges, faces)
    checked = validate_complex(c)
    if not checked.ok:
        raise InputError("invalid complex: " + "; ".join(checked.errors))
    return c


def complex_to_doc(c: Complex2) -> Dict[str, Any]:
    return {
        "vertices": list(c.vertices),
        "edges": [{"id": e, "from": c.src[e], "to": c.dst[e]} for e in c.edges],
        "faces": [{"id": f, "boundary": list(c.faces[f])} for f in c.face_ids],
    }


def simplicial_from_doc(doc: Document) -> SimpComplex:
    named = _fixture(doc)
    if named is not None:
        if not isinstance(named, SimpComplex):
            raise InputError(f"fixture {doc} is not a simplicial complex")
        return named
    doc = _checked(doc, "simplicial")
    s = SimpComplex.build(doc.get("vertices", []), doc["simplices"])
    checked = validate_simplicial(s)
    if not checked.ok:
        raise InputError("invalid simplicial complex: " + "; ".join(checked.errors))
    return s


def simplicial_to_doc(s: SimpComplex) -> Dict[str, Any]:
    top = [sorted(x) for x in s.simplices if not any(x < y for y in s.simplices)]
    return {"vertices": sorted(s.vertices), "simplices": sorted(top, key=lambda x: (len(x), x))}


# ---- maps ----


def map_from_doc(doc: Mapping[str, Any], source: Complex2, target: Complex2) -> CombMap:
    """Read ``vertex_map``/``edge_map``/``face_map``.

    ``edge_map`` sends an edge to a target dart, ``"-b"`` being ``b`` reversed;
    the reverse dart follows. Faces left out of ``face_map`` are matched.
    """
    doc = _checked(doc, "map")
    dmap: Dict[str, str] = {}
    for e, image in doc["edge_map"].items():
        if e not in source.src or image not in target.src:
            raise InputError(f"unknown dart in map: {e} -> {image}")
        for d, d_image in ((e, image), (source.rev[e], target.rev[image])):
            if dmap.setdefault(d, d_image) != d_image:
                raise InputError(f"conflicting images for dart {d}: {dmap[d]} and {d_image}")
    missing = [e for e in source.edges if e not in dmap]
    if missing:
        raise InputError(f"edge_map misses edges {missing}")
    fmap = {
        f: FaceImage(entry["image"], int(entry.get("rot", 0)), bool(entry.get("flip", False)))
        for f, entry in doc.get("face_map", {}).items()
    }
    for f in source.face_ids:
        if f not in fmap:
            word = [dmap[d] for d in source.faces[f]]
            found = match_face(target, word)
            if found is None:
                raise InputError(f"face {f} has no image face matching {word}")
            fmap[f] = found
    return CombMap(source, target, dict(doc["vertex_map"]), dmap, fmap)


def map_to_doc(m: CombMap) -> Dict[str, Any]:
    return {
        "vertex_map": dict(sorted(m.vmap.items())),
        "edge_map": {e: m.dmap[e] for e in m.source.edges if e in m.dmap},
        "face_map": {
            f: {"image": fi.image, "rot": fi.rot, "flip": fi.flip} for f, fi in sorted(m.fmap.items())
        },
    }


# ---- actions ----


def action_from_doc(doc: Document, space: Optional[Complex2] = None) -> FinAction:
    named = _fixture(doc)
    if named is not None:
        if not isinstance(named, FinAction):
            raise InputError(f"fixture {doc} is not an action")
        return named
    doc = _checked(doc, "action")
    if space is None:
        if "space" not in doc:
            raise InputError("action document needs a space")
        space = complex_from_doc(doc["space"])
    if "permgens" in doc:
        gens = {name: map_from_doc(m, space, space) for name, m in doc["permgens"].items()}
        action = FinAction.from_generators(space, gens)
    else:
        missing = [key for key in ("elements", "identity", "mul", "automorphisms") if key not in doc]
        if missing:
            raise InputError(f"action document is missing {missing}")
        table = {}
        for key, value in doc["mul"].items():
            g, _, h = key.partition(",")
            table[(g.strip(), h.strip())] = value
        group = FinGroup(tuple(doc["elements"]), doc["identity"], table)
        maps = {g: map_from_doc(m, space, space) for g, m in doc["automorphisms"].items()}
        action = FinAction(group, space, maps)
    checked = validate_action(action)
    if not checked.ok:
        raise InputError("invalid action: " + "; ".join(checked.errors))
    return action


def action_to_doc(a: FinAction) -> Dict[str, Any]:
    return {
        "space": complex_to_doc(a.space),
        "elements": list(a.group.elements),
        "identity": a.group.identity,
        "mul": {f"{g},{h}": a.group.mul(g, h) for g in a.group.elements for h in a.group.elements},
        "automorphisms": {g: map_to_doc(a.maps[g]) for g in a.group.elements},
    }


# ---- angles ----


def angles_from_doc(doc: Mapping[str, Any]) -> AngleAssignment:
    doc = _checked(doc, "angles")
    angles: Dict[str, List[Fraction]] = {}
    for entry in doc["angles"]:
        try:
            angles[entry["face"]] = [Fraction(int(c["num"]), int(c["den"])) for c in entry["corners"]]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad corner entry for face {entry.get('face')}: {exc}") from exc
    return angles


def angles_to_doc(angles: AngleAssignment) -> Dict[str, Any]:
    return {
        "angles": [
            {"face": f, "corners": [{"num": Fraction(a).numerator, "den": Fraction(a).denominator} for a in corners]}
            for f, corners in sorted(angles.items())
        ]
    }


# ---- equivariant maps ----


def eqmap_from_doc(doc: Document) -> EqMap:
    """Missing actions mean trivial groups; missing fsharp sends everything to the identity."""
    if isinstance(doc, str):
        if not doc.startswith(FIXTURE_PREFIX):
            raise InputError(f"expected an eqmap document or '{FIXTURE_PREFIX}<name>', got {doc!r}")
        return eqmap_fixture(doc[len(FIXTURE_PREFIX):])
    doc = _checked(doc, "eqmap")
    source_action = _side_action(doc, "source")
    target_action = _side_action(doc, "target")
    f = map_from_doc(doc["map"], source_action.space, target_action.space)
    identity = target_action.group.identity
    fsharp = dict(doc.get("fsharp", {g: identity for g in source_action.group.elements}))
    return EqMap(source_action, target_action, f, fsharp)


def _side_action(doc: Mapping[str, Any], side: str) -> FinAction:
    key = f"{side}_action"
    if key not in doc:
        return trivial_action(complex_from_doc(doc[side]))
    if isinstance(doc[key], str):
        return action_from_doc(doc[key])
    return action_from_doc(doc[key], complex_from_doc(doc[side]))


def eqmap_to_doc(m: EqMap) -> Dict[str, Any]:
    return {
        "source": complex_to_doc(m.source.space),
        "target": complex_to_doc(m.target.space),
        "source_action": action_to_doc(m.source),
        "target_action": action_to_doc(m.target),
        "map": map_to_doc(m.f),
        "fsharp": dict(sorted(m.fsharp.items())),
    }
