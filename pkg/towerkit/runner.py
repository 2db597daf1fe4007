"""Dispatch of a RunConfig to the library operations, producing certificates.

Every handler returns ``(exit_code, result)``; the runner wraps the result in
a certificate carrying the tool version, the budgets and the seed, so that an
Undecided answer is a reproducible claim about a specific budget.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from . import __version__
from .actions import (
    FinAction,
    equivariant_collapse,
    fixed_subcomplex,
    is_without_inversions,
    trivial_action,
    validate_eq_map,
)
from .checkers import (
    DROutcome,
    check_fixed_point_property,
    check_negative_curvature,
    dr_certify,
    dr_core,
    fineness_profile,
    is_flag,
    is_k_large,
    is_locally_k_large,
    validate_angles,
)
from .complexes import SimpComplex, Subcomplex, barycentric_subdivision, is_full, link, span
from .covers import intermediate_lift, is_h_regular, lifted_group, universal_cover_finite, verify_lifted_group
from .diagrams import FineOutcome, SphereDiagram, dehn_estimate, fine_inequality_check, sphere_search
from .fixtures import eqmap_fixture, fixtures, map_fixture_names
from .formats import (
    FIXTURE_PREFIX,
    action_from_doc,
    action_to_doc,
    angles_from_doc,
    complex_from_doc,
    complex_to_doc,
    eqmap_from_doc,
    eqmap_to_doc,
    map_to_doc,
    read_json,
    simplicial_from_doc,
    simplicial_to_doc,
)
from .ledger import InMemoryRunLedger, RunLedger
from .models import InputError, RunConfig, UndecidedError
from .presentations import parse_word
from .towers import LiftMode, max_f_tower_lift, max_tower_lift, subgroup_core, validate_tower

logger = logging.getLogger(__name__)

Handler = Callable[[RunConfig], Tuple[int, Dict[str, Any]]]

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_UNDECIDED = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4


@dataclass(frozen=True)
class RunOutcome:
    exit_code: int
    certificate: Dict[str, Any]


def _load(value: Optional[str], what: str) -> Any:
    """A ``fixture:<name>`` reference passes through; anything else is a JSON file path."""
    if not value:
        raise InputError(f"missing --{what}")
    if value.startswith(FIXTURE_PREFIX):
        return value
    return read_json(value)


def _names(value: Optional[str]) -> List[str]:
    if not value:
        return []
    return [item.strip() for item in value.split(",") if item.strip()]


def _sphere_doc(sphere: Optional[SphereDiagram]) -> Optional[Dict[str, Any]]:
    if sphere is None:
        return None
    return {"faces": sphere.faces, "complex": complex_to_doc(sphere.complex), "map": map_to_doc(sphere.map)}


class Runner:
    def run(self, config: RunConfig) -> RunOutcome:
        raise NotImplementedError


class DefaultRunner(Runner):
    def __init__(self, ledger: Optional[RunLedger] = None) -> None:
        self._ledger = ledger or InMemoryRunLedger()
        self._handlers: Mapping[str, Handler] = {
            "validate": self._validate,
            "span": self._span,
            "link": self._link,
            "subdivide": self._subdivide,
            "check": self._check,
            "cover": self._cover,
            "lift-action": self._lift_action,
            "tower-lift": self._tower_lift,
            "subgroup-core": self._subgroup_core,
            "dehn": self._dehn,
            "sphere-search": self._sphere_search,
            "fixed-points": self._fixed_points,
            "collapse": self._collapse,
            "fixture": self._fixture,
        }

    def run(self, config: RunConfig) -> RunOutcome:
        handler = self._handlers.get(config.command)
        if handler is None:
            raise InputError(f"unknown command: {config.command}")
        label = " ".join(part for part in (config.command, config.subcommand) if part)
        self._ledger.record("runner", "start", label)
        try:
            exit_code, result = handler(config)
        except UndecidedError as exc:
            logger.info("%s undecided: %s", label, exc)
            exit_code = EXIT_UNDECIDED
            result = {"outcome": "Undecided", "reason": str(exc), "budget": exc.budget, "limit": exc.limit}
        self._ledger.record("runner", "done", label, exit_code=exit_code)
        certificate = {
            "tool": "towerkit",
            "version": __version__,
            "command": label,
            "budgets": config.budgets.to_dict(),
            "seed": config.seed,
            "result": result,
            "ledger": [event.to_dict() for event in self._ledger.list_events()],
        }
        return RunOutcome(exit_code, certificate)

    # ---- complexes ----

    def _validate(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        kind = opts.get("kind", "complex")
        doc = _load(opts.get("input"), "input")
        try:
            if kind == "complex":
                c = complex_from_doc(doc)
                return EXIT_OK, {"valid": True, "summary": c.summary(), "connected": c.is_connected()}
            if kind == "simplicial":
                s = simplicial_from_doc(doc)
                return EXIT_OK, {"valid": True, "vertices": len(s.vertices), "simplices": len(s.simplices)}
            if kind == "action":
                a = action_from_doc(doc)
                return EXIT_OK, {
                    "valid": True,
                    "order": a.group.order,
                    "without_inversions": is_without_inversions(a),
                }
            if kind == "eqmap":
                checked = validate_eq_map(eqmap_from_doc(doc))
                return (EXIT_OK if checked.ok else EXIT_FALSE), checked.to_dict()
            if kind == "angles":
                c = complex_from_doc(_load(opts.get("space"), "space"))
                checked = validate_angles(c, angles_from_doc(doc))
                return (EXIT_OK if checked.ok else EXIT_FALSE), checked.to_dict()
        except InputError as exc:
            return EXIT_FALSE, {"valid": False, "errors": [str(exc)]}
        raise InputError(f"unknown document kind: {kind}")

    def _span(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        c = complex_from_doc(_load(opts.get("space"), "space"))
        sub = Subcomplex.closure(c, _names(opts.get("vertices")), _names(opts.get("darts")), _names(opts.get("faces")))
        spanned = span(c, sub)
        return EXIT_OK, {
            "input_full": is_full(c, sub),
            "span": {
                "vertices": sorted(spanned.vertices),
                "darts": sorted(spanned.darts),
                "faces": sorted(spanned.faces),
            },
            "summary": spanned.summary(),
        }

    def _link(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        c = complex_from_doc(_load(config.options.get("space"), "space"))
        vertex = config.options.get("vertex") or c.vertices[0]
        graph = link(c, vertex)
        return EXIT_OK, {
            "vertex": vertex,
            "nodes": list(graph.nodes),
            "arcs": [{"face": arc.face, "position": arc.position, "ends": list(arc.ends)} for arc in graph.arcs],
        }

    def _subdivide(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        c = complex_from_doc(_load(config.options.get("space"), "space"))
        sd = barycentric_subdivision(c)
        return EXIT_OK, {"summary": sd.summary(), "complex": complex_to_doc(sd)}

    # ---- checkers ----

    def _check(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        budgets = config.budgets
        which = config.subcommand
        if which in ("flag", "k-large", "locally-k-large"):
            s = simplicial_from_doc(_load(opts.get("space"), "space"))
            k = int(opts.get("k") or 6)
            if which == "flag":
                result = is_flag(s)
            elif which == "k-large":
                result = is_k_large(s, k)
            else:
                result = is_locally_k_large(s, k)
            return (EXIT_OK if result else EXIT_FALSE), result.to_dict()
        if which == "curvature":
            c = complex_from_doc(_load(opts.get("space"), "space"))
            result = check_negative_curvature(c, angles_from_doc(_load(opts.get("angles"), "angles")))
            return (EXIT_OK if result else EXIT_FALSE), result.to_dict()
        if which == "dr":
            c = complex_from_doc(_load(opts.get("space"), "space"))
            certificate = dr_certify(c, budgets.sphere_limit, budgets.coset_limit)
            codes = {DROutcome.CERTIFIED: EXIT_OK, DROutcome.REFUTED: EXIT_FALSE, DROutcome.UNKNOWN: EXIT_UNDECIDED}
            return codes[certificate.outcome], {
                "outcome": certificate.outcome.value,
                "reason": certificate.reason,
                "core": dr_core(c).to_dict(),
                "sphere": _sphere_doc(certificate.sphere),
            }
        if which == "fine":
            c = complex_from_doc(_load(opts.get("space"), "space"))
            length = int(opts.get("max_length") or 6)
            return EXIT_OK, {"max_length": length, "profile": fineness_profile(c, length)}
        if which == "fine-inequality":
            m = eqmap_from_doc(_load(opts.get("map"), "map"))
            x0 = opts.get("x0") or m.source.space.vertices[0]
            outcome = fine_inequality_check(
                m.f, x0, _names(opts.get("neighbors")), budgets.area_limit, budgets.sphere_limit, budgets.coset_limit
            )
            codes = {
                FineOutcome.HOLDS: EXIT_OK,
                FineOutcome.VIOLATED: EXIT_FALSE,
                FineOutcome.UNDECIDED: EXIT_UNDECIDED,
            }
            return codes[outcome.outcome], outcome.to_dict()
        raise InputError(f"unknown check: {which}")

    # ---- covers and towers ----

    def _cover(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        c = complex_from_doc(_load(opts.get("space"), "space"))
        limit = config.budgets.coset_limit
        words = [parse_word(w) for w in opts.get("subgroup") or []]
        if words and not opts.get("universal"):
            lift = intermediate_lift(words, trivial_action(c), limit)
            return EXIT_OK, {
                "sheets": lift.sheets,
                "summary": lift.complex.summary(),
                "complex": complex_to_doc(lift.complex),
            }
        cover = universal_cover_finite(c, limit)
        return EXIT_OK, {
            "sheets": cover.sheets,
            "summary": cover.complex.summary(),
            "deck_order": cover.deck.group.order,
            "complex": complex_to_doc(cover.complex),
            "projection": map_to_doc(cover.projection),
        }

    def _lift_action(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        a = action_from_doc(_load(opts.get("action"), "action"))
        limit = config.budgets.coset_limit
        lg = lifted_group(a, limit)
        checked = verify_lifted_group(lg)
        result: Dict[str, Any] = {
            "order": lg.group.order,
            "kernel": sorted(lg.kernel),
            "projection": dict(sorted(lg.projection.items())),
            "verification": checked.to_dict(),
        }
        words = [parse_word(w) for w in opts.get("subgroup") or []]
        if words:
            result["h_regular"] = is_h_regular(words, a, limit)
        return (EXIT_OK if checked.ok else EXIT_FALSE), result

    def _tower_lift(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        m = eqmap_from_doc(_load(opts.get("map"), "map"))
        mode = LiftMode(opts.get("mode") or LiftMode.F_TOWER.value)
        engine = max_f_tower_lift if mode is LiftMode.F_TOWER else max_tower_lift
        lifted = engine(m, config.budgets, self._ledger)
        checked = validate_tower(lifted.tower)
        return (EXIT_OK if checked.ok else EXIT_FALSE), {
            "mode": mode.value,
            **lifted.to_dict(),
            "tower_check": checked.to_dict(),
            "lift": eqmap_to_doc(lifted.lift),
        }

    def _subgroup_core(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        a = action_from_doc(_load(opts.get("action"), "action"))
        core = subgroup_core(a, _names(opts.get("gens")), config.budgets, opts.get("basepoint"), self._ledger)
        return EXIT_OK, {**core.to_dict(), "x": complex_to_doc(core.action.space)}

    # ---- diagrams ----

    def _dehn(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        c = complex_from_doc(_load(opts.get("space"), "space"))
        n = int(opts.get("n") or 4)
        max_area = int(opts.get("max_area") or config.budgets.area_limit)
        table = dehn_estimate(c, n, max_area, config.budgets.coset_limit)
        return EXIT_OK, {"n": n, "max_area": max_area, "table": {str(k): v for k, v in sorted(table.items())}}

    def _sphere_search(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        c = complex_from_doc(_load(opts.get("space"), "space"))
        max_faces = int(opts.get("max_faces") or config.budgets.sphere_limit)
        sphere = sphere_search(c, max_faces)
        return (EXIT_OK if sphere else EXIT_FALSE), {"max_faces": max_faces, "sphere": _sphere_doc(sphere)}

    # ---- actions ----

    def _fixed_points(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        a = action_from_doc(_load(opts.get("action"), "action"))
        subgroup = _names(opts.get("subgroup")) or list(a.group.elements)
        fixed = fixed_subcomplex(a, subgroup)
        checked = check_fixed_point_property(a, subgroup)
        return (EXIT_OK if checked else EXIT_FALSE), {
            "fixed": {"vertices": sorted(fixed.vertices), "darts": sorted(fixed.darts), "faces": sorted(fixed.faces)},
            "check": checked.to_dict(),
        }

    def _collapse(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        opts = config.options
        if opts.get("action"):
            a = action_from_doc(_load(opts.get("action"), "action"))
        else:
            a = trivial_action(complex_from_doc(_load(opts.get("space"), "space")))
        left = equivariant_collapse(a, Subcomplex.whole(a.space))
        return EXIT_OK, {
            "remaining": {"vertices": sorted(left.vertices), "darts": sorted(left.darts), "faces": sorted(left.faces)},
            "summary": left.summary(),
        }

    def _fixture(self, config: RunConfig) -> Tuple[int, Dict[str, Any]]:
        name = config.options.get("name") or ""
        if name in map_fixture_names():
            return EXIT_OK, {"kind": "eqmap", "document": eqmap_to_doc(eqmap_fixture(name))}
        item = fixtures(name)
        if isinstance(item, FinAction):
            return EXIT_OK, {"kind": "action", "document": action_to_doc(item)}
        if isinstance(item, SimpComplex):
            return EXIT_OK, {"kind": "simplicial", "document": simplicial_to_doc(item)}
        return EXIT_OK, {"kind": "complex", "document": complex_to_doc(item)}


def run(config: RunConfig, ledger: Optional[RunLedger] = None) -> RunOutcome:
    return DefaultRunner(ledger).run(config)
