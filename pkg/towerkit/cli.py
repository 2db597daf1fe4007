from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from .formats import dump_json
from .models import Budgets, RunConfig, TowerInvariantError, TowerkitError
from .runner import EXIT_INPUT, EXIT_INTERNAL, run

logger = logging.getLogger(__name__)

_GLOBAL_KEYS = (
    "command",
    "subcommand",
    "coset_limit",
    "area_limit",
    "sphere_limit",
    "max_rounds",
    "seed",
    "out",
    "verbose",
)

_CHECKS = ("flag", "k-large", "locally-k-large", "curvature", "dr", "fine", "fine-inequality")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code instead of argparse's 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"error: {message}\n")


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    defaults = Budgets()
    common.add_argument("--coset-limit", type=int, default=defaults.coset_limit, help="Todd-Coxeter coset budget")
    common.add_argument("--area-limit", type=int, default=defaults.area_limit, help="Disk diagram area budget")
    common.add_argument("--sphere-limit", type=int, default=defaults.sphere_limit, help="Sphere search face budget")
    common.add_argument("--max-rounds", type=int, default=defaults.max_rounds, help="Tower lifting round budget")
    common.add_argument("--seed", type=int, default=None, help="Seed recorded in the certificate")
    common.add_argument("--out", default=None, help="Write the certificate here instead of stdout")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="towerkit", description="Equivariant towers over finite 2-complexes")
    subparsers = parser.add_subparsers(dest="command", required=True)
    space_help = "Complex JSON file or fixture:<name>"

    validate = subparsers.add_parser("validate", parents=[common], help="Validate a document")
    validate.add_argument("kind", choices=["complex", "simplicial", "action", "eqmap", "angles"])
    validate.add_argument("input", help="Document file or fixture:<name>")
    validate.add_argument("--space", help="Complex the angle assignment refers to")

    span = subparsers.add_parser("span", parents=[common], help="Smallest full subcomplex containing given cells")
    span.add_argument("--space", required=True, help=space_help)
    span.add_argument("--vertices", default="", help="Comma-separated vertex ids")
    span.add_argument("--darts", default="", help="Comma-separated dart ids")
    span.add_argument("--faces", default="", help="Comma-separated face ids")

    link = subparsers.add_parser("link", parents=[common], help="Link graph of a vertex")
    link.add_argument("--space", required=True, help=space_help)
    link.add_argument("--vertex", default=None)

    subdivide = subparsers.add_parser("subdivide", parents=[common], help="Barycentric subdivision")
    subdivide.add_argument("--space", required=True, help=space_help)

    check = subparsers.add_parser("check", parents=[common], help="Curvature, largeness, DR and fineness checks")
    check.add_argument("subcommand", choices=_CHECKS)
    check.add_argument("--space", help=space_help)
    check.add_argument("--k", type=int, default=6)
    check.add_argument("--angles", help="Angle assignment JSON file")
    check.add_argument("--max-length", type=int, default=6)
    check.add_argument("--map", help="Eq-map JSON file or fixture:<name> (fine-inequality)")
    check.add_argument("--x0", default=None)
    check.add_argument("--neighbors", default="", help="Comma-separated neighbors of x0")

    cover = subparsers.add_parser("cover", parents=[common], help="Finite covers of a complex")
    cover.add_argument("--space", required=True, help=space_help)
    cover.add_argument("--universal", action="store_true", help="Universal cover (default without --subgroup)")
    cover.add_argument("--subgroup", action="append", default=[], help="Subgroup generator word, e.g. 'a b^-1'")

    lift_action = subparsers.add_parser("lift-action", parents=[common], help="Lift an action to the universal cover")
    lift_action.add_argument("--action", required=True, help="Action JSON file or fixture:<name>")
    lift_action.add_argument("--subgroup", action="append", default=[], help="Words to test for H-regularity")

    tower = subparsers.add_parser("tower-lift", parents=[common], help="Maximal tower lifting of an eq-map")
    tower.add_argument("--map", required=True, help="Eq-map JSON file or fixture:<name>")
    tower.add_argument("--mode", choices=["tower", "f-tower"], default="f-tower")

    core = subparsers.add_parser("subgroup-core", parents=[common], help="One-connected G-complex over Y")
    core.add_argument("--action", required=True, help="Action JSON file or fixture:<name>")
    core.add_argument("--gens", default="", help="Comma-separated generators of G")
    core.add_argument("--basepoint", default=None)

    dehn = subparsers.add_parser("dehn", parents=[common], help="Dehn function estimate")
    dehn.add_argument("--space", required=True, help=space_help)
    dehn.add_argument("--n", type=int, default=4)
    dehn.add_argument("--max-area", type=int, default=None)

    sphere = subparsers.add_parser("sphere-search", parents=[common], help="Near-immersed sphere search")
    sphere.add_argument("--space", required=True, help=space_help)
    sphere.add_argument("--max-faces", type=int, default=None)

    fixed = subparsers.add_parser("fixed-points", parents=[common], help="Fixed subcomplex of a subgroup")
    fixed.add_argument("--action", required=True, help="Action JSON file or fixture:<name>")
    fixed.add_argument("--subgroup", default="", help="Comma-separated subgroup elements (default: all)")

    collapse = subparsers.add_parser("collapse", parents=[common], help="Free-edge collapse")
    collapse.add_argument("--space", help=space_help)
    collapse.add_argument("--action", help="Collapse equivariantly under this action")

    fixture = subparsers.add_parser("fixture", parents=[common], help="Export a catalog entry as JSON")
    fixture.add_argument("name")

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _options(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: value for key, value in vars(args).items() if key not in _GLOBAL_KEYS}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = RunConfig(
            command=args.command,
            subcommand=getattr(args, "subcommand", None),
            options=_options(args),
            budgets=Budgets(args.coset_limit, args.area_limit, args.sphere_limit, args.max_rounds),
            out=args.out,
            seed=args.seed,
            verbosity=args.verbose,
        )
        outcome = run(config)
        text = dump_json(outcome.certificate)
        if config.out:
            Path(config.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return outcome.exit_code
    except (TowerkitError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TowerInvariantError as exc:
        logger.debug("self-check failed", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
