"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for bad input.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import serialization as ser
from .duality import ends_of, roundtrip_tree_check, roundtrip_ultrametric_check, tree_of
from .errors import (
    InputError,
    NotGeodesicallyCompleteError,
    PropernessError,
    TrivialTreeError,
    UltratreeError,
    ValidationFailure,
    WellDefinednessError,
)
from .freudenthal import freudenthal_ends, simplicial_from_json
from .homotopy import endpoint_error, homotopy_eval
from .modulus import concave_majorant, modulus_of
from .morphisms import (
    RadialTreeMap,
    check_bornologous,
    check_lipschitz1_sampled,
    check_metrically_proper,
    component_maps_agree,
    induce_tree_map,
    maps_equivalent,
)
from .rational import parse_rational
from .reports import jsonable
from .rtree import (
    TreePoint,
    is_geodesically_complete,
    prune,
    rooted_isometric,
    verify_correspondence,
)
from .ultrametric import validate_ultrametric

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class CheckFailed(Exception):
    """Raised after output is written when the command's check did not pass."""


# loading ------------------------------------------------------------------------


def _load(path: str | None, kinds: tuple[str, ...], flag: str = "--input"):
    if not path:
        raise InputError(f"{flag} is required")
    obj = ser.read_json(path)
    kind = ser.detect_kind(obj)
    if kind not in kinds:
        raise InputError(f"{path}: expected {' or '.join(kinds)} JSON, got {kind}")
    return kind, obj


def _load_space(path, flag="--input"):
    return ser.space_from_json(_load(path, ("ultrametric",), flag)[1])


def _load_tree(path, flag="--input"):
    kind, obj = _load(path, ("tree", "ultrametric"), flag)
    return ser.tree_from_json(obj) if kind == "tree" else tree_of(ser.space_from_json(obj))


def _load_radial(path, flag="--input") -> RadialTreeMap:
    kind, obj = _load(path, ("radial", "endmap"), flag)
    if kind == "endmap":
        return induce_tree_map(ser.endmap_from_json(obj))
    return ser.radial_from_json(obj)


# output ------------------------------------------------------------------------------


def _emit(args, payload) -> None:
    text = ser.dumps(jsonable(payload))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_dot(args, tree, name="tree") -> None:
    if args.dot:
        Path(args.dot).write_text(ser.tree_to_dot(tree, name))


# commands ----------------------------------------------------------------------------


def cmd_validate(args) -> None:
    kind, obj = _load(args.input, ("ultrametric", "tree", "endmap", "radial", "simplicial"))
    if kind == "ultrametric":
        points = obj.get("points")
        try:
            space = ser.space_from_json(obj)
            report = validate_ultrametric(space.labels, space.matrix())
        except ValidationFailure as exc:
            report = exc.report
        _emit(args, {"kind": kind, "points": points, **report.to_json()})
        if not report.ok:
            raise CheckFailed
        return
    if kind == "tree":
        tree = ser.tree_from_json(obj)
        _emit(
            args,
            {
                "kind": kind,
                "ok": True,
                "rays": list(tree.rays),
                "tips": list(tree.tips),
                "geodesically_complete": is_geodesically_complete(tree),
            },
        )
        return
    if kind == "endmap":
        ser.endmap_from_json(obj)
    elif kind == "radial":
        ser.radial_from_json(obj)
    else:
        simplicial_from_json(obj)
    _emit(args, {"kind": kind, "ok": True})


def cmd_to_tree(args) -> None:
    space = _load_space(args.input)
    tree = tree_of(space)
    if args.roundtrip:
        report = roundtrip_ultrametric_check(space)
        _emit(args, {"tree": ser.tree_to_json(tree), "roundtrip": report.to_json()})
        _emit_dot(args, tree)
        if not report.ok:
            raise CheckFailed
        return
    _emit(args, ser.tree_to_json(tree))
    _emit_dot(args, tree)


def cmd_ends(args) -> None:
    tree = _load_tree(args.input)
    space = ends_of(tree).space
    if args.roundtrip:
        report = roundtrip_tree_check(tree)
        _emit(args, {"ends": ser.space_to_json(space), "roundtrip": report.to_json()})
        if not report.ok:
            raise CheckFailed
        return
    _emit(args, ser.space_to_json(space))


def cmd_roundtrip(args) -> None:
    kind, obj = _load(args.input, ("ultrametric", "tree"))
    if kind == "ultrametric":
        report = roundtrip_ultrametric_check(ser.space_from_json(obj))
    else:
        report = roundtrip_tree_check(ser.tree_from_json(obj))
    _emit(args, {"kind": kind, **report.to_json()})
    if not report.ok:
        raise CheckFailed


def _rng(args) -> random.Random:
    return random.Random(args.seed)


def cmd_induce(args) -> None:
    _, obj = _load(args.input, ("endmap",))
    f = ser.endmap_from_json(obj)
    rho = modulus_of(f)
    lam = concave_majorant(rho)
    m = induce_tree_map(f)
    checks = [
        check_lipschitz1_sampled(m, args.samples, _rng(args)),
        check_metrically_proper(m),
        check_bornologous(m),
    ]
    _emit(
        args,
        {
            "modulus": rho.to_json(),
            "lambda": lam.to_json(),
            "map": ser.radial_to_json(m),
            "checks": [c.to_json() for c in checks],
        },
    )
    if not all(c.ok for c in checks):
        raise CheckFailed


def cmd_check(args) -> None:
    m = _load_radial(args.input)
    if args.which == "lipschitz":
        report = check_lipschitz1_sampled(m, args.samples, _rng(args)).to_json()
    elif args.which == "proper":
        report = check_metrically_proper(m).to_json()
    elif args.which == "coarse":
        born = check_bornologous(m)
        report = born.to_json()
        report["ok"] = bool(born.data["coarse"])
    else:
        other = _load_radial(args.other, "--other")
        try:
            same = maps_equivalent(m, other)
        except PropernessError as exc:
            report = {"check": "equiv", "ok": False, "summary": str(exc)}
        else:
            report = {
                "check": "equiv",
                "ok": same,
                "summary": "equivalent" if same else "not equivalent: the end maps differ",
                "data": {"component_maps_agree": component_maps_agree(m, other)},
            }
    _emit(args, report)
    if not report["ok"]:
        raise CheckFailed


def _point(text: str) -> TreePoint:
    carrier, sep, level = text.rpartition(":")
    if not sep or not carrier:
        raise InputError(f"point must look like CARRIER:LEVEL, got {text!r}")
    return TreePoint(carrier, parse_rational(level))


def cmd_homotopy_eval(args) -> None:
    m = _load_radial(args.input)
    other = _load_radial(args.other, "--other")
    x = _point(args.point)
    try:
        t = float(args.t)
    except ValueError:
        raise InputError(f"--t must be a number, got {args.t!r}") from None
    h = homotopy_eval(m, other, x, t)
    err = endpoint_error(m, other, x)
    _emit(
        args,
        {
            "point": x,
            "t": t,
            "carrier": h.carrier,
            "level": h.level,
            "endpoint_error": err,
        },
    )


def cmd_prune(args) -> None:
    _, obj = _load(args.input, ("tree",))
    tree = ser.tree_from_json(obj)
    pruned = prune(tree)
    _emit(args, ser.tree_to_json(pruned))
    _emit_dot(args, pruned, "pruned")


def cmd_isometry(args) -> None:
    a = _load_tree(args.input)
    b = _load_tree(args.other, "--other")
    corr = rooted_isometric(a, b)
    ok = corr is not None and verify_correspondence(a, b, corr)
    _emit(args, {"isometric": ok, "correspondence": corr})
    if not ok:
        raise CheckFailed


def cmd_freudenthal(args) -> None:
    _, obj = _load(args.input, ("simplicial",))
    tree = simplicial_from_json(obj)
    if args.root is not None:
        tree = tree.rerooted(args.root)
    report = freudenthal_ends(tree)
    payload = report.to_json()
    payload["proper_type"] = (
        "compact / trivial proper homotopy type"
        if report.end_count == 0
        else f"{report.end_count} end{'s' if report.end_count != 1 else ''}"
    )
    if args.other:
        _, other_obj = _load(args.other, ("simplicial",), "--other")
        other = freudenthal_ends(simplicial_from_json(other_obj))
        same = other.end_count == report.end_count
        payload["comparison"] = {
            "other_end_count": other.end_count,
            "properly_homotopy_equivalent": same,
            "note": "finite discrete end spaces are homeomorphic exactly when in bijection",
        }
        _emit(args, payload)
        if not same:
            raise CheckFailed
        return
    _emit(args, payload)


def cmd_export_dot(args) -> None:
    tree = _load_tree(args.input)
    text = ser.tree_to_dot(tree)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="input JSON file")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--dot", help="also write a DOT rendering of the resulting tree")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--samples", type=int, default=10_000, help="random pairs for sampled checks")

    parser = argparse.ArgumentParser(
        prog="ultratree",
        description="Exact rooted R-trees, ultrametric end spaces and the maps between them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "validate an ultrametric, tree, map or simplicial tree file")
    add("to-tree", cmd_to_tree, "dendrogram of an ultrametric space").add_argument(
        "--roundtrip", action="store_true", help="also confirm ends(tree) reproduces the input"
    )
    add("ends", cmd_ends, "end space of a geodesically complete tree").add_argument(
        "--roundtrip", action="store_true", help="also confirm tree(ends) is rooted isometric"
    )
    add("roundtrip", cmd_roundtrip, "round-trip check for an ultrametric or a tree")
    add("induce", cmd_induce, "modulus, majorant and induced tree map of an end map")
    check = add("check", cmd_check, "check a radial map (or the map induced by an end map)")
    check.add_argument("which", choices=["lipschitz", "proper", "coarse", "equiv"])
    check.add_argument("--other", help="second map for 'equiv'")
    hom = add("homotopy-eval", cmd_homotopy_eval, "evaluate the shortest-path homotopy")
    hom.add_argument("--other", required=True, help="the second map")
    hom.add_argument("--point", required=True, help="source point as CARRIER:LEVEL, e.g. b:1/4")
    hom.add_argument("--t", default="0.5", help="time in [0, 1]")
    add("prune", cmd_prune, "maximal geodesically complete subtree")
    add("isometry", cmd_isometry, "rooted isometry test between two trees").add_argument(
        "--other", required=True, help="the second tree"
    )
    fr = add("freudenthal", cmd_freudenthal, "ends of a locally finite simplicial tree")
    fr.add_argument("--root", help="root vertex (default: first vertex)")
    fr.add_argument("--other", help="second simplicial tree to compare with")
    add("export-dot", cmd_export_dot, "DOT rendering of a tree or of an ultrametric's dendrogram")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CheckFailed:
        return EXIT_FAIL
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (WellDefinednessError, PropernessError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (InputError, TrivialTreeError, NotGeodesicallyCompleteError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UltratreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
