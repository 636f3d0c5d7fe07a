"""JSON and DOT formats. Rationals travel as ``"p/q"`` strings."""

from __future__ import annotations

import json
from pathlib import Path

from .endmaps import EndMap
from .errors import InputError
from .modulus import PLMap
from .morphisms import RadialTreeMap
from .rational import depth_of, format_rational, parse_rational
from .rtree import LeafKind, TreeNode, TreePresentation
from .ultrametric import FiniteUltrametricSpace


def _require(obj, key: str, kind: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{kind} JSON needs a {key!r} field")
    return obj[key]


# ultrametric spaces -------------------------------------------------------------


def space_from_json(obj) -> FiniteUltrametricSpace:
    points = _require(obj, "points", "ultrametric")
    pairs = _require(obj, "distances", "ultrametric")
    if not isinstance(points, list) or not isinstance(pairs, list):
        raise InputError("'points' and 'distances' must be lists")
    triples = []
    for entry in pairs:
        if not isinstance(entry, list) or len(entry) != 3:
            raise InputError(f"distance entry must be [x, y, value], got {entry!r}")
        x, y, v = entry
        triples.append((str(x), str(y), parse_rational(v)))
    return FiniteUltrametricSpace.from_pairs([str(p) for p in points], triples)


def space_to_json(space: FiniteUltrametricSpace) -> dict:
    return {
        "points": list(space.labels),
        "distances": [[x, y, format_rational(d)] for x, y, d in space.pairs()],
    }


# trees ------------------------------------------------------------------------------


def tree_from_json(obj) -> TreePresentation:
    raw_nodes = _require(obj, "nodes", "tree")
    raw_leaves = obj.get("leaves", {})
    if not isinstance(raw_nodes, list) or not isinstance(raw_leaves, dict):
        raise InputError("'nodes' must be a list and 'leaves' an object")
    nodes = []
    for raw in raw_nodes:
        nid = _require(raw, "id", "tree node")
        level = parse_rational(_require(raw, "level", "tree node"))
        kids = raw.get("children", [])
        if not isinstance(kids, list):
            raise InputError(f"children of node {nid!r} must be a list")
        nodes.append(TreeNode(str(nid), level, tuple(str(k) for k in kids)))
    return TreePresentation(nodes, {str(k): v for k, v in raw_leaves.items()})


def tree_to_json(tree: TreePresentation) -> dict:
    nodes = []
    for nid in tree.node_ids():
        entry = {"id": nid, "level": format_rational(tree.level(nid))}
        if tree.children(nid):
            entry["children"] = list(tree.children(nid))
        nodes.append(entry)
    return {"nodes": nodes, "leaves": {lid: tree.kind(lid).value for lid in tree.leaves}}


# maps ---------------------------------------------------------------------------------


def endmap_from_json(obj) -> EndMap:
    source = space_from_json(_require(obj, "source", "end map"))
    target = space_from_json(_require(obj, "target", "end map"))
    assignment = _require(obj, "map", "end map")
    if not isinstance(assignment, dict):
        raise InputError("'map' must be an object")
    return EndMap(source, target, {str(k): str(v) for k, v in assignment.items()})


def endmap_to_json(f: EndMap) -> dict:
    return {
        "source": space_to_json(f.source),
        "target": space_to_json(f.target),
        "map": dict(f.assignment),
    }


def plmap_from_json(points) -> PLMap:
    if not isinstance(points, list) or not all(isinstance(p, list) and len(p) == 2 for p in points):
        raise InputError("a PL map is a list of [x, y] pairs")
    return PLMap.from_points(points)


def radial_from_json(obj) -> RadialTreeMap:
    source = tree_from_json(_require(obj, "source", "radial map"))
    target = tree_from_json(_require(obj, "target", "radial map"))
    sigma = _require(obj, "sigma", "radial map")
    if "reparam" in obj:
        reparam = {str(k): plmap_from_json(v) for k, v in obj["reparam"].items()}
    else:
        shared = plmap_from_json(_require(obj, "lambda", "radial map"))
        reparam = {r: shared for r in source.rays}
    return RadialTreeMap(source, target, {str(k): str(v) for k, v in sigma.items()}, reparam)


def radial_to_json(m: RadialTreeMap) -> dict:
    out = {"source": tree_to_json(m.source), "target": tree_to_json(m.target), "sigma": dict(m.sigma)}
    shared = m.distinct_reparams()
    if len(shared) == 1:
        out["lambda"] = shared[0].to_json()
    else:
        out["reparam"] = {f: m.reparam[f].to_json() for f in m.source.rays}
    return out


# files --------------------------------------------------------------------------------


def read_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def detect_kind(obj) -> str:
    if isinstance(obj, dict):
        if "points" in obj:
            return "ultrametric"
        if "nodes" in obj:
            return "tree"
        if "sigma" in obj:
            return "radial"
        if "map" in obj:
            return "endmap"
        if "vertices" in obj:
            return "simplicial"
    raise InputError("unrecognised JSON document")


# DOT -------------------------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tree_to_dot(tree: TreePresentation, name: str = "tree") -> str:
    lines = [f"digraph {_quote(name)} {{", "  node [shape=circle];"]
    for nid in tree.node_ids():
        level = tree.level(nid)
        label = f"{nid}\\nlevel {format_rational(level)}\\ndepth {depth_of(level):.4g}"
        attrs = [f"label={_quote(label)}"]
        if nid in tree.leaves:
            attrs.append("shape=box" if tree.kind(nid) is LeafKind.TIP else "shape=doublecircle")
        lines.append(f"  {_quote(nid)} [{', '.join(attrs)}];")
    for nid in tree.node_ids():
        for child in tree.children(nid):
            lines.append(f"  {_quote(nid)} -> {_quote(child)} [arrowhead=none];")
    for ray in tree.rays:
        lines.append(f"  {_quote(ray + '~inf')} [shape=point, label=\"\"];")
        lines.append(f"  {_quote(ray)} -> {_quote(ray + '~inf')} [arrowhead=normal, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
