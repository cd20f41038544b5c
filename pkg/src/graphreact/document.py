"""Graph documents: a strict JSON schema for graphs plus injection point.

Schema (unknown keys are rejected everywhere):

    {
      "vertices": [{"id": "v0", "role": "inert"}, ...],
      "edges":    [{"from": "v0", "to": "c", "length": 1.0, "radius": 1.0}, ...],
      "weights":  {"v0": {"0": 1.0}, ...},          # optional explicit p_v(e)
      "dimension": 3,                                # optional, default 3
      "injection": {"vertex": "v0"}                  # optional
                   | {"edge": ["v0", "c"], "offset": 0.25}
    }

Explicit weights are keyed by vertex id and edge index (as a string, a
JSON restriction) and override the radius-derived row for that vertex;
vertices without an explicit row keep the derived weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DocumentError
from .graph import (
    Edge,
    EdgeWeights,
    MetricGraph,
    PointOnGraph,
    Vertex,
    derive_weights,
    split_at,
    weights_violations,
)

_TOP_KEYS = {"vertices", "edges", "weights", "dimension", "injection"}
_VERTEX_KEYS = {"id", "role"}
_EDGE_KEYS = {"from", "to", "length", "radius"}
_INJ_KEYS = {"vertex", "edge", "offset"}


@dataclass(frozen=True)
class ParsedDocument:
    graph: MetricGraph
    explicit_weights: dict[str, dict[int, float]] | None
    injection: PointOnGraph | None


def _reject_unknown(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise DocumentError(f"{where}: unknown keys {unknown}")


def _need(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise DocumentError(f"{where}: missing required key {key!r}")
    return mapping[key]


def load_document(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise DocumentError(f"{path}: document root must be an object")
    return doc


def parse_document(doc: dict) -> ParsedDocument:
    if not isinstance(doc, dict):
        raise DocumentError("document root must be an object")
    _reject_unknown(doc, _TOP_KEYS, "document")

    raw_vertices = _need(doc, "vertices", "document")
    raw_edges = _need(doc, "edges", "document")
    if not isinstance(raw_vertices, list) or not isinstance(raw_edges, list):
        raise DocumentError("vertices and edges must be lists")

    vertices = []
    for i, item in enumerate(raw_vertices):
        where = f"vertices[{i}]"
        if not isinstance(item, dict):
            raise DocumentError(f"{where}: must be an object")
        _reject_unknown(item, _VERTEX_KEYS, where)
        vid = _need(item, "id", where)
        if not isinstance(vid, str):
            raise DocumentError(f"{where}: id must be a string")
        role = item.get("role", "inert")
        vertices.append(Vertex(vid, role))

    edges = []
    for i, item in enumerate(raw_edges):
        where = f"edges[{i}]"
        if not isinstance(item, dict):
            raise DocumentError(f"{where}: must be an object")
        _reject_unknown(item, _EDGE_KEYS, where)
        u = _need(item, "from", where)
        v = _need(item, "to", where)
        length = _need(item, "length", where)
        radius = item.get("radius", 1.0)
        if not isinstance(length, (int, float)) or isinstance(length, bool):
            raise DocumentError(f"{where}: length must be a number")
        if not isinstance(radius, (int, float)) or isinstance(radius, bool):
            raise DocumentError(f"{where}: radius must be a number")
        edges.append(Edge((u, v), float(length), float(radius)))

    dimension = doc.get("dimension", 3)
    if not isinstance(dimension, int) or isinstance(dimension, bool):
        raise DocumentError("dimension must be an integer")

    graph = MetricGraph(tuple(vertices), tuple(edges), dimension)

    explicit = None
    if "weights" in doc:
        raw_w = doc["weights"]
        if not isinstance(raw_w, dict):
            raise DocumentError("weights must be an object keyed by vertex id")
        explicit = {}
        for vid, row in raw_w.items():
            where = f"weights[{vid!r}]"
            if not isinstance(row, dict):
                raise DocumentError(f"{where}: must map edge index to weight")
            parsed_row = {}
            for key, val in row.items():
                try:
                    k = int(key)
                except (TypeError, ValueError):
                    raise DocumentError(
                        f"{where}: edge index {key!r} is not an integer"
                    ) from None
                if not isinstance(val, (int, float)) or isinstance(val, bool):
                    raise DocumentError(f"{where}[{key}]: weight must be a number")
                parsed_row[k] = float(val)
            explicit[vid] = parsed_row

    injection = None
    if "injection" in doc:
        raw_inj = doc["injection"]
        if not isinstance(raw_inj, dict):
            raise DocumentError("injection must be an object")
        _reject_unknown(raw_inj, _INJ_KEYS, "injection")
        if "vertex" in raw_inj:
            if "edge" in raw_inj or "offset" in raw_inj:
                raise DocumentError("injection: give either vertex or edge+offset")
            injection = PointOnGraph.at_vertex(raw_inj["vertex"])
        else:
            pair = _need(raw_inj, "edge", "injection")
            offset = _need(raw_inj, "offset", "injection")
            if not (isinstance(pair, list) and len(pair) == 2):
                raise DocumentError("injection: edge must be a [from, to] pair")
            index = _find_edge(graph, pair[0], pair[1])
            injection = PointOnGraph.on_edge(index, float(offset))

    return ParsedDocument(graph, explicit, injection)


def _find_edge(g: MetricGraph, u: str, v: str) -> int:
    # first match in document order; parallel edges need reordering to
    # address the later ones
    for k, e in enumerate(g.edges):
        if set(e.endpoints) == {u, v}:
            return k
    raise DocumentError(f"injection: no edge between {u!r} and {v!r}")


def _resolve_weights(
    g: MetricGraph, explicit: dict[str, dict[int, float]] | None
) -> EdgeWeights:
    w = derive_weights(g)
    if not explicit:
        return w
    table = dict(w.p)
    known = set(g.vertex_ids)
    for vid, row in explicit.items():
        if vid not in known:
            raise DocumentError(f"weights: unknown vertex {vid!r}")
        for k in row:
            if not (0 <= k < len(g.edges)):
                raise DocumentError(f"weights[{vid!r}]: edge index {k} out of range")
        for he in g.out_edges[vid]:
            table.pop((vid, he.edge), None)
        for k, val in row.items():
            table[(vid, k)] = val
    resolved = EdgeWeights(table)
    problems = weights_violations(g, resolved)
    if problems:
        raise DocumentError("weights: " + "; ".join(problems))
    return resolved


def prepare(parsed: ParsedDocument) -> tuple[MetricGraph, EdgeWeights, str | None]:
    """Resolve a parsed document into (graph, weights, start vertex).

    An edge-interior injection splits the edge first; an explicit weight
    row on the far endpoint is re-keyed to the appended child edge
    (split_at keeps every other edge index stable).
    """
    g = parsed.graph
    explicit = parsed.explicit_weights
    start = None
    if parsed.injection is not None:
        if parsed.injection.is_vertex:
            start = parsed.injection.vertex
            if start not in set(g.vertex_ids):
                raise DocumentError(f"injection: unknown vertex {start!r}")
        else:
            k = parsed.injection.edge
            far = g.edges[k].endpoints[1]
            g, start = split_at(g, parsed.injection)
            if explicit and far in explicit and k in explicit[far]:
                row = dict(explicit[far])
                row[len(g.edges) - 1] = row.pop(k)
                explicit = {**explicit, far: row}
    return g, _resolve_weights(g, explicit), start


def emit_document(parsed: ParsedDocument) -> dict:
    """Document dict that parses back to an identical graph."""
    g = parsed.graph
    doc: dict = {
        "vertices": [{"id": v.id, "role": v.role} for v in g.vertices],
        "edges": [
            {
                "from": e.endpoints[0],
                "to": e.endpoints[1],
                "length": e.length,
                "radius": e.radius,
            }
            for e in g.edges
        ],
        "dimension": g.dimension,
    }
    if parsed.explicit_weights is not None:
        doc["weights"] = {
            vid: {str(k): val for k, val in row.items()}
            for vid, row in parsed.explicit_weights.items()
        }
    if parsed.injection is not None:
        if parsed.injection.is_vertex:
            doc["injection"] = {"vertex": parsed.injection.vertex}
        else:
            e = g.edges[parsed.injection.edge]
            doc["injection"] = {
                "edge": [e.endpoints[0], e.endpoints[1]],
                "offset": parsed.injection.offset,
            }
    return doc
