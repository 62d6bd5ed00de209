"""Aggregated FUNSD trees: entities as nodes, links as child-labeled edges.

Every entity without an incoming link hangs off a dummy root, encoded as
``ROOT = -1`` in JSON::

    {"nodes": ["WINSTON & STRAWN", "FROM", ...],
     "edges": [[-1, 0, "header"], [-1, 1, "question"], [1, 2, "answer"], ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .annotation import EntityLabel, FunsdDocument, load_json
from .errors import SchemaError

ROOT = -1

Edge = tuple[int, int, EntityLabel]


@dataclass(frozen=True)
class AggregatedTree:
    nodes: tuple[str, ...] = ()
    edges: frozenset[Edge] = frozenset()

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: (e[0], e[1], e[2].value))

    def check(self) -> None:
        """Raise ``ValueError`` if an invariant does not hold."""
        n = len(self.nodes)
        has_parent = set()
        child_label: dict[int, EntityLabel] = {}
        for p, c, label in self.edges:
            if not (p == ROOT or 0 <= p < n) or not 0 <= c < n:
                raise ValueError(f"edge ({p}, {c}) out of range")
            if child_label.setdefault(c, label) is not label:
                raise ValueError(f"node {c} has edges with different labels")
            has_parent.add(c)
        missing = set(range(n)) - has_parent
        if missing:
            raise ValueError(f"nodes without incoming edge: {sorted(missing)}")


def build_aggregated_tree(doc: FunsdDocument) -> AggregatedTree:
    """Nodes are the non-``other`` entities in document order."""
    kept = doc.without_other()
    index = {e.id: i for i, e in enumerate(kept)}
    edges: set[Edge] = set()
    has_parent: set[int] = set()
    for src, dst in doc.links:
        if src in index and dst in index and src != dst:
            edges.add((index[src], index[dst], kept[index[dst]].label))
            has_parent.add(index[dst])
    for i, e in enumerate(kept):
        if i not in has_parent:
            edges.add((ROOT, i, e.label))
    return AggregatedTree(tuple(e.text for e in kept), frozenset(edges))


def aggregated_to_json(tree: AggregatedTree) -> dict:
    return {
        "nodes": list(tree.nodes),
        "edges": [[p, c, label.value] for p, c, label in tree.sorted_edges()],
    }


def serialize_aggregated(tree: AggregatedTree) -> bytes:
    return json.dumps(aggregated_to_json(tree), ensure_ascii=False, indent=2).encode("utf-8")


def parse_aggregated(raw: bytes | str) -> AggregatedTree:
    """Parse the aggregated JSON shape.

    Non-root edges may be printed in either orientation.  The child is the
    endpoint whose (inferred) label equals the edge label; when that cannot
    be decided the edge is read as ``[parent, child, label]``.
    """
    data = load_json(raw)
    if not isinstance(data, dict):
        raise SchemaError("expected an object with 'nodes' and 'edges'", "$")
    for key in ("nodes", "edges"):
        if not isinstance(data.get(key), list):
            raise SchemaError(f"missing or non-array field {key!r}", key)
    nodes = data["nodes"]
    for i, text in enumerate(nodes):
        if not isinstance(text, str):
            raise SchemaError("node text must be a string", f"nodes[{i}]")
    n = len(nodes)

    raw_edges: list[tuple[int, int, EntityLabel]] = []
    for i, edge in enumerate(data["edges"]):
        path = f"edges[{i}]"
        if not isinstance(edge, list) or len(edge) != 3:
            raise SchemaError("edge must be [parent, child, label]", path)
        a, b, lab = edge
        for v in (a, b):
            if isinstance(v, bool) or not isinstance(v, int):
                raise SchemaError(f"edge endpoint must be an integer, got {v!r}", path)
            if not (v == ROOT or 0 <= v < n):
                raise SchemaError(f"edge endpoint {v} out of range", path)
        if a == ROOT and b == ROOT:
            raise SchemaError("edge between two roots", path)
        raw_edges.append((a, b, EntityLabel.parse(lab, f"{path}[2]")))

    known: dict[int, EntityLabel] = {}
    for a, b, lab in raw_edges:
        if a == ROOT:
            known[b] = lab
        elif b == ROOT:
            known[a] = lab

    resolved: dict[int, Edge] = {}

    def settle(i: int, edge: Edge) -> None:
        resolved[i] = edge
        known.setdefault(edge[1], edge[2])

    while len(resolved) < len(raw_edges):
        changed = False
        for i, (a, b, lab) in enumerate(raw_edges):
            if i in resolved:
                continue
            if a == ROOT or b == ROOT:
                settle(i, (ROOT, b if a == ROOT else a, lab))
            elif known.get(b) is lab:
                settle(i, (a, b, lab))
            elif b in known and known.get(a, lab) is lab:
                # b cannot be the child, a can
                settle(i, (b, a, lab))
            else:
                continue
            changed = True
        if not changed:
            # undecidable from labels: read the first open edge as printed
            i = min(set(range(len(raw_edges))) - set(resolved))
            settle(i, raw_edges[i])
    edges = set(resolved.values())
    return AggregatedTree(tuple(nodes), frozenset(edges))
