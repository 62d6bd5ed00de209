"""Repairs for raw generative-model output.

``repair_treeform`` keeps only the viable parts of a non-concise TreeForm
JSON value.  The two dedup passes remove repeated text the way generated
sequences tend to repeat it: near-identical sibling subtrees, and long FUNSD
entities that appear more than once.

Similarity between two texts is ``1 - normalized_levenshtein``.  By default
a pair is merged when the similarity exceeds the threshold (0.6).  With
``literal=True`` the threshold is read as a distance gate instead, and pairs
are merged when their distance exceeds it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .align import normalized_levenshtein
from .annotation import Entity, FunsdDocument, make_document
from .treeform import (
    NodeKind,
    TreeFormDoc,
    TreeFormNode,
    canonical,
    entry,
    header,
    question,
)

DEFAULT_SIMILARITY = 0.6
DEFAULT_MIN_ENTITY_LEN = 20


@dataclass
class RepairReport:
    discarded_paths: int = 0
    merged_leaves: int = 0
    removed_entities: int = 0
    notes: list[str] = field(default_factory=list)

    def drop(self, path: str, why: str) -> None:
        self.discarded_paths += 1
        self.notes.append(f"{path}: {why}")

    def merge(self, other: "RepairReport") -> "RepairReport":
        return RepairReport(
            self.discarded_paths + other.discarded_paths,
            self.merged_leaves + other.merged_leaves,
            self.removed_entities + other.removed_entities,
            self.notes + other.notes,
        )


def _text(value: Any) -> bool:
    return isinstance(value, str) and value.strip() != ""


def _items(value: Any) -> list:
    return value if isinstance(value, list) else [value]


class _Repair:
    def __init__(self):
        self.report = RepairReport()

    def section(self, obj: dict, path: str, allowed: tuple[str, ...]) -> list[TreeFormNode]:
        out: list[TreeFormNode] = []
        for key, value in obj.items():
            if key == "value" and "value" not in allowed:
                self.report.drop(f"{path}.value", "misplaced value")
            elif key == "value":
                continue
            elif key not in allowed:
                self.report.drop(f"{path}.{key}", "unknown key")
            else:
                for k, item in enumerate(_items(value)):
                    node = getattr(self, key)(item, f"{path}.{key}[{k}]")
                    if node is not None:
                        out.append(node)
        return out

    def question(self, obj: Any, path: str):
        if not isinstance(obj, dict):
            return self.report.drop(path, "question is not an object")
        if not _text(obj.get("value")):
            return self.report.drop(path, "question without text")
        if not _text(obj.get("answer")):
            return self.report.drop(path, "unanswered question")
        for key in set(obj) - {"value", "answer"}:
            self.report.drop(f"{path}.{key}", "unknown key")
        return question(obj["value"], obj["answer"])

    def header(self, obj: Any, path: str):
        if not isinstance(obj, dict):
            return self.report.drop(path, "header is not an object")
        title = obj.get("value")
        if "value" in obj and not _text(title):
            self.report.drop(f"{path}.value", "non-text header value")
            title = None
        children = self.section(obj, path, ("value", "question", "header", "entry"))
        if title is None and not children:
            return self.report.drop(path, "empty header")
        return header(title, children)

    def entry(self, obj: Any, path: str):
        if not isinstance(obj, dict):
            return self.report.drop(path, "entry is not an object")
        name = obj.get("value")
        if "value" in obj and not _text(name):
            self.report.drop(f"{path}.value", "non-text entry value")
            name = None
        questions = self.section(obj, path, ("value", "question"))
        if not questions:
            return self.report.drop(path, "entry without questions")
        return entry(name, questions)


def repair_treeform(raw: Any) -> tuple[TreeFormDoc, RepairReport]:
    """Turn any JSON value into a valid (possibly empty) TreeForm document."""
    fixer = _Repair()
    sections = raw if isinstance(raw, list) else [raw]
    roots: list[TreeFormNode] = []
    for k, obj in enumerate(sections):
        path = "$" if not isinstance(raw, list) else f"$[{k}]"
        if isinstance(obj, dict):
            roots.extend(fixer.section(obj, path, ("question", "header", "entry")))
        elif obj is not None:
            fixer.report.drop(path, "not a TreeForm object")
    return TreeFormDoc(canonical(roots)), fixer.report


# ---------------------------------------------------------------------------
# dedup


def _merge_wanted(a: str, b: str, threshold: float, literal: bool) -> bool:
    distance = normalized_levenshtein(a, b)
    if literal:
        return distance > threshold
    return 1.0 - distance > threshold


def _signature(node: TreeFormNode) -> str:
    return " ".join(node.leaves())


def _dedup_siblings(children: list[TreeFormNode], threshold, literal, report) -> list[TreeFormNode]:
    kids = list(children)
    while True:
        pair = next(
            (
                (i, j)
                for i in range(len(kids))
                for j in range(i + 1, len(kids))
                if kids[i].kind is kids[j].kind
                and kids[i].kind is not NodeKind.VALUE
                and _merge_wanted(_signature(kids[i]), _signature(kids[j]), threshold, literal)
            ),
            None,
        )
        if pair is None:
            return kids
        i, j = pair
        # keep the longer text; the earlier sibling wins ties
        drop = i if len(_signature(kids[j])) > len(_signature(kids[i])) else j
        report.merged_leaves += len(kids[drop].leaves())
        report.notes.append(f"dropped duplicate {kids[drop].kind.value} {_signature(kids[drop])!r}")
        del kids[drop]


def _dedup_node(node: TreeFormNode, threshold, literal, report) -> TreeFormNode:
    if not node.children:
        return node
    kids = [_dedup_node(c, threshold, literal, report) for c in node.children]
    kids = _dedup_siblings(kids, threshold, literal, report)
    return TreeFormNode(node.kind, node.value, tuple(kids))


def dedup_leaves(
    doc: TreeFormDoc,
    similarity_threshold: float = DEFAULT_SIMILARITY,
    literal: bool = False,
) -> tuple[TreeFormDoc, RepairReport]:
    """Remove near-duplicate sibling subtrees, keeping the one with more text.

    Siblings of the same kind are compared by their leaf text joined with
    spaces.  Children are processed before their parents.
    """
    if not 0 < similarity_threshold < 1:
        raise ValueError("similarity_threshold must be in (0, 1)")
    report = RepairReport()
    roots = [_dedup_node(r, similarity_threshold, literal, report) for r in doc.roots]
    roots = _dedup_siblings(roots, similarity_threshold, literal, report)
    return TreeFormDoc(tuple(roots)), report


def dedup_long_entities(
    doc: FunsdDocument,
    min_len: int = DEFAULT_MIN_ENTITY_LEN,
    similarity_threshold: float = DEFAULT_SIMILARITY,
    literal: bool = False,
) -> tuple[FunsdDocument, RepairReport]:
    """Collapse repeated entities longer than ``min_len`` characters into the longest one.

    Links of removed entities are moved to the survivor.
    """
    if min_len < 1:
        raise ValueError("min_len must be at least 1")
    if not 0 < similarity_threshold < 1:
        raise ValueError("similarity_threshold must be in (0, 1)")
    report = RepairReport()
    long_ones = [e for e in doc.entities if len(e.text) > min_len]
    survivor: dict[int, int] = {}
    while True:
        pair = next(
            (
                (a, b)
                for i, a in enumerate(long_ones)
                for b in long_ones[i + 1 :]
                if _merge_wanted(a.text, b.text, similarity_threshold, literal)
            ),
            None,
        )
        if pair is None:
            break
        a, b = pair
        keep, drop = (b, a) if len(b.text) > len(a.text) else (a, b)
        survivor[drop.id] = keep.id
        long_ones.remove(drop)
        report.removed_entities += 1
        report.notes.append(f"entity {drop.id} merged into {keep.id}")
    if not survivor:
        return doc, report

    def resolve(eid: int) -> int:
        while eid in survivor:
            eid = survivor[eid]
        return eid

    links = [(resolve(s), resolve(d)) for s, d in doc.links]
    entities = [
        Entity(e.id, e.text, e.label, (), e.box, e.words)
        for e in doc.entities
        if e.id not in survivor
    ]
    out = make_document(
        entities, [l for l in links if l[0] != l[1]], doc.page_width, doc.page_height
    )
    return out, report
