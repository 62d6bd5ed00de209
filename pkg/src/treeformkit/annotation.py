"""FUNSD-type annotations: data model, parser, serializer and validator.

Two input shapes are accepted::

    [{"id": 0, "text": "...", "label": "header", "linking": []}, ...]
    {"form": [{"id": 0, "text": "...", "label": "header", "linking": [], "box": [...]}]}

FUNSD lists every link on both of its endpoint entities.  After parsing each
logical link is stored exactly once, on its source entity (falling back to the
target, then to the first entity that listed it, when ids dangle).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Optional

from .errors import ParseError, SchemaError

Link = tuple[int, int]


class EntityLabel(str, Enum):
    HEADER = "header"
    QUESTION = "question"
    ANSWER = "answer"
    OTHER = "other"

    @classmethod
    def parse(cls, value: Any, path: str = "label") -> "EntityLabel":
        if isinstance(value, EntityLabel):
            return value
        if not isinstance(value, str):
            raise SchemaError(f"label must be a string, got {type(value).__name__}", path)
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise SchemaError(f"unknown label {value!r}", path) from None


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in page pixels; origin at the top-left corner."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if min(self.x0, self.y0, self.x1, self.y1) < 0:
            raise ValueError(f"negative coordinate in box {self.as_list()}")
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise ValueError(f"inverted box {self.as_list()}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def as_list(self) -> list:
        return [self.x0, self.y0, self.x1, self.y1]


@dataclass(frozen=True)
class Entity:
    id: int
    text: str
    label: EntityLabel
    links: tuple[Link, ...] = ()
    box: Optional[BoundingBox] = None
    words: Optional[tuple[tuple[str, Optional[BoundingBox]], ...]] = None


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" or "warning"
    entity_id: Optional[int]
    message: str

    def __post_init__(self):
        if self.severity not in ("error", "warning"):
            raise ValueError(f"bad severity {self.severity!r}")
        if not self.message:
            raise ValueError("issue message must be non-empty")

    def sort_key(self):
        return (self.entity_id is not None, self.entity_id or 0, self.message)

    def __str__(self) -> str:
        where = "document" if self.entity_id is None else f"entity {self.entity_id}"
        return f"{self.severity}: {where}: {self.message}"


@dataclass(frozen=True)
class FunsdDocument:
    entities: tuple[Entity, ...] = ()
    page_width: Optional[float] = None
    page_height: Optional[float] = None
    # Warnings raised while normalizing the raw file; not part of equality.
    parse_issues: tuple[ValidationIssue, ...] = field(default=(), compare=False)

    @property
    def links(self) -> list[Link]:
        return [link for e in self.entities for link in e.links]

    def by_id(self) -> dict[int, Entity]:
        return {e.id: e for e in self.entities}

    def page_size(self) -> tuple[float, float]:
        """Page (width, height), defaulting to the maximum box extent."""
        boxes = [e.box for e in self.entities if e.box is not None]
        width = self.page_width
        height = self.page_height
        if width is None:
            width = max((b.x1 for b in boxes), default=0.0)
        if height is None:
            height = max((b.y1 for b in boxes), default=0.0)
        return float(width), float(height)

    def without_other(self) -> list[Entity]:
        return [e for e in self.entities if e.label is not EntityLabel.OTHER]


def make_document(
    entities: Iterable[Entity],
    links: Iterable[Link] = (),
    page_width: Optional[float] = None,
    page_height: Optional[float] = None,
) -> FunsdDocument:
    """Build a normalized document from entities plus a flat link list.

    Links already attached to ``entities`` are kept; ``links`` are added.
    Duplicates and self-links are removed.
    """
    entities = list(entities)
    listed: list[tuple[int, Link]] = []
    for pos, e in enumerate(entities):
        listed.extend((pos, link) for link in e.links)
    listed.extend((-1, tuple(link)) for link in links)
    placed, issues = _place_links(entities, listed)
    return FunsdDocument(
        tuple(_with_links(e, placed.get(i, [])) for i, e in enumerate(entities)),
        page_width,
        page_height,
        tuple(issues),
    )


def _with_links(e: Entity, links: list[Link]) -> Entity:
    return Entity(e.id, e.text, e.label, tuple(sorted(links)), e.box, e.words)


def _place_links(entities: list[Entity], listed: list[tuple[int, Link]]):
    """Assign every distinct link to one entity position."""
    pos_of = {e.id: i for i, e in enumerate(entities)}
    seen: set[Link] = set()
    placed: dict[int, list[Link]] = {}
    issues: list[ValidationIssue] = []
    for lister, (src, dst) in listed:
        link = (int(src), int(dst))
        if link in seen:
            continue
        seen.add(link)
        if src == dst:
            owner = entities[lister].id if lister >= 0 else src
            issues.append(ValidationIssue("warning", owner, f"self-link ({src}, {dst}) dropped"))
            continue
        if src in pos_of:
            pos = pos_of[src]
        elif dst in pos_of:
            pos = pos_of[dst]
        elif lister >= 0:
            pos = lister
        elif entities:
            pos = 0
        else:
            continue
        placed.setdefault(pos, []).append(link)
    return placed, issues


# ---------------------------------------------------------------------------
# parsing


def load_json(raw: bytes | str) -> Any:
    """Decode UTF-8 JSON, reporting failures with a byte offset."""
    if isinstance(raw, (bytes, bytearray)):
        try:
            text = bytes(raw).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8: {exc.reason}", exc.start) from None
    else:
        text = raw
    if text.startswith("﻿"):
        text = text[1:]
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ParseError(exc.msg, offset) from None


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"expected integer, got {value!r}", path)
    return value


def _box(value: Any, path: str) -> BoundingBox:
    if not isinstance(value, list) or len(value) != 4:
        raise SchemaError("box must be [x0, y0, x1, y1]", path)
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"non-numeric box coordinate {v!r}", path)
    try:
        return BoundingBox(*value)
    except ValueError as exc:
        raise SchemaError(str(exc), path) from None


def _entity(obj: Any, path: str) -> tuple[Entity, list[Link]]:
    if not isinstance(obj, dict):
        raise SchemaError("entity must be an object", path)
    for key in ("id", "text", "label", "linking"):
        if key not in obj:
            raise SchemaError(f"missing required field {key!r}", f"{path}.{key}")
    eid = _int(obj["id"], f"{path}.id")
    text = obj["text"]
    if not isinstance(text, str):
        raise SchemaError("text must be a string", f"{path}.text")
    label = EntityLabel.parse(obj["label"], f"{path}.label")
    linking = obj["linking"]
    if not isinstance(linking, list):
        raise SchemaError("linking must be an array", f"{path}.linking")
    links = []
    for k, pair in enumerate(linking):
        lpath = f"{path}.linking[{k}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError("link must be a pair [from, to]", lpath)
        links.append((_int(pair[0], lpath), _int(pair[1], lpath)))
    box = _box(obj["box"], f"{path}.box") if obj.get("box") is not None else None
    words = None
    if obj.get("words") is not None:
        if not isinstance(obj["words"], list):
            raise SchemaError("words must be an array", f"{path}.words")
        parsed = []
        for k, w in enumerate(obj["words"]):
            wpath = f"{path}.words[{k}]"
            if not isinstance(w, dict) or not isinstance(w.get("text"), str):
                raise SchemaError("word must be an object with a text string", wpath)
            wbox = _box(w["box"], f"{wpath}.box") if w.get("box") is not None else None
            parsed.append((w["text"], wbox))
        words = tuple(parsed)
    return Entity(eid, text, label, (), box, words), links


def parse_funsd(raw: bytes | str) -> FunsdDocument:
    """Parse a FUNSD annotation file into a normalized :class:`FunsdDocument`."""
    data = load_json(raw)
    page_width = page_height = None
    if isinstance(data, dict):
        if "form" not in data:
            raise SchemaError("missing required field 'form'", "form")
        items = data["form"]
        page_width = data.get("page_width")
        page_height = data.get("page_height")
        for name, v in (("page_width", page_width), ("page_height", page_height)):
            if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0):
                raise SchemaError("page size must be a positive number", name)
        root = "form"
    else:
        items = data
        root = ""
    if not isinstance(items, list):
        raise SchemaError("expected an array of entities", root or "$")

    entities: list[Entity] = []
    listed: list[tuple[int, Link]] = []
    ids: set[int] = set()
    for i, obj in enumerate(items):
        path = f"{root}[{i}]"
        entity, links = _entity(obj, path)
        if entity.id in ids:
            raise SchemaError(f"duplicate entity id {entity.id}", f"{path}.id")
        ids.add(entity.id)
        entities.append(entity)
        listed.extend((i, link) for link in links)

    placed, issues = _place_links(entities, listed)
    return FunsdDocument(
        tuple(_with_links(e, placed.get(i, [])) for i, e in enumerate(entities)),
        page_width,
        page_height,
        tuple(issues),
    )


def _num(v: float):
    return int(v) if float(v).is_integer() else v


def funsd_to_json(doc: FunsdDocument) -> dict:
    """FUNSD-style JSON value; each link is listed on both endpoints."""
    positions: dict[int, list[Link]] = {i: [] for i in range(len(doc.entities))}
    pos_of = {e.id: i for i, e in enumerate(doc.entities)}
    for i, e in enumerate(doc.entities):
        for link in e.links:
            owners = {pos_of[x] for x in link if x in pos_of} or {i}
            for p in sorted(owners):
                positions[p].append(link)
    form = []
    for i, e in enumerate(doc.entities):
        obj: dict[str, Any] = {
            "id": e.id,
            "text": e.text,
            "label": e.label.value,
            "linking": [list(link) for link in sorted(set(positions[i]))],
        }
        if e.box is not None:
            obj["box"] = [_num(v) for v in e.box.as_list()]
        if e.words is not None:
            obj["words"] = [
                {"text": t, **({"box": [_num(v) for v in b.as_list()]} if b else {})}
                for t, b in e.words
            ]
        form.append(obj)
    out: dict[str, Any] = {"form": form}
    if doc.page_width is not None:
        out["page_width"] = doc.page_width
    if doc.page_height is not None:
        out["page_height"] = doc.page_height
    return out


def serialize_funsd(doc: FunsdDocument) -> bytes:
    return json.dumps(funsd_to_json(doc), ensure_ascii=False, indent=2).encode("utf-8")


# ---------------------------------------------------------------------------
# validation


def validate(doc: FunsdDocument) -> list[ValidationIssue]:
    """Report annotation inconsistencies.  Never raises, never mutates."""
    issues: list[ValidationIssue] = list(doc.parse_issues)
    labels: dict[int, EntityLabel] = {}
    for e in doc.entities:
        if e.id in labels:
            issues.append(ValidationIssue("error", e.id, "duplicate entity id"))
        labels[e.id] = e.label

    seen: set[Link] = set()
    outgoing: dict[int, set[EntityLabel]] = {}
    incoming: dict[int, set[EntityLabel]] = {}
    for e in doc.entities:
        for src, dst in e.links:
            if (src, dst) in seen:
                issues.append(ValidationIssue("warning", e.id, f"duplicate link ({src}, {dst})"))
                continue
            seen.add((src, dst))
            if src == dst:
                issues.append(ValidationIssue("warning", e.id, f"self-link ({src}, {dst})"))
                continue
            if src not in labels:
                issues.append(ValidationIssue("error", e.id, f"dangling link source {src}"))
            if dst not in labels:
                issues.append(ValidationIssue("error", e.id, f"dangling link target {dst}"))
            if src in labels and dst in labels:
                outgoing.setdefault(src, set()).add(labels[dst])
                incoming.setdefault(dst, set()).add(labels[src])

    for e in doc.entities:
        if e.label is EntityLabel.OTHER:
            issues.append(ValidationIssue("warning", e.id, "other entity ignored by metrics"))
        elif e.label is EntityLabel.ANSWER and EntityLabel.QUESTION not in incoming.get(e.id, ()):
            issues.append(ValidationIssue("warning", e.id, "unprompted answer"))
        elif e.label is EntityLabel.QUESTION and not (
            outgoing.get(e.id, set()) & {EntityLabel.ANSWER, EntityLabel.QUESTION}
        ):
            issues.append(ValidationIssue("warning", e.id, "unanswered question"))
    return sorted(issues, key=ValidationIssue.sort_key)


def has_errors(issues: Iterable[ValidationIssue]) -> bool:
    return any(i.severity == "error" for i in issues)
