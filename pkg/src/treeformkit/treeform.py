"""TreeForm documents: data model, FUNSD conversion and JSON formats.

Non-concise JSON groups a node's children by kind and keeps text in leaves::

    {"header": {"value": "WINSTON & STRAWN",
                "question": [{"value": "FROM", "answer": "Kevin Narko"}],
                "header": [{"value": "Please Deliver to:",
                            "entry": [{"question": [{"value": "RECIPIENT",
                                                     "answer": "John Mulderig"}]}]}]}}

Concise JSON pushes text up into map keys; table rows sit under ``"entry"``::

    {"WINSTON & STRAWN": {"FROM": "Kevin Narko",
                          "Please Deliver to:": {"entry": {"RECIPIENT": "John Mulderig"}}}}

Because children are grouped by kind, node children are kept in a canonical
order: value leaf, questions, headers, entries.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Optional, Sequence

from .annotation import (
    Entity,
    EntityLabel,
    FunsdDocument,
    ValidationIssue,
    load_json,
    make_document,
)
from .errors import ConfigError, SchemaError


class NodeKind(str, Enum):
    HEADER = "header"
    QUESTION = "question"
    ANSWER = "answer"
    ENTRY = "entry"
    VALUE = "value"


_ORDER = {NodeKind.VALUE: 0, NodeKind.QUESTION: 1, NodeKind.HEADER: 2, NodeKind.ENTRY: 3}


@dataclass(frozen=True)
class TreeFormNode:
    kind: NodeKind
    value: str = ""
    children: tuple["TreeFormNode", ...] = ()

    @property
    def text(self) -> Optional[str]:
        """Text of the value-leaf child, if any."""
        for c in self.children:
            if c.kind is NodeKind.VALUE:
                return c.value
        return None

    @property
    def answer(self) -> Optional[str]:
        for c in self.children:
            if c.kind is NodeKind.ANSWER:
                return c.text
        return None

    def sub_nodes(self) -> list["TreeFormNode"]:
        return [c for c in self.children if c.kind is not NodeKind.VALUE]

    def leaves(self) -> list[str]:
        if self.kind is NodeKind.VALUE:
            return [self.value]
        return [t for c in self.children for t in c.leaves()]

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def canonical(children: Iterable[TreeFormNode]) -> tuple[TreeFormNode, ...]:
    return tuple(sorted(children, key=lambda c: _ORDER.get(c.kind, 1)))


def leaf(text: str) -> TreeFormNode:
    return TreeFormNode(NodeKind.VALUE, text)


def question(text: Optional[str], answer: Optional[str]) -> TreeFormNode:
    """Question chained to its answer; either side may be ``None`` only in
    the extended (incomplete) scheme."""
    kids = []
    if text is not None:
        kids.append(leaf(text))
    if answer is not None:
        kids.append(TreeFormNode(NodeKind.ANSWER, children=(leaf(answer),)))
    return TreeFormNode(NodeKind.QUESTION, children=tuple(kids))


def header(title: Optional[str], children: Iterable[TreeFormNode] = ()) -> TreeFormNode:
    kids = [leaf(title)] if title else []
    return TreeFormNode(NodeKind.HEADER, children=canonical([*kids, *children]))


def entry(name: Optional[str], questions: Iterable[TreeFormNode]) -> TreeFormNode:
    kids = [leaf(name)] if name else []
    return TreeFormNode(NodeKind.ENTRY, children=tuple([*kids, *questions]))


@dataclass(frozen=True)
class TreeFormDoc:
    roots: tuple[TreeFormNode, ...] = ()

    def leaves(self) -> list[str]:
        return [t for r in self.roots for t in r.leaves()]

    def size(self) -> int:
        return sum(r.size() for r in self.roots)


# ---------------------------------------------------------------------------
# invariants


def node_violations(node: TreeFormNode, allow_incomplete: bool = False, path: str = "$") -> list[str]:
    """Invariant violations in the subtree rooted at ``node``."""
    out: list[str] = []
    kinds = [c.kind for c in node.children]
    values = kinds.count(NodeKind.VALUE)

    def bad(msg):
        out.append(f"{path}: {msg}")

    if node.kind is NodeKind.VALUE:
        if node.children:
            bad("value leaf has children")
        if not isinstance(node.value, str) or not node.value:
            bad("value leaf is empty")
        return out
    if node.kind is NodeKind.HEADER:
        if values > 1:
            bad("header has more than one value leaf")
        if any(k in (NodeKind.ANSWER,) for k in kinds):
            bad("header has an answer child")
    elif node.kind is NodeKind.QUESTION:
        answers = kinds.count(NodeKind.ANSWER)
        other = len(kinds) - values - answers
        if other:
            bad("question has children other than its text and answer")
        if allow_incomplete:
            if values > 1 or answers > 1 or values + answers == 0:
                bad("question needs at most one text and one answer, and at least one of them")
        elif values != 1 or answers != 1:
            bad("question needs exactly one text leaf and one answer")
    elif node.kind is NodeKind.ANSWER:
        if kinds != [NodeKind.VALUE]:
            bad("answer needs exactly one value leaf")
    elif node.kind is NodeKind.ENTRY:
        if values > 1:
            bad("entry has more than one value leaf")
        if any(k not in (NodeKind.VALUE, NodeKind.QUESTION) for k in kinds):
            bad("entry may only hold questions")
        if kinds.count(NodeKind.QUESTION) == 0:
            bad("entry has no questions")
    for i, c in enumerate(node.children):
        out.extend(node_violations(c, allow_incomplete, f"{path}/{node.kind.value}[{i}]"))
    return out


def doc_violations(doc: TreeFormDoc, allow_incomplete: bool = False) -> list[str]:
    out = []
    for i, r in enumerate(doc.roots):
        if r.kind in (NodeKind.VALUE, NodeKind.ANSWER):
            out.append(f"$[{i}]: {r.kind.value} cannot be a root")
        out.extend(node_violations(r, allow_incomplete, f"$[{i}]"))
    return out


# ---------------------------------------------------------------------------
# conversion from FUNSD


@dataclass(frozen=True)
class ConversionConfig:
    column_epsilon_fraction: float = 0.01
    min_table_answers: int = 2
    keep_unanswered: bool = False

    def __post_init__(self):
        if not 0 < self.column_epsilon_fraction <= 0.2:
            raise ConfigError("column_epsilon_fraction must be in (0, 0.2]")
        if self.min_table_answers < 2:
            raise ConfigError("min_table_answers must be at least 2")


class TableKind(str, Enum):
    COLUMN = "column"
    ROW = "row"
    MULTILINE = "multiline"


def discard_incomplete(
    doc: FunsdDocument, keep_unanswered: bool = False
) -> tuple[FunsdDocument, list[ValidationIssue]]:
    """Drop ``other`` entities, empty texts, unanswered questions and unprompted answers.

    A question counts as answered when it links to an answer or to a nested
    question.  Removal repeats until nothing changes.
    """
    issues: list[ValidationIssue] = []
    label = {e.id: e.label for e in doc.entities}
    kept = []
    for e in doc.entities:
        if e.label is EntityLabel.OTHER:
            issues.append(ValidationIssue("warning", e.id, "other entity removed"))
        elif not e.text.strip():
            issues.append(ValidationIssue("warning", e.id, "empty entity removed"))
        else:
            kept.append(e.id)
    alive = set(kept)
    links = [(s, d) for s, d in doc.links if s != d]

    while not keep_unanswered:
        out_labels: dict[int, set] = {}
        in_labels: dict[int, set] = {}
        for s, d in links:
            if s in alive and d in alive:
                out_labels.setdefault(s, set()).add(label[d])
                in_labels.setdefault(d, set()).add(label[s])
        dropped = []
        for eid in kept:
            if eid not in alive:
                continue
            if label[eid] is EntityLabel.QUESTION and not (
                out_labels.get(eid, set()) & {EntityLabel.ANSWER, EntityLabel.QUESTION}
            ):
                dropped.append((eid, "unanswered question removed"))
            elif label[eid] is EntityLabel.ANSWER and EntityLabel.QUESTION not in in_labels.get(eid, ()):
                dropped.append((eid, "unprompted answer removed"))
        if not dropped:
            break
        for eid, msg in dropped:
            alive.discard(eid)
            issues.append(ValidationIssue("warning", eid, msg))

    if len(alive) == len(doc.entities):
        return doc, issues
    removed = {e.id for e in doc.entities} - alive
    entities = [
        Entity(e.id, e.text, e.label, tuple(l for l in e.links if not set(l) & removed), e.box, e.words)
        for e in doc.entities
        if e.id in alive
    ]
    out = make_document(entities, page_width=doc.page_width, page_height=doc.page_height)
    return out, sorted(issues, key=ValidationIssue.sort_key)


def select_form_title(doc: FunsdDocument) -> Optional[int]:
    """Highest non-nested header with a box; ties go left, then to the lower id."""
    headers = {e.id: e for e in doc.entities if e.label is EntityLabel.HEADER}
    nested = {d for s, d in doc.links if s in headers and d in headers and s != d}
    candidates = [e for eid, e in headers.items() if eid not in nested and e.box is not None]
    if not candidates:
        return None
    best = min(candidates, key=lambda e: (e.box.y0, e.box.x0, e.id))
    return best.id


def detect_table(
    question: Entity,
    answers: Sequence[Entity],
    config: ConversionConfig = ConversionConfig(),
    page_size: Optional[tuple[float, float]] = None,
    issues: Optional[list] = None,
) -> TableKind:
    """Classify a multi-answer question as a table column, a table row, or a multi-line answer."""
    if len(answers) < config.min_table_answers:
        return TableKind.MULTILINE
    if any(a.box is None for a in answers):
        if issues is not None:
            issues.append(
                ValidationIssue("warning", question.id, "answer without box; treated as multi-line")
            )
        return TableKind.MULTILINE
    width, height = page_size if page_size else (
        max(a.box.x1 for a in answers),
        max(a.box.y1 for a in answers),
    )
    eps_x = config.column_epsilon_fraction * width
    eps_y = config.column_epsilon_fraction * height
    xs = [a.box.x0 for a in answers]
    ys = [a.box.y0 for a in answers]
    mx, my = statistics.median(xs), statistics.median(ys)
    if all(abs(x - mx) <= eps_x for x in xs):
        return TableKind.COLUMN
    if all(abs(y - my) <= eps_y for y in ys):
        return TableKind.ROW
    return TableKind.MULTILINE


def same_row(a, b) -> bool:
    """Vertical intervals overlap by at least half of the smaller height."""
    overlap = min(a.y1, b.y1) - max(a.y0, b.y0)
    return overlap >= 0.5 * min(a.height, b.height) and overlap >= 0


def build_table(
    columns: Sequence[tuple[Entity, Sequence[Entity]]],
    config: ConversionConfig = ConversionConfig(),
    row_questions: Sequence[tuple[Entity, Sequence[Entity]]] = (),
) -> list[TreeFormNode]:
    """Group column cells into rows (row-major) and emit one entry per row.

    A row question whose answers fall in a row names that row's entry.
    """
    order = sorted(
        range(len(columns)),
        key=lambda k: (statistics.median(a.box.x0 for a in columns[k][1]), k),
    )
    cells = [(col, a) for col in order for a in columns[col][1]]
    cells.sort(key=lambda c: (c[1].box.y0, c[1].box.x0, order.index(c[0])))
    rows: list[tuple[Any, list]] = []
    for col, a in cells:
        for ref, members in rows:
            if same_row(ref, a.box):
                members.append((col, a))
                break
        else:
            rows.append((a.box, [(col, a)]))

    entries = []
    for _, members in rows:
        members.sort(key=lambda c: (order.index(c[0]), c[1].box.x0))
        ids = {a.id for _, a in members}
        name = next((q.text for q, ans in row_questions if ids & {a.id for a in ans}), None)
        entries.append(entry(name, [question(columns[col][0].text, a.text) for col, a in members]))
    return entries


def _break_cycles(ids: list[int], edges: dict[int, list[int]]) -> dict[int, list[int]]:
    """Drop DFS back edges; traversal visits ids and children in ascending order."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = dict.fromkeys(ids, WHITE)
    removed: set[tuple[int, int]] = set()
    for start in sorted(ids):
        if color[start] != WHITE:
            continue
        color[start] = GRAY
        stack = [(start, iter(sorted(edges.get(start, ()))))]
        while stack:
            node, it = stack[-1]
            for child in it:
                if color[child] == GRAY:
                    removed.add((node, child))
                elif color[child] == WHITE:
                    color[child] = GRAY
                    stack.append((child, iter(sorted(edges.get(child, ())))))
                    break
            else:
                color[node] = BLACK
                stack.pop()
    return {s: [d for d in ds if (s, d) not in removed] for s, ds in edges.items()}


class _Converter:
    def __init__(self, doc: FunsdDocument, config: ConversionConfig, issues: list):
        self.doc = doc
        self.config = config
        self.issues = issues
        self.page = doc.page_size()
        self.ent = doc.by_id()
        self.pos = {e.id: i for i, e in enumerate(doc.entities)}
        edges: dict[int, list[int]] = {}
        for s, d in doc.links:
            if s not in self.ent or d not in self.ent or s == d:
                continue
            # answers are leaves; a link out of one carries no structure
            if self.ent[s].label is EntityLabel.ANSWER:
                continue
            if d not in edges.get(s, []):
                edges.setdefault(s, []).append(d)
        edges = _break_cycles(list(self.ent), edges)
        self.children = {s: sorted(ds, key=self.pos.__getitem__) for s, ds in edges.items()}
        self.parents: dict[int, list[int]] = {}
        for s, ds in self.children.items():
            for d in ds:
                self.parents.setdefault(d, []).append(s)

    def kids(self, eid: int, label: EntityLabel) -> list[Entity]:
        return [self.ent[c] for c in self.children.get(eid, []) if self.ent[c].label is label]

    def run(self) -> TreeFormDoc:
        title = select_form_title(self.doc)
        if title is not None:
            # The title is the root even if some non-header links into it.
            for p in self.parents.pop(title, []):
                self.children[p].remove(title)
        roots = [e.id for e in self.doc.entities if not self.parents.get(e.id)]
        if title is None:
            return TreeFormDoc(canonical(self.section(roots)))
        others = [r for r in roots if r != title]
        ids = sorted(set(self.children.get(title, [])) | set(others), key=self.pos.__getitem__)
        node = header(self.ent[title].text, self.section(ids))
        return TreeFormDoc((node,))

    def section(self, ids: list[int]) -> list[TreeFormNode]:
        """Nodes for the given sibling entities, with table columns merged into entries."""
        out: list[TreeFormNode] = []
        columns: list[tuple[Entity, list[Entity]]] = []
        rows: list[tuple[Entity, list[Entity]]] = []
        for eid in ids:
            e = self.ent[eid]
            if e.label is EntityLabel.HEADER:
                out.append(header(e.text, self.section(self.children.get(eid, []))))
            elif e.label is EntityLabel.QUESTION:
                answers = self.kids(eid, EntityLabel.ANSWER)
                nested = [c for c in self.children.get(eid, []) if self.ent[c].label is not EntityLabel.ANSWER]
                kind = TableKind.MULTILINE
                if len(answers) >= self.config.min_table_answers:
                    kind = detect_table(e, answers, self.config, self.page, self.issues)
                if kind is TableKind.COLUMN:
                    columns.append((e, answers))
                elif kind is TableKind.ROW:
                    rows.append((e, answers))
                elif answers:
                    out.append(question(e.text, self.join(answers)))
                if nested and not answers:
                    out.append(header(e.text, self.section(nested)))
                elif nested:
                    out.extend(self.section(nested))
                elif not answers and self.config.keep_unanswered:
                    out.append(question(e.text, None))
            elif e.label is EntityLabel.ANSWER:
                if self.config.keep_unanswered and not any(
                    self.ent[p].label is EntityLabel.QUESTION for p in self.parents.get(eid, [])
                ):
                    out.append(question(None, e.text))
        out.extend(self.tables(columns, rows))
        return out

    def tables(self, columns, rows) -> list[TreeFormNode]:
        groups: list[list[int]] = []
        spans = [(min(a.box.y0 for a in ans), max(a.box.y1 for a in ans)) for _, ans in columns]
        for k, (lo, hi) in enumerate(spans):
            hits = [g for g in groups if any(spans[j][0] <= hi and lo <= spans[j][1] for j in g)]
            merged = [k]
            for g in hits:
                merged.extend(g)
                groups.remove(g)
            groups.append(sorted(merged))
        groups.sort(key=lambda g: g[0])
        out: list[TreeFormNode] = []
        used_rows: set[int] = set()
        for g in groups:
            cols = [columns[k] for k in g]
            cell_ids = {a.id for _, ans in cols for a in ans}
            named = []
            for r, (q, ans) in enumerate(rows):
                if r not in used_rows and {a.id for a in ans} <= cell_ids:
                    named.append((q, ans))
                    used_rows.add(r)
            out.extend(build_table(cols, self.config, named))
        for r, (q, ans) in enumerate(rows):
            if r not in used_rows:
                out.append(question(q.text, self.join(ans)))
        return out

    @staticmethod
    def join(answers: list[Entity]) -> str:
        if all(a.box is not None for a in answers):
            answers = sorted(answers, key=lambda a: (a.box.y0, a.box.x0))
        return "\n".join(a.text for a in answers)


def convert(
    doc: FunsdDocument,
    config: ConversionConfig = ConversionConfig(),
    issues: Optional[list] = None,
) -> TreeFormDoc:
    """Convert a FUNSD document into a TreeForm document.

    Conversion is total: problems are appended to ``issues`` as warnings.
    Multi-answer questions that are not table columns or rows get one answer
    whose text joins the answers with newlines.
    """
    issues = issues if issues is not None else []
    cleaned, dropped = discard_incomplete(doc, config.keep_unanswered)
    issues.extend(dropped)
    return _Converter(cleaned, config, issues).run()


# ---------------------------------------------------------------------------
# non-concise JSON

_GROUPS = (NodeKind.QUESTION, NodeKind.HEADER, NodeKind.ENTRY)


def node_to_json(node: TreeFormNode) -> dict:
    if node.kind is NodeKind.QUESTION:
        obj = {}
        if node.text is not None:
            obj["value"] = node.text
        if node.answer is not None:
            obj["answer"] = node.answer
        return obj
    obj: dict[str, Any] = {}
    if node.text is not None:
        obj["value"] = node.text
    for kind in _GROUPS:
        group = [node_to_json(c) for c in node.children if c.kind is kind]
        if group:
            obj[kind.value] = group
    return obj


def treeform_to_json(doc: TreeFormDoc) -> dict:
    """Top-level kinds holding a single node map to that object, as in the
    published example; everything else maps to arrays."""
    obj: dict[str, Any] = {}
    for kind in _GROUPS:
        group = [node_to_json(r) for r in doc.roots if r.kind is kind]
        if len(group) == 1:
            obj[kind.value] = group[0]
        elif group:
            obj[kind.value] = group
    return obj


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise SchemaError("expected a non-empty string", path)
    return value


def _group(obj: dict, key: str, path: str) -> list:
    if key not in obj:
        return []
    value = obj[key]
    if isinstance(value, dict):
        return [value]
    if isinstance(value, list):
        return value
    raise SchemaError("expected an object or an array of objects", f"{path}.{key}")


def _check_keys(obj: Any, allowed: set, path: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    extra = set(obj) - allowed
    if extra:
        raise SchemaError(f"unexpected keys {sorted(extra)}", path)


def _question_from_json(obj: Any, path: str, allow_incomplete: bool) -> TreeFormNode:
    _check_keys(obj, {"value", "answer"}, path)
    text = _string(obj["value"], f"{path}.value") if "value" in obj else None
    answer = _string(obj["answer"], f"{path}.answer") if "answer" in obj else None
    if text is None and not allow_incomplete:
        raise SchemaError("question without text", f"{path}.value")
    if answer is None and not allow_incomplete:
        raise SchemaError("question without answer", f"{path}.answer")
    if text is None and answer is None:
        raise SchemaError("empty question", path)
    return question(text, answer)


def _section_from_json(obj: dict, path: str, allow_incomplete: bool) -> list[TreeFormNode]:
    out = []
    for k, q in enumerate(_group(obj, "question", path)):
        out.append(_question_from_json(q, f"{path}.question[{k}]", allow_incomplete))
    for k, h in enumerate(_group(obj, "header", path)):
        out.append(_header_from_json(h, f"{path}.header[{k}]", allow_incomplete))
    for k, e in enumerate(_group(obj, "entry", path)):
        out.append(_entry_from_json(e, f"{path}.entry[{k}]", allow_incomplete))
    return out


def _header_from_json(obj: Any, path: str, allow_incomplete: bool) -> TreeFormNode:
    _check_keys(obj, {"value", "question", "header", "entry"}, path)
    title = _string(obj["value"], f"{path}.value") if "value" in obj else None
    return header(title, _section_from_json(obj, path, allow_incomplete))


def _entry_from_json(obj: Any, path: str, allow_incomplete: bool) -> TreeFormNode:
    _check_keys(obj, {"value", "question"}, path)
    name = _string(obj["value"], f"{path}.value") if "value" in obj else None
    questions = [
        _question_from_json(q, f"{path}.question[{k}]", allow_incomplete)
        for k, q in enumerate(_group(obj, "question", path))
    ]
    if not questions:
        raise SchemaError("entry without questions", f"{path}.question")
    return entry(name, questions)


def treeform_from_json(data: Any, allow_incomplete: bool = False) -> TreeFormDoc:
    _check_keys(data, {"question", "header", "entry"}, "$")
    return TreeFormDoc(tuple(_section_from_json(data, "$", allow_incomplete)))


# ---------------------------------------------------------------------------
# concise JSON

ENTRY_KEY = "entry"


def _put(target: dict, key: str, value: Any) -> None:
    if key not in target:
        target[key] = value
    elif isinstance(target[key], list):
        target[key].append(value)
    else:
        target[key] = [target[key], value]


def _concise_section(children: Iterable[TreeFormNode]) -> dict:
    out: dict[str, Any] = {}
    for c in children:
        if c.kind is NodeKind.HEADER:
            _put(out, c.text or "", _concise_section(c.sub_nodes()))
        elif c.kind is NodeKind.QUESTION:
            _put(out, c.text or "", c.answer)
        elif c.kind is NodeKind.ENTRY:
            body = _concise_section(c.sub_nodes())
            _put(out, ENTRY_KEY, {c.text: body} if c.text else body)
    return out


def to_concise(doc: TreeFormDoc) -> dict:
    """Concise form: titles and questions become keys, answers become values.

    Colliding sibling keys hold an array of their values in order.  Untitled
    headers use the key ``""``.
    """
    return _concise_section(doc.roots)


def _concise_questions(body: dict, path: str, allow_incomplete: bool) -> list[TreeFormNode]:
    nodes = _concise_nodes(body, path, allow_incomplete)
    if not nodes or any(n.kind is not NodeKind.QUESTION for n in nodes):
        raise SchemaError("entry must map question texts to answers", path)
    return nodes


def _concise_entry(value: dict, path: str, allow_incomplete: bool) -> TreeFormNode:
    if len(value) == 1:
        (name, body), = value.items()
        if isinstance(body, dict):
            return entry(name, _concise_questions(body, f"{path}.{name}", allow_incomplete))
    return entry(None, _concise_questions(value, path, allow_incomplete))


def _concise_nodes(data: dict, path: str, allow_incomplete: bool) -> list[TreeFormNode]:
    out = []
    for key, raw in data.items():
        values = raw if isinstance(raw, list) else [raw]
        for k, value in enumerate(values):
            vpath = f"{path}.{key}" + (f"[{k}]" if isinstance(raw, list) else "")
            if key == ENTRY_KEY and isinstance(value, dict):
                out.append(_concise_entry(value, vpath, allow_incomplete))
            elif isinstance(value, dict):
                out.append(header(key or None, _concise_nodes(value, vpath, allow_incomplete)))
            elif isinstance(value, str) and value:
                if not key and not allow_incomplete:
                    raise SchemaError("question without text", vpath)
                out.append(question(key or None, value))
            elif value is None and key and allow_incomplete:
                out.append(question(key, None))
            else:
                raise SchemaError(f"unexpected value {value!r}", vpath)
    return list(canonical(out))


def from_concise(data: Any, allow_incomplete: bool = False) -> TreeFormDoc:
    if not isinstance(data, dict):
        raise SchemaError("expected an object", "$")
    return TreeFormDoc(tuple(_concise_nodes(data, "$", allow_incomplete)))


# ---------------------------------------------------------------------------
# bytes


def dumps(value: Any, sort_keys: bool = False) -> bytes:
    return json.dumps(value, ensure_ascii=False, indent=2, sort_keys=sort_keys).encode("utf-8")


def serialize_treeform(doc: TreeFormDoc, concise: bool = False) -> bytes:
    return dumps(to_concise(doc) if concise else treeform_to_json(doc))


def parse_treeform(raw: bytes | str, concise: bool = False, allow_incomplete: bool = False) -> TreeFormDoc:
    data = load_json(raw)
    if concise:
        return from_concise(data, allow_incomplete)
    return treeform_from_json(data, allow_incomplete)
