"""Synthetic forms with known TreeForm ground truth, plus noise operators.

Randomness comes from :class:`random.Random` (Mersenne Twister).  Noise
streams are seeded with strings such as ``"7:char:3"``; string seeds are
hashed with SHA-512 by the standard library, so outputs do not depend on the
platform or on ``PYTHONHASHSEED``.

Each noise operator draws the same random numbers whatever its rate, and an
element is affected when its draw falls below the rate.  Raising a rate
therefore only adds perturbations to the ones made at the lower rate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .annotation import BoundingBox, Entity, EntityLabel, FunsdDocument, make_document
from .errors import ConfigError
from .treeform import TreeFormDoc, TreeFormNode, entry, header, question

DEFAULT_VOCABULARY = (
    "name", "date", "address", "phone", "fax", "company", "recipient", "sender",
    "total", "amount", "account", "brand", "product", "code", "region", "report",
    "project", "budget", "status", "approved", "number", "city", "state", "zip",
    "client", "contact", "period", "item", "unit", "price", "quantity", "notes",
    "Kevin", "Narko", "Morris", "Little", "Burnett", "Mulderig", "June", "March",
)

LINE = 30
BOX_HEIGHT = 16
CHAR_WIDTH = 7


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    sections: tuple[int, int] = (1, 3)
    qa_per_section: tuple[int, int] = (1, 4)
    table_probability: float = 0.3
    table_rows: tuple[int, int] = (2, 4)
    table_cols: tuple[int, int] = (1, 3)
    vocabulary: tuple[str, ...] = DEFAULT_VOCABULARY
    page: tuple[int, int] = (1000, 1000)

    def __post_init__(self):
        for name in ("sections", "qa_per_section", "table_rows", "table_cols"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0:
                raise ConfigError(f"{name} must be a non-empty range of non-negative integers")
        if self.sections[0] < 1:
            raise ConfigError("sections must start at 1 or more")
        if self.table_rows[0] < 2:
            # a one-row column is indistinguishable from a question-answer pair
            raise ConfigError("table_rows must start at 2 or more")
        if self.table_cols[0] < 1:
            raise ConfigError("table_cols must start at 1 or more")
        if not 0 <= self.table_probability <= 1:
            raise ConfigError("table_probability must be in [0, 1]")
        if not self.vocabulary or not all(isinstance(w, str) and w.strip() for w in self.vocabulary):
            raise ConfigError("vocabulary must be a non-empty list of words")
        if self.page[0] < 400 or self.page[1] < 100:
            raise ConfigError("page must be at least 400 x 100 pixels")


class _Layout:
    def __init__(self, config: SynthConfig, rng: random.Random):
        self.config = config
        self.rng = rng
        self.entities: list[Entity] = []
        self.links: list[tuple[int, int]] = []
        self.y = 20

    def text(self) -> str:
        words = self.rng.randint(1, 3)
        return " ".join(self.rng.choice(self.config.vocabulary) for _ in range(words))

    def add(self, label: EntityLabel, text: str, x0: float, y0: float, max_width: float) -> int:
        eid = len(self.entities)
        width = min(max(len(text), 1) * CHAR_WIDTH, max_width)
        box = BoundingBox(x0, y0, x0 + width, y0 + BOX_HEIGHT)
        self.entities.append(Entity(eid, text, label, (), box))
        return eid

    def link(self, src: int, dst: int) -> None:
        self.links.append((src, dst))

    def section(self, index: int, title_id: Optional[int]) -> tuple[int, TreeFormNode]:
        rng, cfg = self.rng, self.config
        width = cfg.page[0]
        title = self.text()
        hid = self.add(EntityLabel.HEADER, title, 40, self.y, width / 2)
        if title_id is not None and rng.random() < 0.5:
            self.link(title_id, hid)
        self.y += LINE + 10

        kids: list[TreeFormNode] = []
        for _ in range(rng.randint(*cfg.qa_per_section)):
            q, a = self.text(), self.text()
            qid = self.add(EntityLabel.QUESTION, q, 60, self.y, width * 0.35)
            aid = self.add(EntityLabel.ANSWER, a, width * 0.42, self.y, width * 0.5)
            self.link(hid, qid)
            self.link(qid, aid)
            kids.append(question(q, a))
            self.y += LINE

        if rng.random() < cfg.table_probability:
            kids.extend(self.table(hid))
        return hid, header(title, kids)

    def table(self, hid: int) -> list[TreeFormNode]:
        rng, cfg = self.rng, self.config
        n_cols = rng.randint(*cfg.table_cols)
        n_rows = rng.randint(*cfg.table_rows)
        col_width = (cfg.page[0] - 100) / n_cols
        columns = []
        for c in range(n_cols):
            q = self.text()
            qid = self.add(EntityLabel.QUESTION, q, 60 + c * col_width, self.y, col_width - 20)
            self.link(hid, qid)
            columns.append((q, qid))
        rows = []
        for r in range(n_rows):
            y = self.y + (r + 1) * LINE
            cells = []
            for c, (q, qid) in enumerate(columns):
                a = self.text()
                aid = self.add(EntityLabel.ANSWER, a, 60 + c * col_width, y, col_width - 20)
                self.link(qid, aid)
                cells.append(question(q, a))
            rows.append(entry(None, cells))
        self.y += (n_rows + 1) * LINE + 10
        return rows


def generate(config: SynthConfig) -> tuple[TreeFormDoc, FunsdDocument]:
    """A form and its exact TreeForm ground truth.

    The first section's header is the form title (topmost).  Later section
    headers are linked from the title at random, otherwise left un-nested as
    FUNSD often does; either way they belong under the title.  Table columns
    are left-aligned so that they are detected as columns.
    """
    rng = random.Random(config.seed)
    layout = _Layout(config, rng)
    n_sections = rng.randint(*config.sections)
    title_id, title_node = layout.section(0, None)
    sections = [layout.section(i, title_id)[1] for i in range(1, n_sections)]
    tree = TreeFormDoc((header(title_node.text, [*title_node.sub_nodes(), *sections]),))
    height = max(config.page[1], layout.y + LINE)
    doc = make_document(layout.entities, layout.links, config.page[0], height)
    return tree, doc


def generate_corpus(config: SynthConfig, count: int) -> list[tuple[TreeFormDoc, FunsdDocument]]:
    """``count`` forms; form ``i`` uses seed ``config.seed XOR i``."""
    out = []
    for i in range(count):
        cfg = SynthConfig(**{**config.__dict__, "seed": config.seed ^ i})
        out.append(generate(cfg))
    return out


@dataclass(frozen=True)
class NoiseSpec:
    label_flip_rate: float = 0.0
    link_drop_rate: float = 0.0
    char_edit_rate: float = 0.0
    entity_split_rate: float = 0.0
    seed: int = 0
    alphabet: str = field(default="abcdefghijklmnopqrstuvwxyz", repr=False)

    def __post_init__(self):
        for name in ("label_flip_rate", "link_drop_rate", "char_edit_rate", "entity_split_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f"{name} must be in [0, 1]")


_FLIPPABLE = (EntityLabel.HEADER, EntityLabel.QUESTION, EntityLabel.ANSWER)


def _stream(seed: int, name: str, index: int = 0) -> random.Random:
    return random.Random(f"{seed}:{name}:{index}")


def _edit_text(text: str, rate: float, rng: random.Random, alphabet: str) -> str:
    out = []
    for ch in text:
        u, op, sub = rng.random(), rng.random(), rng.choice(alphabet)
        if u >= rate:
            out.append(ch)
        elif op < 1 / 3:
            out.append(sub if sub != ch else alphabet[(alphabet.index(sub) + 1) % len(alphabet)])
        elif op < 2 / 3:
            continue
        else:
            out.append(ch)
            out.append(sub)
    return "".join(out) or alphabet[0]


def perturb(doc: FunsdDocument, noise: NoiseSpec) -> FunsdDocument:
    """Apply label flips, character edits, link drops and entity splits."""
    seed = noise.seed
    entities = []
    for i, e in enumerate(doc.entities):
        label, text = e.label, e.text
        r = _stream(seed, "label", i)
        u, choice = r.random(), r.choice([l for l in _FLIPPABLE if l is not label] or [label])
        if u < noise.label_flip_rate and label is not EntityLabel.OTHER:
            label = choice
        if noise.char_edit_rate > 0:
            text = _edit_text(text, noise.char_edit_rate, _stream(seed, "char", i), noise.alphabet)
        entities.append(Entity(e.id, text, label, (), e.box, None if text != e.text else e.words))

    link_rng = _stream(seed, "link")
    links = [l for l in doc.links if link_rng.random() >= noise.link_drop_rate]

    if noise.entity_split_rate > 0:
        entities = _split_entities(entities, noise, seed)
    return make_document(entities, links, doc.page_width, doc.page_height)


def _split_entities(entities: list[Entity], noise: NoiseSpec, seed: int) -> list[Entity]:
    next_id = max((e.id for e in entities), default=-1) + 1
    out = []
    for i, e in enumerate(entities):
        r = _stream(seed, "split", i)
        u, cut = r.random(), r.random()
        words = e.text.split(" ")
        if u >= noise.entity_split_rate or len(words) < 2:
            out.append(e)
            continue
        k = 1 + int(cut * (len(words) - 1))
        left, right = " ".join(words[:k]), " ".join(words[k:])
        box_l = box_r = None
        if e.box is not None:
            mid = e.box.x0 + e.box.width * len(left) / max(len(e.text), 1)
            box_l = BoundingBox(e.box.x0, e.box.y0, mid, e.box.y1)
            box_r = BoundingBox(mid, e.box.y0, e.box.x1, e.box.y1)
        out.append(Entity(e.id, left, e.label, (), box_l))
        out.append(Entity(next_id, right, e.label, (), box_r))
        next_id += 1
    return out
