"""Ordered tree-edit distance (Zhang-Shasha), nTED and greedy-aligned nTED.

TreeForm documents are embedded as labeled ordered trees: internal nodes carry
a kind token (``<header>``, ``<question>``, ``<answer>``, ``<entry>``), leaves
carry their text.  Several roots hang under a virtual ``<root>`` node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .align import normalized_levenshtein
from .errors import EmptyTreeError
from .treeform import NodeKind, TreeFormDoc, TreeFormNode

ROOT_TOKEN = "<root>"
KIND_TOKENS = {
    NodeKind.HEADER: "<header>",
    NodeKind.QUESTION: "<question>",
    NodeKind.ANSWER: "<answer>",
    NodeKind.ENTRY: "<entry>",
}
RESERVED = frozenset([ROOT_TOKEN, *KIND_TOKENS.values()])
_ESCAPE = "\\"


@dataclass(frozen=True)
class LabeledTree:
    label: str
    children: tuple["LabeledTree", ...] = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def escape(text: str) -> str:
    """Leaf text that could be mistaken for a kind token gets a backslash prefix."""
    if text in RESERVED or text.startswith(_ESCAPE):
        return _ESCAPE + text
    return text


def unescape(label: str) -> str:
    return label[1:] if label.startswith(_ESCAPE) else label


def is_kind_token(label: str) -> bool:
    return label in RESERVED


@dataclass(frozen=True)
class EditCosts:
    insert: float = 1.0
    delete: float = 1.0

    def rename(self, a: str, b: str) -> float:
        if a == b:
            return 0.0
        if is_kind_token(a) or is_kind_token(b):
            return 1.0
        return normalized_levenshtein(unescape(a), unescape(b))


UNIT_COSTS = EditCosts()


def tree_size(tree: Optional[LabeledTree]) -> int:
    return 0 if tree is None else tree.size()


class _Annotated:
    """Postorder labels, leftmost-leaf indices and keyroots of a tree."""

    __slots__ = ("labels", "lmd", "keyroots")

    def __init__(self, tree: LabeledTree):
        labels: list[str] = []
        lmd: list[int] = []
        # iterative postorder
        stack = [(tree, False)]
        pending: list[list[int]] = []
        while stack:
            node, done = stack.pop()
            if done:
                kid_lmds = pending.pop()
                idx = len(labels)
                labels.append(node.label)
                lmd.append(kid_lmds[0] if kid_lmds else idx)
                if pending:
                    pending[-1].append(lmd[idx])
                continue
            stack.append((node, True))
            pending.append([])
            for child in reversed(node.children):
                stack.append((child, False))
        self.labels = labels
        self.lmd = lmd
        highest: dict[int, int] = {}
        for i, l in enumerate(lmd):
            highest[l] = i
        self.keyroots = sorted(highest.values())


def tree_edit_distance(
    a: Optional[LabeledTree], b: Optional[LabeledTree], costs: EditCosts = UNIT_COSTS
) -> float:
    """Minimum cost of node deletions, insertions and renames turning ``a`` into ``b``.

    ``None`` stands for the empty tree.
    """
    if a is None or b is None:
        return tree_size(a) * costs.delete + tree_size(b) * costs.insert
    return _zhang_shasha(_Annotated(a), _Annotated(b), costs)


def _zhang_shasha(A: _Annotated, B: _Annotated, costs: EditCosts) -> float:
    la, lb = A.lmd, B.lmd
    n, m = len(A.labels), len(B.labels)
    ins, dele = costs.insert, costs.delete
    cache: dict[tuple[str, str], float] = {}
    ren = [[0.0] * m for _ in range(n)]
    for i, x in enumerate(A.labels):
        row = ren[i]
        for j, y in enumerate(B.labels):
            key = (x, y)
            if key not in cache:
                cache[key] = costs.rename(x, y)
            row[j] = cache[key]
    td = [[0.0] * m for _ in range(n)]

    for i in A.keyroots:
        li = la[i]
        for j in B.keyroots:
            lj = lb[j]
            rows, cols = i - li + 2, j - lj + 2
            fd = [[0.0] * cols for _ in range(rows)]
            for x in range(1, rows):
                fd[x][0] = fd[x - 1][0] + dele
            first = fd[0]
            for y in range(1, cols):
                first[y] = first[y - 1] + ins
            for x in range(1, rows):
                i1 = x - 1 + li
                li1 = la[i1]
                prev, cur = fd[x - 1], fd[x]
                ren_row, td_row = ren[i1], td[i1]
                for y in range(1, cols):
                    j1 = y - 1 + lj
                    lj1 = lb[j1]
                    best = prev[y] + dele
                    alt = cur[y - 1] + ins
                    if alt < best:
                        best = alt
                    if li1 == li and lj1 == lj:
                        alt = prev[y - 1] + ren_row[j1]
                        if alt < best:
                            best = alt
                        cur[y] = best
                        td_row[j1] = best
                    else:
                        alt = fd[li1 - li][lj1 - lj] + td_row[j1]
                        if alt < best:
                            best = alt
                        cur[y] = best
    return td[n - 1][m - 1]


def nted(pred: Optional[LabeledTree], gt: Optional[LabeledTree], costs: EditCosts = UNIT_COSTS) -> float:
    """Tree-edit distance per ground-truth node, x100."""
    size = tree_size(gt)
    if size == 0:
        raise EmptyTreeError("ground-truth tree is empty")
    return 100.0 * tree_edit_distance(pred, gt, costs) / size


def embed_node(node: TreeFormNode) -> LabeledTree:
    if node.kind is NodeKind.VALUE:
        return LabeledTree(escape(node.value))
    return LabeledTree(KIND_TOKENS[node.kind], tuple(embed_node(c) for c in node.children))


def embed(doc: TreeFormDoc) -> Optional[LabeledTree]:
    """Single labeled tree for a document; ``None`` for an empty document."""
    if not doc.roots:
        return None
    if len(doc.roots) == 1:
        return embed_node(doc.roots[0])
    return LabeledTree(ROOT_TOKEN, tuple(embed_node(r) for r in doc.roots))


def greedy_sibling_align(
    pred: Optional[LabeledTree], gt: Optional[LabeledTree], costs: EditCosts = UNIT_COSTS
) -> Optional[LabeledTree]:
    """Reorder the children of ``pred`` to follow their best partners in ``gt``.

    Starting from the two roots, the children of a matched pair are paired
    greedily by label rename cost; among labels that share anything (cost
    below 1) the subtree edit distance breaks ties, then gt order, then pred
    order.  Matched children are placed in gt order, unmatched ones follow in
    their original order, and recursion continues into matched pairs only.
    Nodes are never added, removed or relabeled.
    """
    if pred is None or gt is None:
        return pred
    return _align(pred, gt, costs)


def _align(p: LabeledTree, g: LabeledTree, costs: EditCosts) -> LabeledTree:
    if not p.children or not g.children:
        return p
    candidates = []
    for j, gc in enumerate(g.children):
        for i, pc in enumerate(p.children):
            label_cost = costs.rename(pc.label, gc.label)
            detail = _subtree_cost(pc, gc, costs) if label_cost < 1 else 0.0
            candidates.append((label_cost, detail, j, i))
    candidates.sort()
    gt_of: dict[int, int] = {}
    used_gt: set[int] = set()
    for _, _, j, i in candidates:
        if i in gt_of or j in used_gt:
            continue
        gt_of[i] = j
        used_gt.add(j)
    matched = sorted(gt_of.items(), key=lambda item: item[1])
    children = [_align(p.children[i], g.children[j], costs) for i, j in matched]
    children.extend(c for i, c in enumerate(p.children) if i not in gt_of)
    return LabeledTree(p.label, tuple(children))


def _subtree_cost(a: LabeledTree, b: LabeledTree, costs: EditCosts) -> float:
    if not a.children and not b.children:
        return costs.rename(a.label, b.label)
    return tree_edit_distance(a, b, costs)


def ganted_trees(
    pred: Optional[LabeledTree], gt: Optional[LabeledTree], costs: EditCosts = UNIT_COSTS
) -> float:
    return nted(greedy_sibling_align(pred, gt, costs), gt, costs)


def ganted(pred: TreeFormDoc, gt: TreeFormDoc, costs: EditCosts = UNIT_COSTS) -> float:
    """Greedy-aligned normalized tree-edit distance between TreeForm documents (x100)."""
    return ganted_trees(embed(pred), embed(gt), costs)


def permute_siblings(tree: LabeledTree, shuffle: Callable[[list], None]) -> LabeledTree:
    """Copy of ``tree`` with every child list reordered by ``shuffle`` (in place on a list)."""
    kids = [permute_siblings(c, shuffle) for c in tree.children]
    shuffle(kids)
    return LabeledTree(tree.label, tuple(kids))
