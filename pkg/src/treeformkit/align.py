"""Normalized Levenshtein distance, greedy node alignment and NAA."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from rapidfuzz.distance import Levenshtein
from rapidfuzz.process import cdist

DEFAULT_THRESHOLD = 0.4


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over code points."""
    return Levenshtein.distance(a, b)


def normalized_levenshtein(a: str, b: str) -> float:
    """``levenshtein(a, b) / max(len(a), len(b))``; 0.0 when both are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return Levenshtein.distance(a, b) / longest


@dataclass(frozen=True)
class Alignment:
    pairs: tuple[tuple[int, int, float], ...]
    unaligned_pred: tuple[int, ...]
    unaligned_gt: tuple[int, ...]
    threshold: float = DEFAULT_THRESHOLD

    def pred_to_gt(self) -> dict[int, int]:
        return {p: g for p, g, _ in self.pairs}

    def gt_to_pred(self) -> dict[int, int]:
        return {g: p for p, g, _ in self.pairs}

    def inverse(self) -> "Alignment":
        """Swap the roles of prediction and ground truth."""
        return Alignment(
            tuple(sorted((g, p, d) for p, g, d in self.pairs)),
            self.unaligned_gt,
            self.unaligned_pred,
            self.threshold,
        )

    @classmethod
    def identity(cls, n: int) -> "Alignment":
        return cls(tuple((i, i, 0.0) for i in range(n)), (), ())


def distance_matrix(pred: Sequence[str], gt: Sequence[str]) -> list[list[float]]:
    """``[i][j]`` = normalized Levenshtein distance of ``pred[i]`` to ``gt[j]``."""
    if not pred or not gt:
        return [[] for _ in pred]
    raw = cdist(list(pred), list(gt), scorer=Levenshtein.distance).tolist()
    return [
        [d / longest if (longest := max(len(a), len(b))) else 0.0 for d, b in zip(row, gt)]
        for row, a in zip(raw, pred)
    ]


def greedy_align(
    pred: Sequence[str], gt: Sequence[str], threshold: float = DEFAULT_THRESHOLD
) -> Alignment:
    """Repeatedly pair the closest unmatched (pred, gt) texts below ``threshold``.

    Equal distances are broken by the smaller gt index, then the smaller pred
    index.
    """
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    matrix = distance_matrix(pred, gt)
    candidates = sorted(
        (d, j, i)
        for i, row in enumerate(matrix)
        for j, d in enumerate(row)
        if d < threshold
    )
    used_pred: set[int] = set()
    used_gt: set[int] = set()
    pairs = []
    for d, j, i in candidates:
        if i in used_pred or j in used_gt:
            continue
        used_pred.add(i)
        used_gt.add(j)
        pairs.append((i, j, d))
    return Alignment(
        tuple(sorted(pairs)),
        tuple(i for i in range(len(pred)) if i not in used_pred),
        tuple(j for j in range(len(gt)) if j not in used_gt),
        threshold,
    )


def naa(alignment: Alignment) -> float:
    """Node-alignment accuracy: mean distance, 1.0 per unaligned node on either side."""
    unaligned = len(alignment.unaligned_pred) + len(alignment.unaligned_gt)
    count = len(alignment.pairs) + unaligned
    if count == 0:
        return 0.0
    return (sum(d for _, _, d in alignment.pairs) + unaligned) / count
