"""Edge-set F1, entity labeling / linking F1, and corpus aggregation."""

from __future__ import annotations

import io
import json
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .aggregate import ROOT, AggregatedTree, build_aggregated_tree
from .align import DEFAULT_THRESHOLD, Alignment, greedy_align, naa
from .annotation import Entity, FunsdDocument
from .errors import EmptyCorpusError

METRICS = ("labeling_f1", "linking_f1", "tree_f1", "naa", "ganted")
F1_METRICS = ("labeling_f1", "linking_f1", "tree_f1")
AGGREGATIONS = ("mean", "median")


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "PRF":
        # An empty side scores 1.0 only when the other side is empty too.
        both_empty = tp + fp == 0 and tp + fn == 0
        precision = tp / (tp + fp) if tp + fp else float(both_empty)
        recall = tp / (tp + fn) if tp + fn else float(both_empty)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(precision, recall, f1, tp, fp, fn)


def edge_prf(predicted: Iterable, gold: Iterable) -> PRF:
    predicted, gold = set(predicted), set(gold)
    tp = len(predicted & gold)
    return PRF.from_counts(tp, len(predicted) - tp, len(gold) - tp)


def tree_f1(pred: AggregatedTree, gt: AggregatedTree, alignment: Alignment) -> PRF:
    """Labeled edge-set F1 with predicted nodes mapped onto gt nodes.

    Edges touching an unaligned predicted node can never be correct.
    """
    to_gt = alignment.pred_to_gt()
    to_gt[ROOT] = ROOT
    mapped = {
        (to_gt[p], to_gt[c], label)
        for p, c, label in pred.edges
        if p in to_gt and c in to_gt
    }
    tp = len(mapped & gt.edges)
    return PRF.from_counts(tp, len(pred.edges) - tp, len(gt.edges) - tp)


def labeling_f1(pred: FunsdDocument, gt: FunsdDocument, alignment: Alignment) -> PRF:
    """Entity labeling F1; an entity counts when aligned and equally labeled.

    ``alignment`` indexes the non-``other`` entities of each document.
    """
    p_ents, g_ents = pred.without_other(), gt.without_other()
    tp = sum(1 for i, j, _ in alignment.pairs if p_ents[i].label is g_ents[j].label)
    return PRF.from_counts(tp, len(p_ents) - tp, len(g_ents) - tp)


def _kept_links(doc: FunsdDocument, kept: list[Entity]) -> set[tuple[int, int]]:
    ids = {e.id for e in kept}
    return {(s, d) for s, d in doc.links if s in ids and d in ids and s != d}


def linking_f1(pred: FunsdDocument, gt: FunsdDocument, alignment: Alignment) -> PRF:
    """Directed entity-link F1 with predicted endpoints mapped through ``alignment``."""
    p_ents, g_ents = pred.without_other(), gt.without_other()
    p_pos = {e.id: i for i, e in enumerate(p_ents)}
    to_gt = alignment.pred_to_gt()
    predicted = _kept_links(pred, p_ents)
    gold = _kept_links(gt, g_ents)
    mapped = set()
    for s, d in predicted:
        i, j = p_pos[s], p_pos[d]
        if i in to_gt and j in to_gt:
            mapped.add((g_ents[to_gt[i]].id, g_ents[to_gt[j]].id))
    tp = len(mapped & gold)
    return PRF.from_counts(tp, len(predicted) - tp, len(gold) - tp)


def align_documents(
    pred: FunsdDocument, gt: FunsdDocument, threshold: float = DEFAULT_THRESHOLD
) -> Alignment:
    return greedy_align(
        [e.text for e in pred.without_other()],
        [e.text for e in gt.without_other()],
        threshold,
    )


@dataclass(frozen=True)
class DocumentScores:
    doc_id: str
    labeling: Optional[PRF] = None
    linking: Optional[PRF] = None
    tree: Optional[PRF] = None
    naa: Optional[float] = None
    ganted: Optional[float] = None

    def value(self, metric: str) -> Optional[float]:
        """Raw metric value: F1 in [0, 1], NAA in [0, 1], GAnTED on the x100 scale."""
        if metric == "labeling_f1":
            return self.labeling.f1 if self.labeling else None
        if metric == "linking_f1":
            return self.linking.f1 if self.linking else None
        if metric == "tree_f1":
            return self.tree.f1 if self.tree else None
        if metric == "naa":
            return self.naa
        if metric == "ganted":
            return self.ganted
        raise KeyError(metric)


def score_document(
    doc_id: str,
    pred: Optional[FunsdDocument],
    gt: Optional[FunsdDocument],
    metrics: Sequence[str] = METRICS,
    threshold: float = DEFAULT_THRESHOLD,
    pred_treeform=None,
    gt_treeform=None,
    conversion_config=None,
) -> DocumentScores:
    """Compute the selected metrics for one document.

    FUNSD metrics need both FUNSD documents.  GAnTED uses the given TreeForm
    documents, converting from FUNSD where one is missing.  The tree-edit
    distance code is only imported when ``ganted`` is requested.
    """
    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}")
    scores: dict = {}
    funsd_metrics = {"labeling_f1", "linking_f1", "tree_f1", "naa"} & set(metrics)
    if funsd_metrics and pred is not None and gt is not None:
        alignment = align_documents(pred, gt, threshold)
        if "labeling_f1" in metrics:
            scores["labeling"] = labeling_f1(pred, gt, alignment)
        if "linking_f1" in metrics:
            scores["linking"] = linking_f1(pred, gt, alignment)
        if "tree_f1" in metrics:
            scores["tree"] = tree_f1(
                build_aggregated_tree(pred), build_aggregated_tree(gt), alignment
            )
        if "naa" in metrics:
            scores["naa"] = naa(alignment)
    if "ganted" in metrics:
        from .ted import ganted
        from .treeform import ConversionConfig, convert

        config = conversion_config or ConversionConfig()
        if gt_treeform is None and gt is not None:
            gt_treeform = convert(gt, config)
        if pred_treeform is None and pred is not None:
            pred_treeform = convert(pred, config)
        if gt_treeform is not None and gt_treeform.roots and pred_treeform is not None:
            scores["ganted"] = ganted(pred_treeform, gt_treeform)
    return DocumentScores(doc_id, **scores)


@dataclass(frozen=True)
class MetricReport:
    per_document: tuple[DocumentScores, ...]
    corpus: dict[str, Optional[float]]
    aggregation: str
    metrics: tuple[str, ...] = METRICS
    missing: tuple[str, ...] = field(default=())


def aggregate(values: Sequence[float], mode: str) -> float:
    if not values:
        raise EmptyCorpusError("empty corpus")
    if mode == "mean":
        return statistics.fmean(values)
    if mode == "median":
        return statistics.median(values)
    raise ValueError(f"unknown aggregation {mode!r}")


def aggregate_report(
    per_doc: Sequence[DocumentScores],
    mode: str = "median",
    metrics: Sequence[str] = METRICS,
    missing: Sequence[str] = (),
) -> MetricReport:
    """Corpus value per metric; documents lacking a metric are skipped for it."""
    if not per_doc:
        raise EmptyCorpusError("empty corpus")
    if mode not in AGGREGATIONS:
        raise ValueError(f"unknown aggregation {mode!r}")
    corpus: dict[str, Optional[float]] = {}
    for metric in metrics:
        values = [v for d in per_doc if (v := d.value(metric)) is not None]
        corpus[metric] = aggregate(values, mode) if values else None
    return MetricReport(tuple(per_doc), corpus, mode, tuple(metrics), tuple(missing))


# ---------------------------------------------------------------------------
# report formatting


def display_value(metric: str, value: Optional[float]) -> Optional[float]:
    """Scale and round like the published tables: F1 x100 (1 dp), NAA 2 dp, GAnTED 1 dp."""
    if value is None:
        return None
    if metric in F1_METRICS:
        return round(value * 100, 1)
    if metric == "naa":
        return round(value, 2)
    return round(value, 1)


def _fmt(metric: str, value: Optional[float]) -> str:
    shown = display_value(metric, value)
    if shown is None:
        return "NA"
    return f"{shown:.2f}" if metric == "naa" else f"{shown:.1f}"


def report_to_json(report: MetricReport) -> dict:
    return {
        "aggregation": report.aggregation,
        "metrics": list(report.metrics),
        "documents": [
            {"id": d.doc_id, **{m: display_value(m, d.value(m)) for m in report.metrics}}
            for d in report.per_document
        ],
        "corpus": {m: display_value(m, report.corpus.get(m)) for m in report.metrics},
        "missing": list(report.missing),
    }


def report_to_tsv(report: MetricReport) -> str:
    out = io.StringIO()
    out.write("\t".join(["id", *report.metrics]) + "\n")
    for d in report.per_document:
        out.write("\t".join([d.doc_id, *(_fmt(m, d.value(m)) for m in report.metrics)]) + "\n")
    label = f"corpus:{report.aggregation}"
    out.write("\t".join([label, *(_fmt(m, report.corpus.get(m)) for m in report.metrics)]) + "\n")
    return out.getvalue()


def serialize_report(report: MetricReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report_to_json(report), ensure_ascii=False, indent=2) + "\n"
    if fmt == "tsv":
        return report_to_tsv(report)
    raise ValueError(f"unknown report format {fmt!r}")

