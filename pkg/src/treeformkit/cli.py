"""``treeformkit`` command line: validate, convert, eval, gen, postprocess.

Exit codes: 0 success, 1 validation or evaluation failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Optional, Sequence

from .aggregate import build_aggregated_tree, serialize_aggregated
from .align import DEFAULT_THRESHOLD
from .annotation import FunsdDocument, load_json, make_document, parse_funsd, serialize_funsd, validate
from .errors import TreeFormKitError
from .metrics import AGGREGATIONS, METRICS, aggregate_report, score_document, serialize_report
from .treeform import (
    ConversionConfig,
    TreeFormDoc,
    convert,
    dumps,
    from_concise,
    serialize_treeform,
    treeform_from_json,
    treeform_to_json,
)

log = logging.getLogger("treeformkit")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad arguments, unreadable files or unparsable input (exit 2)."""


# ---------------------------------------------------------------------------
# file helpers


def stem(path: Path) -> str:
    return path.name.split(".", 1)[0]


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from None


def _write(path: Optional[str], data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(data)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from None


def is_funsd(data: Any) -> bool:
    return isinstance(data, list) or (isinstance(data, dict) and "form" in data)


def load_treeform(data: Any, name: str = "") -> TreeFormDoc:
    """Non-concise TreeForm, falling back to the concise form."""
    if ".concise." in name:
        return from_concise(data)
    try:
        return treeform_from_json(data)
    except TreeFormKitError:
        return from_concise(data)


@dataclass
class Loaded:
    funsd: Optional[FunsdDocument] = None
    treeform: Optional[TreeFormDoc] = None


def load_dir(directory: Path) -> dict[str, Loaded]:
    """Annotations of a directory keyed by stem; FUNSD and TreeForm files may share a stem."""
    if not directory.is_dir():
        raise UsageError(f"{directory}: not a directory")
    out: dict[str, Loaded] = {}
    for path in sorted(directory.glob("*.json")):
        raw = _read(path)
        try:
            data = load_json(raw)
            slot = out.setdefault(stem(path), Loaded())
            if is_funsd(data):
                slot.funsd = parse_funsd(raw)
            else:
                slot.treeform = load_treeform(data, path.name)
        except TreeFormKitError as exc:
            raise UsageError(f"{path}: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# config


@dataclass
class EvalJob:
    gt_dir: Path
    pred_dir: Path
    metrics: tuple[str, ...] = METRICS
    aggregation: str = "median"
    alignment_threshold: float = DEFAULT_THRESHOLD
    format: str = "json"
    jobs: int = 1

    def __post_init__(self):
        if not self.metrics:
            raise UsageError("at least one metric is required")
        unknown = set(self.metrics) - set(METRICS)
        if unknown:
            raise UsageError(f"unknown metrics: {', '.join(sorted(unknown))}")
        if self.aggregation not in AGGREGATIONS:
            raise UsageError(f"unknown aggregation {self.aggregation!r}")
        if not 0 < self.alignment_threshold <= 1:
            raise UsageError("threshold must be in (0, 1]")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        data = load_json(_read(Path(path)))
    except TreeFormKitError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    return data


def conversion_config(config: dict) -> ConversionConfig:
    names = {f.name for f in fields(ConversionConfig)}
    try:
        return ConversionConfig(**{k: v for k, v in config.items() if k in names})
    except (TypeError, ValueError, TreeFormKitError) as exc:
        raise UsageError(f"config: {exc}") from None


def _pick(args, config: dict, name: str, default, key: Optional[str] = None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(key or name, default)


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, config: dict) -> int:
    target = Path(args.path)
    if not target.exists():
        raise UsageError(f"{target}: no such file or directory")
    files = sorted(target.glob("*.json")) if target.is_dir() else [target]
    failed = False
    for path in files:
        raw = _read(path)
        try:
            data = load_json(raw)
            if not is_funsd(data):
                load_treeform(data, path.name)
                continue
            doc = parse_funsd(raw)
        except TreeFormKitError as exc:
            print(f"{path}: error: {exc}")
            failed = True
            continue
        issues = [*doc.parse_issues, *validate(doc)]
        for issue in issues:
            if issue.severity == "error" or not args.quiet:
                print(f"{path}: {issue}")
        failed = failed or any(i.severity == "error" for i in issues)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_convert(args, config: dict) -> int:
    raw = _read(Path(args.input))
    try:
        doc = parse_funsd(raw)
    except TreeFormKitError as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    if args.to == "aggregated":
        data = serialize_aggregated(build_aggregated_tree(doc))
    else:
        issues: list = []
        tree = convert(doc, conversion_config(config), issues)
        for issue in issues:
            log.info("%s: %s", args.input, issue)
        data = serialize_treeform(tree, concise=args.to == "treeform-concise")
    _write(args.output, data + b"\n")
    return EXIT_OK


def _empty_like(loaded: Loaded) -> Loaded:
    return Loaded(
        make_document([], []) if loaded.funsd is not None else None,
        TreeFormDoc(()),
    )


def _score(task):
    doc_id, pred, gt, job, cconf = task
    return score_document(
        doc_id,
        pred.funsd,
        gt.funsd,
        job.metrics,
        job.alignment_threshold,
        pred_treeform=pred.treeform,
        gt_treeform=gt.treeform,
        conversion_config=cconf,
    )


def cmd_eval(args, config: dict) -> int:
    metrics = _pick(args, config, "metrics", list(METRICS))
    if isinstance(metrics, str):
        metrics = [m.strip() for m in metrics.split(",") if m.strip()]
    job = EvalJob(
        Path(args.gt_dir),
        Path(args.pred_dir),
        tuple(metrics),
        _pick(args, config, "aggregation", "median"),
        _pick(args, config, "threshold", DEFAULT_THRESHOLD, "alignment_threshold"),
        _pick(args, config, "format", "json"),
        _pick(args, config, "jobs", 1),
    )
    cconf = conversion_config(config)
    gt, pred = load_dir(job.gt_dir), load_dir(job.pred_dir)
    common = sorted(gt.keys() & pred.keys())
    if not common:
        log.error("no prediction shares a stem with the ground truth")
        return EXIT_FAIL
    missing = sorted(gt.keys() - pred.keys())
    for s in missing:
        log.warning("missing prediction for %s; scored as an empty prediction", s)
    for s in sorted(pred.keys() - gt.keys()):
        log.warning("prediction %s has no ground truth; ignored", s)

    tasks = [
        (s, pred[s] if s in pred else _empty_like(gt[s]), gt[s], job, cconf)
        for s in sorted(gt)
    ]
    if job.jobs > 1:
        with ProcessPoolExecutor(max_workers=job.jobs) as pool:
            per_doc = list(pool.map(_score, tasks))
    else:
        per_doc = [_score(t) for t in tasks]
    report = aggregate_report(per_doc, job.aggregation, job.metrics, missing)
    sys.stdout.write(serialize_report(report, job.format))
    return EXIT_OK


def cmd_gen(args, config: dict) -> int:
    from .synth import SynthConfig, generate_corpus

    names = {f.name for f in fields(SynthConfig)} - {"seed"}
    settings = {}
    for k, v in config.items():
        if k in names:
            settings[k] = tuple(v) if isinstance(v, list) else v
    try:
        synth = SynthConfig(seed=args.seed, **settings)
    except TreeFormKitError as exc:
        raise UsageError(f"config: {exc}") from None
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    out = Path(args.out)
    width = max(4, len(str(max(args.count - 1, 0))))
    for i, (tree, doc) in enumerate(generate_corpus(synth, args.count)):
        name = f"{i:0{width}d}"
        _write(str(out / f"{name}.funsd.json"), serialize_funsd(doc) + b"\n")
        _write(str(out / f"{name}.treeform.json"), serialize_treeform(tree) + b"\n")
    log.info("wrote %d forms to %s", args.count, out)
    return EXIT_OK


def cmd_postprocess(args, config: dict) -> int:
    from .postprocess import dedup_leaves, dedup_long_entities, repair_treeform

    similarity = _pick(args, config, "similarity", 0.6)
    min_len = _pick(args, config, "min_entity_len", 20)
    literal = args.literal_distance_gate or bool(config.get("literal_distance_gate", False))
    if not 0 < similarity < 1:
        raise UsageError("--similarity must be in (0, 1)")
    if min_len < 1:
        raise UsageError("--min-entity-len must be at least 1")
    raw = _read(Path(args.input))
    try:
        data = load_json(raw)
        if is_funsd(data):
            doc, report = dedup_long_entities(parse_funsd(raw), min_len, similarity, literal)
            out = serialize_funsd(doc)
        else:
            tree, report = repair_treeform(data)
            tree, more = dedup_leaves(tree, similarity, literal)
            report = report.merge(more)
            out = dumps(treeform_to_json(tree))
    except TreeFormKitError as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    for note in report.notes:
        log.info("%s: %s", args.input, note)
    _write(args.out, out + b"\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treeformkit", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file with conversion and evaluation settings")
    parser.add_argument("--quiet", action="store_true", help="only print errors")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check FUNSD or TreeForm files")
    p.add_argument("path", help="file or directory of *.json files")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert a FUNSD file")
    p.add_argument("input")
    p.add_argument("output", nargs="?", default="-", help="output file (default: stdout)")
    p.add_argument("--to", choices=("treeform", "treeform-concise", "aggregated"), default="treeform")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--gt-dir", required=True)
    p.add_argument("--pred-dir", required=True)
    p.add_argument("--metrics", help=f"comma-separated subset of {','.join(METRICS)}")
    p.add_argument("--aggregation", choices=AGGREGATIONS)
    p.add_argument("--threshold", type=float, help=f"alignment threshold (default {DEFAULT_THRESHOLD})")
    p.add_argument("--format", choices=("json", "tsv"))
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="generate a synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("postprocess", help="repair and deduplicate model output")
    p.add_argument("input")
    p.add_argument("--out", default="-")
    p.add_argument("--similarity", type=float, help="merge threshold (default 0.6)")
    p.add_argument("--min-entity-len", type=int, help="length gate for FUNSD entity dedup (default 20)")
    p.add_argument(
        "--literal-distance-gate",
        action="store_true",
        help="merge when the distance, not the similarity, exceeds the threshold",
    )
    p.set_defaults(func=cmd_postprocess)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args, load_config(args.config))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
