"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import json
import random
import statistics

import pytest
from hypothesis import given, settings

from treeformkit.aggregate import ROOT, AggregatedTree, build_aggregated_tree, parse_aggregated, serialize_aggregated
from treeformkit.align import Alignment, greedy_align, levenshtein, naa
from treeformkit.annotation import EntityLabel, make_document, parse_funsd, serialize_funsd
from treeformkit.metrics import DocumentScores, PRF, aggregate, aggregate_report, score_document, tree_f1
from treeformkit.postprocess import dedup_leaves, repair_treeform
from treeformkit.synth import NoiseSpec, SynthConfig, generate, perturb
from treeformkit.ted import LabeledTree, embed, ganted, ganted_trees, permute_siblings, tree_edit_distance, tree_size
from treeformkit.treeform import (
    TreeFormDoc,
    convert,
    doc_violations,
    dumps,
    header,
    parse_treeform,
    question,
    serialize_treeform,
    treeform_to_json,
    to_concise,
)

from conftest import json_values, load_fixture, normalized, treeform_docs
from oracles import all_strings, labels_of, lev_recursive, lev_table, shapes, ted_oracle_table

pytestmark = pytest.mark.acceptance

H, Q, A = EntityLabel.HEADER, EntityLabel.QUESTION, EntityLabel.ANSWER


def canonical_bytes(value):
    return dumps(value, sort_keys=True)


# ---------------------------------------------------------------------------
# 1


def test_criterion_01_example_goldens(criterion, example_bytes):
    with criterion(1, "worked example goldens (aggregated, non-concise, concise)", budget=1.0):
        doc = parse_funsd(example_bytes)
        tree = convert(doc)
        outputs = {
            "example_aggregated.json": json.loads(serialize_aggregated(build_aggregated_tree(doc))),
            "example_treeform.json": json.loads(serialize_treeform(tree)),
            "example_concise.json": json.loads(serialize_treeform(tree, concise=True)),
        }
        for name, value in outputs.items():
            assert canonical_bytes(value) == canonical_bytes(load_fixture(name)), name


# ---------------------------------------------------------------------------
# 2


def test_criterion_02_levenshtein_oracle(criterion):
    with criterion(2, "Levenshtein vs recursive oracle", budget=30):
        strings = all_strings("abc", 6)
        table = lev_table(strings)
        for i, a in enumerate(strings):
            row = table[i]
            for j, b in enumerate(strings):
                assert levenshtein(a, b) == row[j], (a, b)

        rng = random.Random(2)
        pools = ["abc", "äöü", "日本語", "🙂🙃", "́e", "xyz​"]
        for _ in range(10_000):
            alphabet = "".join(rng.sample(pools, 2))
            a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
            b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
            assert levenshtein(a, b) == lev_recursive(a, b), (a, b)


# ---------------------------------------------------------------------------
# 3


def _build(shape, labels):
    it = iter(labels)

    def go(s):
        label = next(it)
        return LabeledTree(label, tuple(go(k) for k in s))

    return go(shape)


def test_criterion_03_ted_oracle(criterion):
    label_set = ["ab", "b"]

    def rename(x, y):
        return 0.0 if x == y else lev_recursive(x, y) / max(len(x), len(y))

    with criterion(3, "TED vs exhaustive mapping oracle, <= 5 nodes, 2 labels", budget=120):
        all_shapes = [s for n in range(1, 6) for s in shapes(n)]
        trees = {
            s: [_build(s, ls) for ls in itertools.product(label_set, repeat=labels_of(s))]
            for s in all_shapes
        }
        checked = 0
        for sa in all_shapes:
            for sb in all_shapes:
                table = ted_oracle_table(sa, sb, label_set, rename)
                for i, x in enumerate(trees[sa]):
                    for j, y in enumerate(trees[sb]):
                        assert abs(tree_edit_distance(x, y) - table[i, j]) <= 1e-9, (x, y)
                        checked += 1
        assert checked == sum(len(v) for v in trees.values()) ** 2


# ---------------------------------------------------------------------------
# 4


def _tree(n, edges):
    return AggregatedTree(tuple(f"n{i}" for i in range(n)), frozenset(edges))


GOLD = {(ROOT, 0, H), (0, 1, Q), (1, 2, A), (0, 3, Q), (3, 4, A)}

# (pred edges, gt edges, precision, recall), values worked by hand
TREE_F1_CASES = [
    (GOLD, GOLD, 1.0, 1.0),
    (set(), GOLD, 0.0, 0.0),
    (GOLD, set(), 0.0, 0.0),
    (GOLD - {(3, 4, A)}, GOLD, 1.0, 4 / 5),
    (GOLD | {(ROOT, 4, A)}, GOLD, 5 / 6, 1.0),
    ({(ROOT, 0, Q), (0, 1, Q)}, GOLD, 1 / 2, 1 / 5),
    ({(ROOT, 0, H), (0, 1, H), (1, 2, Q)}, GOLD, 1 / 3, 1 / 5),
    ({(ROOT, 0, H), (ROOT, 1, Q), (1, 2, A), (ROOT, 3, Q), (3, 4, A)}, GOLD, 3 / 5, 3 / 5),
    ({(ROOT, 1, Q), (1, 2, A)}, {(ROOT, 1, Q), (1, 2, A)}, 1.0, 1.0),
    ({(2, 1, A)}, {(1, 2, A)}, 0.0, 0.0),
    ({(ROOT, 0, H), (0, 1, Q)}, {(ROOT, 0, H), (0, 2, Q)}, 1 / 2, 1 / 2),
    # equal punishment: a ROOT-edge error and a leaf-edge error cost the same
    ({(ROOT, 0, Q), (0, 1, Q), (1, 2, A), (0, 3, Q), (3, 4, A)}, GOLD, 4 / 5, 4 / 5),
    ({(ROOT, 0, H), (0, 1, Q), (1, 2, A), (0, 3, Q), (3, 4, Q)}, GOLD, 4 / 5, 4 / 5),
]


def test_criterion_04_tree_f1_hand_values(criterion):
    with criterion(4, f"tree F1 on {len(TREE_F1_CASES)} hand-computed edge sets"):
        ident = Alignment(tuple((i, i, 0.0) for i in range(5)), (), (), 0.4)
        for pred, gt, p, r in TREE_F1_CASES:
            got = tree_f1(_tree(5, pred), _tree(5, gt), ident)
            assert (got.precision, got.recall) == (p, r), (pred, gt)
            assert got.f1 == (2 * p * r / (p + r) if p + r else 0.0)
        root_err = tree_f1(_tree(5, TREE_F1_CASES[-2][0]), _tree(5, GOLD), ident)
        leaf_err = tree_f1(_tree(5, TREE_F1_CASES[-1][0]), _tree(5, GOLD), ident)
        assert root_err.f1 == leaf_err.f1


# ---------------------------------------------------------------------------
# 5


def test_criterion_05_naa_boundaries(criterion, example_form):
    with criterion(5, "NAA boundaries and threshold exclusion example"):
        assert score_document("e", make_document([]), example_form, ["naa"]).naa == 1.0
        assert score_document("p", example_form, example_form, ["naa"]).naa == 0.0
        assert naa(greedy_align([], ["x", "y"])) == 1.0
        assert naa(greedy_align(["x"], ["x"])) == 0.0

        pred, gt = ["FORM", "Kevin Nark"], ["FROM", "Kevin Narko"]
        assert lev_recursive("FORM", "FROM") / 4 == 0.5
        assert lev_recursive("Kevin Nark", "Kevin Narko") / 11 == 1 / 11
        al = greedy_align(pred, gt)
        assert list(al.pairs) == [(1, 1, 1 / 11)]
        assert (list(al.unaligned_pred), list(al.unaligned_gt)) == ([0], [0])
        assert naa(al) == (1 / 11 + 1 + 1) / 3


# ---------------------------------------------------------------------------
# 6


SIBLING_LABELS = ["a", "b", "c", "d", "ab", "ba", "<header>", "<entry>"]


def _random_tree(rng, label, depth=0):
    """Random tree whose siblings carry pairwise distinct labels."""
    width = 0 if depth >= 3 else rng.randint(0, 4)
    kids = tuple(_random_tree(rng, lab, depth + 1) for lab in rng.sample(SIBLING_LABELS, width))
    return LabeledTree(label, kids)


def twenty_node_gt():
    # 2 + 4 + 4 + 2 + 6 + 2 = 20 nodes once embedded
    return TreeFormDoc((
        header("Form", [
            question("A", "1"),
            question("B", "2"),
            header("Empty"),
            header("Sec", [question("C", "3")]),
            header("Notes"),
        ]),
    ))


def test_criterion_06_ganted_invariances(criterion):
    with criterion(6, "GAnTED invariances on 1000 trees and the 20-node fixture", budget=60):
        rng = random.Random(6)
        for _ in range(1000):
            t = _random_tree(rng, rng.choice(["r", "<question>"]))
            assert ganted_trees(t, t) == 0.0
            assert ganted_trees(permute_siblings(t, rng.shuffle), t) == 0.0

        gt = twenty_node_gt()
        assert tree_size(embed(gt)) == 20
        # three nodes missing: the empty header (2 nodes) and one section title (1 node)
        pred = TreeFormDoc((
            header("Form", [
                question("B", "2"),
                question("A", "1"),
                header("Notes"),
                header(None, [question("C", "3")]),
            ]),
        ))
        assert abs(ganted(pred, gt) - 15.0) <= 1e-9


# ---------------------------------------------------------------------------
# 7


def test_criterion_07_synth_round_trip(criterion):
    with criterion(7, "500 synthetic forms convert back and all serializers round-trip", budget=60):
        for seed in range(500):
            tree, doc = generate(SynthConfig(seed=seed))
            assert convert(doc) == tree, seed
            assert parse_funsd(serialize_funsd(doc)) == doc
            agg = build_aggregated_tree(doc)
            assert parse_aggregated(serialize_aggregated(agg)) == agg
            assert parse_treeform(serialize_treeform(tree)) == tree
            back = parse_treeform(serialize_treeform(tree, concise=True), concise=True)
            assert normalized(back) == normalized(tree)
            assert to_concise(back) == to_concise(tree)


# ---------------------------------------------------------------------------
# 8

PAIRINGS = {
    "link_drop_rate": ("linking_f1", "tree_f1"),
    "label_flip_rate": ("labeling_f1", "tree_f1"),
    "char_edit_rate": ("naa", "ganted"),
}
HIGHER_IS_BETTER = {"labeling_f1", "linking_f1", "tree_f1"}
RATES = (0.0, 0.1, 0.3)


def test_criterion_08_metric_monotonicity(criterion):
    with criterion(8, "noise monotonicity over 100 seeds, >= 95% per pairing", budget=300):
        held: dict = {}
        curves: dict = {}
        for seed in range(100):
            tree, doc = generate(SynthConfig(seed=seed))
            for rate_name, metrics in PAIRINGS.items():
                values = []
                for r in RATES:
                    noisy = perturb_at(doc, rate_name, r, seed)
                    scores = score_document(str(seed), noisy, doc, metrics, gt_treeform=tree)
                    values.append([scores.value(m) for m in metrics])
                for k, m in enumerate(metrics):
                    v = [row[k] if m in HIGHER_IS_BETTER else -row[k] for row in values]
                    curves.setdefault((rate_name, m), []).append(v)
                    held.setdefault((rate_name, m), []).extend(v[i + 1] <= v[i] + 1e-12 for i in range(2))
        for key, ok in held.items():
            assert sum(ok) / len(ok) >= 0.95, key
            means = [statistics.fmean(c[i] for c in curves[key]) for i in range(3)]
            assert means[0] >= means[1] >= means[2], key


def perturb_at(doc, rate_name, rate, seed):
    return perturb(doc, NoiseSpec(seed=seed, **{rate_name: rate}))


# ---------------------------------------------------------------------------
# 9


def test_criterion_09_postprocess_fuzz(criterion):
    @settings(max_examples=10_000, database=None)
    @given(json_values)
    def repaired_is_valid(raw):
        tree, _ = repair_treeform(raw)
        assert doc_violations(tree) == []
        once, _ = dedup_leaves(tree)
        assert dedup_leaves(once)[0] == once

    @settings(max_examples=500, database=None)
    @given(treeform_docs)
    def dedup_idempotent(doc):
        once, _ = dedup_leaves(doc)
        assert dedup_leaves(once)[0] == once
        assert treeform_to_json(once) == treeform_to_json(repair_treeform(treeform_to_json(once))[0])

    with criterion(9, "repair over 10,000 fuzz inputs and dedup idempotence", budget=120):
        repaired_is_valid()
        dedup_idempotent()


# ---------------------------------------------------------------------------
# 10


def test_criterion_10_aggregation(criterion):
    with criterion(10, "corpus aggregation hand values"):
        assert aggregate([3, 1, 2], "median") == 2
        assert aggregate([4, 1, 3, 2], "median") == 2.5  # even count: mean of the middle two
        assert aggregate([0.0, 1.0], "median") == 0.5
        assert aggregate([7], "median") == 7
        assert aggregate([1, 2, 3, 4], "mean") == 2.5
        assert aggregate([1, 2, 6], "mean") == 3
        assert aggregate([0.25, 0.75], "mean") == 0.5

        docs = [
            DocumentScores("a", tree=PRF.from_counts(1, 0, 0), naa=0.0),
            DocumentScores("b", tree=PRF.from_counts(1, 1, 1), naa=0.5),
            DocumentScores("c", tree=PRF.from_counts(0, 1, 1), naa=0.25),
            DocumentScores("d", tree=PRF.from_counts(3, 1, 0), naa=1.0),
        ]
        med = aggregate_report(docs, "median", ["tree_f1", "naa"])
        assert med.corpus == {"tree_f1": (0.5 + 6 / 7) / 2, "naa": 0.375}
        mean = aggregate_report(docs, "mean", ["tree_f1", "naa"])
        assert mean.corpus["naa"] == 0.4375
