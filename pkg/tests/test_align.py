from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from treeformkit.align import (
    Alignment,
    distance_matrix,
    greedy_align,
    levenshtein,
    naa,
    normalized_levenshtein,
)

from oracles import lev_recursive

short = st.text(alphabet="abc", max_size=6)


@pytest.mark.parametrize(
    "a, b, expected",
    [("FROM", "FROM", 0), ("", "abc", 3), ("FROM", "FORM", 2), ("kitten", "sitting", 3)],
)
def test_levenshtein_examples(a, b, expected):
    assert levenshtein(a, b) == expected == lev_recursive(a, b)


def test_normalized_examples():
    assert normalized_levenshtein("Kevin Narko", "") == 1.0
    assert normalized_levenshtein("x", "x") == 0.0
    assert normalized_levenshtein("", "") == 0.0
    assert normalized_levenshtein("FROM", "FORM") == 0.5
    assert normalized_levenshtein("Kevin Narko", "Kevin Nark") == 1 / 11


def test_distance_matrix_matches_pairwise():
    pred, gt = ["FORM", "Kevin Nark", ""], ["FROM", "Kevin Narko"]
    m = distance_matrix(pred, gt)
    for i, p in enumerate(pred):
        for j, g in enumerate(gt):
            assert m[i][j] == normalized_levenshtein(p, g)


def test_exact_matches_align():
    al = greedy_align(["FROM", "Kevin Narko"], ["FROM", "Kevin Narko"])
    assert list(al.pairs) == [(0, 0, 0.0), (1, 1, 0.0)]
    assert list(al.unaligned_pred) == [] and list(al.unaligned_gt) == []


def test_threshold_exclusion():
    al = greedy_align(["zzzzzz"], ["FROM"])
    assert list(al.pairs) == []
    assert list(al.unaligned_pred) == [0] and list(al.unaligned_gt) == [0]


def test_threshold_example():
    # distances: FORM/FROM 0.5 (excluded), Kevin Nark/Kevin Narko 1/11
    al = greedy_align(["FORM", "Kevin Nark"], ["FROM", "Kevin Narko"], 0.4)
    assert list(al.pairs) == [(1, 1, 1 / 11)]
    assert list(al.unaligned_pred) == [0] and list(al.unaligned_gt) == [0]
    assert naa(al) == pytest.approx((1 / 11 + 2) / 3, abs=0)


def test_ties_prefer_smaller_gt_then_pred_index():
    al = greedy_align(["ab", "ab"], ["ab", "ab"])
    assert [(i, j) for i, j, _ in al.pairs] == [(0, 0), (1, 1)]
    al = greedy_align(["ax"], ["ay", "az"], 0.6)
    assert [(i, j) for i, j, _ in al.pairs] == [(0, 0)]


def test_naa_examples():
    assert naa(greedy_align(["a", "b"], ["a", "b"])) == 0.0
    assert naa(greedy_align([], ["x", "y", "z"])) == 1.0
    assert naa(Alignment([(0, 0, 0.2)], [], [1], 0.4)) == pytest.approx(0.6)
    assert naa(greedy_align([], [])) == 0.0


@given(short, short)
def test_matches_oracle(a, b):
    assert levenshtein(a, b) == lev_recursive(a, b)


@given(short, short, short)
def test_metric_axioms(a, b, c):
    assert levenshtein(a, b) == levenshtein(b, a)
    assert (levenshtein(a, b) == 0) == (a == b)
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


@given(st.text(min_size=1))
def test_nonempty_vs_empty_is_one(a):
    assert normalized_levenshtein(a, "") == 1.0


@given(st.lists(st.text(max_size=5), unique=True, max_size=8), st.floats(0.01, 1.0))
def test_self_alignment_is_identity(xs, theta):
    al = greedy_align(xs, xs, theta)
    assert sorted(al.pairs) == [(i, i, 0.0) for i in range(len(xs))]


@given(st.lists(short, max_size=6), st.lists(short, max_size=6), st.floats(0.05, 1.0))
def test_alignment_partitions_indices(pred, gt, theta):
    al = greedy_align(pred, gt, theta)
    used_p = [i for i, _, _ in al.pairs] + list(al.unaligned_pred)
    used_g = [j for _, j, _ in al.pairs] + list(al.unaligned_gt)
    assert sorted(used_p) == list(range(len(pred)))
    assert sorted(used_g) == list(range(len(gt)))
    assert all(d < theta for _, _, d in al.pairs)


@given(st.lists(short, max_size=6), st.lists(short, max_size=6), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_lower_threshold_never_aligns_more(pred, gt, t1, t2):
    lo, hi = sorted((t1, t2))
    assert len(greedy_align(pred, gt, lo).pairs) <= len(greedy_align(pred, gt, hi).pairs)


@given(st.lists(short, max_size=5), st.lists(short, max_size=5), short, st.booleans())
def test_naa_monotone_in_unaligned_nodes(pred, gt, extra, to_pred):
    base = greedy_align(pred, gt)
    # a node that cannot align anywhere: longer than everything and disjoint alphabet
    junk = "z" * (len(extra) + 7)
    assume(all(normalized_levenshtein(junk, s) >= 0.4 for s in pred + gt))
    grown = greedy_align(pred + [junk], gt) if to_pred else greedy_align(pred, gt + [junk])
    assert naa(grown) >= naa(base)


def test_normalized_is_exact_fraction():
    d = normalized_levenshtein("Kevin Narko", "Kevin Nark")
    assert Fraction(d).limit_denominator(100) == Fraction(1, 11)
