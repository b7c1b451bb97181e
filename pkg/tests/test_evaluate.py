import pytest

from rslearn.errors import SizeMismatchError
from rslearn.evaluate import alss, score_sepsets, score_skeleton
from rslearn.graph import Skeleton
from rslearn.rsl import SepSetMap


def test_perfect_match(diamond_left):
    report = score_skeleton(diamond_left.skeleton(), diamond_left.skeleton())
    assert report.f1 == 1.0
    assert report.shd == 0


def test_extra_and_missing_edges():
    truth = Skeleton(4, frozenset({(0, 1), (1, 2), (2, 3)}))
    learned = Skeleton(4, frozenset({(0, 1), (1, 2), (0, 3)}))
    report = score_skeleton(truth, learned)
    assert report.extra_edges == 1
    assert report.missing_edges == 1
    assert report.shd == 2
    assert report.precision == pytest.approx(2 / 3)
    assert report.recall == pytest.approx(2 / 3)
    assert report.f1 == pytest.approx(2 / 3)


@pytest.mark.parametrize(
    "truth_edges, learned_edges, expected",
    [
        (set(), set(), (1.0, 1.0, 1.0)),
        ({(0, 1)}, set(), (0.0, 1.0, 0.0)),
        (set(), {(0, 1)}, (0.0, 0.0, 1.0)),
    ],
)
def test_empty_edge_conventions(truth_edges, learned_edges, expected):
    report = score_skeleton(Skeleton(3, frozenset(truth_edges)), Skeleton(3, frozenset(learned_edges)))
    assert (report.f1, report.precision, report.recall) == expected


def test_size_mismatch():
    with pytest.raises(SizeMismatchError):
        score_skeleton(Skeleton(3), Skeleton(4))


def test_report_as_dict_keys():
    report = score_skeleton(Skeleton(2), Skeleton(2))
    assert set(report.as_dict()) == {"f1", "precision", "recall", "shd", "extra_edges", "missing_edges"}


def test_score_sepsets(chain3, collider3):
    good = SepSetMap({(0, 2): {1}})
    assert score_sepsets(chain3, good) == (1, 0)
    bad = SepSetMap({(0, 1): {2}})
    assert score_sepsets(collider3, bad) == (1, 1)
    assert score_sepsets(chain3, SepSetMap()) == (0, 0)


def test_alss():
    assert alss(0, 0) == 1.0
    assert alss(4, 1) == 0.75


def test_swapping_truth_and_learned_swaps_precision_and_recall():
    a = Skeleton(5, frozenset({(0, 1), (1, 2), (2, 3)}))
    b = Skeleton(5, frozenset({(0, 1), (3, 4)}))
    forward = score_skeleton(a, b)
    backward = score_skeleton(b, a)
    assert forward.precision == backward.recall
    assert forward.recall == backward.precision
    assert forward.shd == backward.shd


def test_disjoint_edge_sets_score_zero():
    report = score_skeleton(Skeleton(4, frozenset({(0, 1)})), Skeleton(4, frozenset({(2, 3)})))
    assert report.f1 == 0.0
    assert report.shd == 2
