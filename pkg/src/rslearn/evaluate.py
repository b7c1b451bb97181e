"""
Skeleton and separating-set scores.
"""

import logging
from dataclasses import asdict, dataclass

from .errors import SizeMismatchError
from .graph import d_separated

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SkeletonReport:
    """Edge-level comparison of a learned skeleton against the truth."""

    f1: float
    precision: float
    recall: float
    shd: int
    extra_edges: int
    missing_edges: int

    def as_dict(self):
        return asdict(self)


def score_skeleton(truth, learned):
    """
    Compare two skeletons edge by edge.

    Parameters
    ----------
    truth, learned : Skeleton
        Skeletons over the same vertex count.

    Returns
    -------
    SkeletonReport
        Precision is 1 when *learned* has no edges and recall is 1 when
        *truth* has none; f1 is 1 when both are empty and 0 when exactly one
        is. The structural Hamming distance counts extra plus missing edges.

    Raises
    ------
    SizeMismatchError
        If the vertex counts differ.
    """
    if truth.n != learned.n:
        raise SizeMismatchError(
            f"Cannot compare skeletons over {truth.n} and {learned.n} vertices."
        )
    true_edges = truth.edges
    found = learned.edges
    tp = len(true_edges & found)
    extra = len(found - true_edges)
    missing = len(true_edges - found)

    precision = tp / len(found) if found else 1.0
    recall = tp / len(true_edges) if true_edges else 1.0
    if not found and not true_edges:
        f1 = 1.0
    elif not found or not true_edges:
        f1 = 0.0
    elif precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
    return SkeletonReport(
        f1=f1,
        precision=precision,
        recall=recall,
        shd=extra + missing,
        extra_edges=extra,
        missing_edges=missing,
    )


def score_sepsets(truth, sepsets):
    """
    Count recorded separating sets that fail to d-separate in *truth*.

    Parameters
    ----------
    truth : Dag
        Ground-truth graph.
    sepsets : SepSetMap
        Learned separating sets.

    Returns
    -------
    tuple of int
        ``(total, mistakes)``.
    """
    total = 0
    mistakes = 0
    for (x, y), s in sepsets.items():
        total += 1
        if not d_separated(truth, x, y, s):
            mistakes += 1
            logger.debug(f"Separating set {sorted(s)} does not separate {x} and {y}")
    return total, mistakes


def alss(total, mistakes):
    """Fraction of correct separating sets; 1.0 when none were recorded."""
    if total == 0:
        return 1.0
    return 1.0 - mistakes / total
