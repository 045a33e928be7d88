"""Binary classification metrics. The dangerous class (label 1) is positive."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.stats import rankdata


class Confusion(NamedTuple):
    tp: int
    fp: int
    tn: int
    fn: int


def confusion(y_true, y_pred) -> Confusion:
    y_true = np.asarray(y_true).astype(bool)
    y_pred = np.asarray(y_pred).astype(bool)
    return Confusion(
        tp=int(np.sum(y_true & y_pred)),
        fp=int(np.sum(~y_true & y_pred)),
        tn=int(np.sum(~y_true & ~y_pred)),
        fn=int(np.sum(y_true & ~y_pred)),
    )


def true_positive_rate(c: Confusion) -> float:
    return c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0


def precision(c: Confusion) -> float:
    # no positive predictions: report 0 rather than NaN
    return c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0


def mann_whitney_u(scores, labels) -> float:
    """U statistic of the positive scores against the negative ones.

    Ties get midranks, so each tied positive/negative pair counts 1/2. The
    result is a multiple of 0.5 and exact in double precision.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    ranks = rankdata(scores, method="average")
    return float(ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0)


def roc_auc(scores, labels) -> float:
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes")
    return mann_whitney_u(scores, labels) / (n_pos * n_neg)
