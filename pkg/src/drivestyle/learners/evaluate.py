"""Repeated random 70/30 hold-out evaluation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import DegenerateDataset
from .metrics import confusion, precision, roc_auc, true_positive_rate
from .mlp import train_mlp
from .rbf import train_rbf
from .svm import train_svm

log = logging.getLogger(__name__)

TRAINERS = {"mlp": train_mlp, "rbf": train_rbf, "svm": train_svm}
MAX_REDRAWS = 1000


@dataclass(frozen=True)
class SplitPlan:
    train_fraction: float = 0.70
    repeats: int = 100
    master_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    def rng(self, repeat: int) -> np.random.Generator:
        return np.random.default_rng([self.master_seed, repeat])

    def split(self, y, repeat: int) -> tuple[np.ndarray, np.ndarray, int]:
        """Train/test index arrays for one repeat plus the number of re-draws.

        A draw whose train or test part misses a class is discarded and drawn
        again from the same stream.
        """
        y = np.asarray(y)
        n = y.shape[0]
        n_train = int(round(self.train_fraction * n))
        if not 2 <= n_train <= n - 2:
            raise DegenerateDataset(f"cannot split {n} points {self.train_fraction:.0%}/rest")
        rng = self.rng(repeat)
        for redraws in range(MAX_REDRAWS):
            perm = rng.permutation(n)
            train, test = np.sort(perm[:n_train]), np.sort(perm[n_train:])
            if np.unique(y[train]).size == 2 and np.unique(y[test]).size == 2:
                return train, test, redraws
        raise DegenerateDataset("could not draw a split with both classes on each side")


@dataclass(frozen=True)
class ModelSpec:
    algorithm: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.algorithm not in TRAINERS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {sorted(TRAINERS)}")

    def fit(self, x, y, seed: int):
        return TRAINERS[self.algorithm](x, y, seed=seed, **self.params)

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "params": dict(self.params)}


@dataclass(frozen=True)
class RepeatResult:
    tpr: float
    precision: float
    auc: float
    tp: int
    fp: int
    tn: int
    fn: int
    redraws: int = 0
    converged: bool = True


@dataclass(frozen=True)
class MetricsReport:
    tpr: float
    precision: float
    auc: float
    per_repeat: tuple[RepeatResult, ...]

    @classmethod
    def from_repeats(cls, repeats) -> "MetricsReport":
        repeats = tuple(repeats)
        return cls(tpr=float(np.mean([r.tpr for r in repeats])),
                   precision=float(np.mean([r.precision for r in repeats])),
                   auc=float(np.mean([r.auc for r in repeats])),
                   per_repeat=repeats)

    def to_dict(self, with_repeats: bool = True) -> dict:
        d = {"tpr": self.tpr, "precision": self.precision, "auc": self.auc,
             "repeats": len(self.per_repeat)}
        if with_repeats:
            d["per_repeat"] = [r.__dict__.copy() for r in self.per_repeat]
        return d


def score_split(model, x_test, y_test, threshold: float = 0.5, redraws: int = 0) -> RepeatResult:
    scores = model.score(x_test)
    c = confusion(y_test, scores > threshold)
    return RepeatResult(tpr=true_positive_rate(c), precision=precision(c), auc=roc_auc(scores, y_test),
                        tp=c.tp, fp=c.fp, tn=c.tn, fn=c.fn, redraws=redraws,
                        converged=bool(getattr(model, "converged", True)))


def evaluate(x, y, spec: ModelSpec, plan: SplitPlan = SplitPlan()) -> MetricsReport:
    """Train on 70%, score the held-out 30%, ``plan.repeats`` times."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y).astype(np.int64)
    if np.unique(y).size < 2:
        raise DegenerateDataset("dataset must contain both classes")
    results = []
    for r in range(plan.repeats):
        train, test, redraws = plan.split(y, r)
        if redraws:
            log.info("repeat %d: re-drew split %d time(s) to keep both classes", r, redraws)
        model_seed = _model_seed(plan, r)
        model = spec.fit(x[train], y[train], seed=model_seed)
        results.append(score_split(model, x[test], y[test], redraws=redraws))
    return MetricsReport.from_repeats(results)


def _model_seed(plan: SplitPlan, repeat: int) -> int:
    # separate stream from the split so model randomness never shifts the split
    return int(np.random.default_rng([plan.master_seed, repeat, 1]).integers(2**31 - 1))
