"""End-to-end experiments: features -> (selection) -> repeated hold-out evaluation.

An :class:`ExperimentConfig` is a plain JSON document. Running it writes
into ``output_dir``:

``config.json``      the fully resolved config (re-running it reproduces the run)
``metrics.json``     metrics, selected features and weights; byte-stable
``table.txt``        aligned text table in the hidden-neuron / TPR / precision / AUC layout
``provenance.json``  config hash, seed, library versions, backend and a timestamp
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
import hashlib
import json
import logging
import os
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from ._accel import backend
from .features import FEATURE_NAMES, feature_matrix, read_feature_csv
from .gaussfit import GAUSS_FEATURE_NAMES, fit_two_gaussians
from .learners.evaluate import MetricsReport, ModelSpec, SplitPlan, evaluate
from .selection import DEFAULT_THRESHOLD, LabeledDataset, nca_fit, select_or_all
from .sensor import Label, SensorSegment, load_segments
from .synth import generate_corpus

log = logging.getLogger(__name__)

FEATURE_SOURCES = ("wavelet22", "gaussian6")

# hyper-parameter swept for each algorithm when the config gives no sweep
DEFAULT_SWEEPS = {"mlp": ("hidden", [2, 3, 4, 5, 6]), "rbf": ("k", [2, 4, 6]), "svm": (None, [None])}

RBF_ROW_LABELS = {2: "2 (one neuron for each class)", 4: "4 (two neurons for each class)",
                  6: "6 (three neurons for each class)"}


@dataclass
class SelectionConfig:
    enabled: bool = True
    threshold: float = DEFAULT_THRESHOLD
    lam: float | None = None
    sigma: float = 1.0
    lr: float = 1.0
    max_iters: int = 100


@dataclass
class ClassifierConfig:
    algorithm: str = "mlp"
    params: dict[str, Any] = field(default_factory=dict)
    sweep_param: str | None = None
    sweep_values: list[Any] | None = None

    def sweep(self) -> tuple[str | None, list[Any]]:
        if self.sweep_values is not None:
            return self.sweep_param, list(self.sweep_values)
        return DEFAULT_SWEEPS[self.algorithm][0], list(DEFAULT_SWEEPS[self.algorithm][1])


@dataclass
class ExperimentConfig:
    kind: str = "turn"
    segments: str | None = None
    features: str | None = None
    synth_n_per_class: int | None = None
    feature_source: str = "wavelet22"
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    split: SplitPlan = field(default_factory=SplitPlan)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    output_dir: str = "out"
    master_seed: int = 0

    def validate(self) -> None:
        sources = [s for s in (self.segments, self.features, self.synth_n_per_class) if s is not None]
        if len(sources) != 1:
            raise ValueError("give exactly one of segments, features or synth_n_per_class")
        if self.feature_source not in FEATURE_SOURCES:
            raise ValueError(f"feature_source must be one of {FEATURE_SOURCES}")
        if self.features is not None and self.feature_source != "wavelet22":
            raise ValueError("a feature CSV input already fixes the features; use segments for gaussian6")
        ModelSpec(self.classifier.algorithm)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        clf = ClassifierConfig(**d.pop("classifier", {}))
        split = SplitPlan(**d.pop("split", {}))
        sel = SelectionConfig(**d.pop("selection", {}))
        return cls(classifier=clf, split=split, selection=sel, **d)

    def config_hash(self) -> str:
        """Hash of everything that affects results (the output directory does not)."""
        doc = self.to_dict()
        doc.pop("output_dir")
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class ExperimentResult:
    rows: list[tuple[Any, MetricsReport]]
    sweep_param: str | None
    feature_names: list[str]
    selected: list[int]
    weights: list[float] | None
    flags: list[str]

    @property
    def converged(self) -> bool:
        return not self.flags


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def save_json(path: str | os.PathLike, doc: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def labels_to_int(labels) -> np.ndarray:
    values = [Label(str(getattr(l, "value", l)).lower()) for l in labels]
    if any(v is Label.UNLABELED for v in values):
        raise ValueError("unlabeled segments cannot be used for evaluation")
    return np.array([v is Label.DANGEROUS for v in values], dtype=np.int64)


def gaussian_feature_matrix(segments: list[SensorSegment]) -> tuple[np.ndarray, int]:
    """Six fit parameters per segment, centers relative to segment start.

    Returns the matrix and the number of fits that did not converge.
    """
    rows, failed = [], 0
    for seg in segments:
        pair = fit_two_gaussians(seg.t - seg.t[0], seg.gz)
        failed += not pair.converged
        rows.append(pair.params)
    return np.vstack(rows), failed


def build_features(cfg: ExperimentConfig) -> tuple[np.ndarray, np.ndarray, list[str], list[str]]:
    if cfg.features is not None:
        _, labels, x = read_feature_csv(cfg.features)
        return x, labels_to_int(labels), list(FEATURE_NAMES[: x.shape[1]]), []
    if cfg.segments is not None:
        segments = [s for s in load_segments(cfg.segments) if s.kind.value == cfg.kind]
        if not segments:
            raise ValueError(f"no {cfg.kind} segments in {cfg.segments}")
    else:
        segments = generate_corpus(cfg.kind, cfg.synth_n_per_class, cfg.master_seed)
    y = labels_to_int([s.label for s in segments])
    flags = []
    if cfg.feature_source == "gaussian6":
        x, failed = gaussian_feature_matrix(segments)
        if failed:
            flags.append(f"gaussfit: {failed} fit(s) did not converge")
        return x, y, list(GAUSS_FEATURE_NAMES), flags
    return feature_matrix(segments), y, list(FEATURE_NAMES), flags


def run(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute the experiment without writing anything."""
    cfg.validate()
    x, y, names, flags = build_features(cfg)
    selected = list(range(x.shape[1]))
    weights = None
    if cfg.selection.enabled:
        s = cfg.selection
        fw = nca_fit(LabeledDataset.from_raw(x, y), lam=s.lam, sigma=s.sigma, lr=s.lr,
                     max_iters=s.max_iters, seed=cfg.master_seed)
        if not fw.converged:
            flags.append(f"selection: no convergence in {s.max_iters} iterations")
        selected = select_or_all(fw, s.threshold)
        weights = [float(v) for v in fw.w]
    xs = x[:, selected]
    plan = cfg.split
    param, values = cfg.classifier.sweep()
    rows = []
    for value in values:
        params = dict(cfg.classifier.params)
        if param is not None:
            params[param] = value
        report = evaluate(xs, y, ModelSpec(cfg.classifier.algorithm, params), plan)
        bad = sum(not r.converged for r in report.per_repeat)
        if bad:
            flags.append(f"{cfg.classifier.algorithm} {param}={value}: {bad} repeat(s) not converged")
        rows.append((value, report))
    return ExperimentResult(rows=rows, sweep_param=param, feature_names=names, selected=selected,
                            weights=weights, flags=flags)


def metrics_document(cfg: ExperimentConfig, result: ExperimentResult) -> dict:
    return {
        "config_hash": cfg.config_hash(),
        "kind": cfg.kind,
        "feature_source": cfg.feature_source,
        "algorithm": cfg.classifier.algorithm,
        "sweep_param": result.sweep_param,
        "selected_features": [i + 1 for i in result.selected],
        "selected_names": [result.feature_names[i] for i in result.selected],
        "weights": result.weights,
        "flags": list(result.flags),
        "rows": [dict(value=value, **report.to_dict()) for value, report in result.rows],
    }


def row_label(algorithm: str, value) -> str:
    if algorithm == "rbf" and value in RBF_ROW_LABELS:
        return RBF_ROW_LABELS[value]
    return "-" if value is None else str(value)


def format_table(rows: list[tuple[str, float, float, float]], first_header: str,
                 title: str | None = None) -> str:
    header = (first_header, "True-positive rate", "Precision", "AUC")
    cells = [header] + [(label, f"{tpr:.4f}", f"{prec:.4f}", f"{auc:.4f}") for label, tpr, prec, auc in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(4)]
    lines = [title] if title else []
    for k, r in enumerate(cells):
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths))))
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def result_table(cfg: ExperimentConfig, result: ExperimentResult) -> str:
    alg = cfg.classifier.algorithm
    title = f"{alg.upper()} results on {cfg.kind.replace('_', '-')} maneuvers ({cfg.feature_source})"
    first = "Number of hidden neurons" if alg in ("mlp", "rbf") else "Setting"
    rows = [(row_label(alg, v), r.tpr, r.precision, r.auc) for v, r in result.rows]
    return format_table(rows, first, title)


def comparison_table(docs: list[dict]) -> str:
    """Algorithm x feature-family layout from several metrics documents (best row of each)."""
    header = ("Algorithm", "Considered features", "True-positive rate", "Precision", "AUC")
    cells = [header]
    for doc in docs:
        best = max(doc["rows"], key=lambda r: (r["auc"], r["tpr"], r["precision"]))
        family = {"wavelet22": "Wavelet features", "gaussian6": "Gaussian function parameters"}
        cells.append((doc["algorithm"].upper(), family.get(doc["feature_source"], doc["feature_source"]),
                      f"{best['tpr']:.4f}", f"{best['precision']:.4f}", f"{best['auc']:.4f}"))
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for k, r in enumerate(cells):
        lines.append("  ".join(c.ljust(w) if i < 2 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths))))
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def provenance(cfg: ExperimentConfig) -> dict:
    import scipy

    return {
        "config_hash": cfg.config_hash(),
        "master_seed": cfg.master_seed,
        "package_version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
        "backend": backend(),
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run ``cfg`` and write config, metrics, table and provenance files."""
    result = run(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_json(out / "config.json", cfg.to_dict())
    save_json(out / "metrics.json", metrics_document(cfg, result))
    (out / "table.txt").write_text(result_table(cfg, result), encoding="utf-8")
    save_json(out / "provenance.json", provenance(cfg))
    for flag in result.flags:
        log.warning("%s", flag)
    return result
