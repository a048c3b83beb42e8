"""Experiment driver: resampling grids, cross-validation, and report files.

One experiment runs a set of curve families over a shared stratified fold
assignment:

* ``smote_under``: one curve per over-sampling percent, sweeping the
  under-sampling percents within each curve (synthesis variant configurable);
* ``plain_under``: one curve sweeping under-sampling alone;
* ``replicate``: like smote_under but over-sampling by replication;
* ``priors_sweep``: naive Bayes with the minority prior scaled by each
  multiplier, no resampling;
* ``threshold_sweep``: one model per fold on the raw split, swept over
  decision thresholds.

Resampling happens inside each training fold only and is audited per cell so
synthetic provenance can never reference test rows. Every (family, cell,
fold) triple draws from its own named RNG substream, so cells are independent:
evaluation order cannot change any result. Reports are deterministic files
with no timestamps; the manifest captures config and library versions so a
run can be reproduced byte-for-byte.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .data import ClassLabel, Dataset, stratified_folds
from .errors import ConfigError
from .evaluate import (
    HullVertex,
    RocCurve,
    auc,
    auc_e4,
    build_family_curve,
    convex_hull,
    write_hull_csv,
    write_points_csv,
    write_summary_json,
)
from .model import ClassifierSpec, ExternalClassifier, confusion_from_scores, train
from .resample import (
    PER_ATTRIBUTE,
    VARIANTS,
    WITH_REPLACEMENT,
    apply_plan_detailed,
    audit_batch,
)
from .rng import child_seed

log = logging.getLogger(__name__)

FAMILIES = ("smote_under", "plain_under", "replicate", "priors_sweep", "threshold_sweep")

DEFAULT_OVER = (50, 100, 200, 300, 400, 500)
DEFAULT_UNDER = (
    10, 15, 25, 50, 75, 100, 125, 150, 175, 200,
    300, 400, 500, 600, 700, 800, 1000, 2000,
)
DEFAULT_MULTIPLIERS = (1, 2, 5, 10, 20, 30, 40, 50)
DEFAULT_THRESHOLDS = (
    0.5, 0.45, 0.42, 0.4, 0.35, 0.32, 0.3, 0.27, 0.25,
    0.22, 0.2, 0.17, 0.15, 0.12, 0.1, 0.05, 0.0,
)


@dataclass
class ExperimentConfig:
    families: tuple = ("smote_under", "plain_under")
    over_percents: tuple = DEFAULT_OVER
    under_percents: tuple = DEFAULT_UNDER
    k: int = 5
    n_folds: int = 10
    seed: int = 0
    variant: str = "smote"
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)
    prior_multipliers: tuple = DEFAULT_MULTIPLIERS
    thresholds: tuple = DEFAULT_THRESHOLDS
    gap_mode: str = PER_ATTRIBUTE
    neighbor_mode: str = WITH_REPLACEMENT
    under_basis: str = "pre"
    include_raw_point: bool = True

    def validate(self) -> None:
        if not self.families:
            raise ConfigError("family list is empty")
        unknown = [f for f in self.families if f not in FAMILIES]
        if unknown:
            raise ConfigError(f"unknown families {unknown}; known: {list(FAMILIES)}")
        if len(set(self.families)) != len(self.families):
            raise ConfigError("duplicate families")
        needs_over = {"smote_under", "replicate"} & set(self.families)
        if needs_over and not self.over_percents:
            raise ConfigError("over_percents is empty but an over-sampling family is selected")
        needs_under = {"smote_under", "plain_under", "replicate"} & set(self.families)
        if needs_under and not self.under_percents:
            raise ConfigError("under_percents is empty but an under-sampling family is selected")
        if "priors_sweep" in self.families:
            if not self.prior_multipliers:
                raise ConfigError("prior_multipliers is empty but priors_sweep is selected")
            if self.classifier.kind != "naive_bayes":
                raise ConfigError("priors_sweep requires the built-in naive Bayes")
        if "threshold_sweep" in self.families and not self.thresholds:
            raise ConfigError("thresholds is empty but threshold_sweep is selected")
        if any(p <= 0 for p in self.over_percents):
            raise ConfigError("over_percents must be positive")
        if any(p <= 0 for p in self.under_percents):
            raise ConfigError("under_percents must be positive")
        if any(m <= 0 for m in self.prior_multipliers):
            raise ConfigError("prior multipliers must be positive")
        if any(not (0.0 <= t <= 1.0) for t in self.thresholds):
            raise ConfigError("thresholds must lie in [0, 1]")
        if self.k < 1:
            raise ConfigError(f"k must be at least 1, got {self.k}")
        if self.n_folds < 2:
            raise ConfigError(f"n_folds must be at least 2, got {self.n_folds}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.under_basis not in ("pre", "post"):
            raise ConfigError(f"under_basis must be 'pre' or 'post', got {self.under_basis!r}")

    def to_dict(self) -> dict:
        raw = dataclasses.asdict(self)
        raw["classifier"] = dataclasses.asdict(self.classifier)
        for key, value in raw.items():
            if isinstance(value, tuple):
                raw[key] = list(value)
        return raw

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        data = dict(raw)
        spec = data.pop("classifier", None)
        kwargs = {}
        for f in dataclasses.fields(cls):
            if f.name == "classifier":
                continue
            if f.name in data:
                value = data.pop(f.name)
                kwargs[f.name] = tuple(value) if isinstance(value, list) else value
        if data:
            raise ConfigError(f"unknown config keys {sorted(data)}")
        if spec is not None:
            kwargs["classifier"] = ClassifierSpec(**spec)
        return cls(**kwargs)


@dataclass
class ExperimentResult:
    curves: list
    aucs: dict
    hull: list
    hull_counts: dict  # per curve family, anchors under "anchor"
    family_hull_counts: dict  # per base family, anchors excluded
    dominant_family: str
    statement: str
    warnings: list
    cell_sizes: dict  # (curve family, tag) -> per-fold (n_minority, n_majority)
    config: dict


class _SkipCell(Exception):
    pass


def _base_family(curve_family: str) -> str:
    return curve_family.split("@", 1)[0]


def _make_scorer(spec: ClassifierSpec):
    """Return scorer(train_ds, test_rows) -> minority scores per test row."""
    if spec.kind == "external":
        external = ExternalClassifier(spec.command)
        return external.score

    def nb_score(train_ds: Dataset, test_rows) -> np.ndarray:
        model = train(train_ds, spec)
        return model.score_rows(test_rows)

    return nb_score


def run_experiment(ds: Dataset, cfg: ExperimentConfig) -> ExperimentResult:
    """Run every configured family over a shared fold assignment.

    Grid cells whose under-sampling would leave no majority rows are skipped
    with a warning instead of failing the run.
    """
    cfg.validate()
    folds = stratified_folds(ds, cfg.n_folds, child_seed(cfg.seed, "folds"))
    fold_data = []
    for f in range(cfg.n_folds):
        train_ds = ds.subset(folds.train_indices(f))
        test_idx = folds.test_indices(f)
        test_rows = [ds.rows[i] for i in test_idx]
        test_labels = [ds.labels[i] for i in test_idx]
        fold_data.append((train_ds, test_rows, test_labels))

    scorer = _make_scorer(cfg.classifier)
    warnings_log: list[str] = []
    cell_sizes: dict = {}

    def eval_resampled(family: str, tag: str, over: int, under, variant: str):
        cms = []
        sizes = []
        for f, (train_ds, test_rows, test_labels) in enumerate(fold_data):
            if over == 0 and under in (None, 0):
                resampled = train_ds
            else:
                detail = apply_plan_detailed(
                    train_ds,
                    over,
                    under,
                    cfg.k,
                    child_seed(cfg.seed, family, tag, f),
                    variant,
                    gap_mode=cfg.gap_mode,
                    neighbor_mode=cfg.neighbor_mode,
                    under_basis=cfg.under_basis,
                )
                audit_batch(detail.batch, train_ds.n_minority)
                resampled = detail.dataset
            if resampled.n_majority == 0:
                raise _SkipCell(
                    f"{family} cell {tag}: under-sampling emptied the majority class"
                )
            scores = scorer(resampled, test_rows)
            cms.append(
                confusion_from_scores(scores, test_labels, cfg.classifier.threshold)
            )
            sizes.append((resampled.n_minority, resampled.n_majority))
        cell_sizes[(family, tag)] = sizes
        return cms

    raw_cms = None

    def raw_cell():
        nonlocal raw_cms
        if raw_cms is None:
            raw_cms = []
            for train_ds, test_rows, test_labels in fold_data:
                scores = scorer(train_ds, test_rows)
                raw_cms.append(
                    confusion_from_scores(scores, test_labels, cfg.classifier.threshold)
                )
        return raw_cms

    def sweep_family(family: str, variant: str) -> list[RocCurve]:
        curves = []
        for over in cfg.over_percents:
            label = f"{family}@{over}"
            results = []
            if cfg.include_raw_point:
                results.append(("raw", raw_cell()))
                cell_sizes[(label, "raw")] = [
                    (fd[0].n_minority, fd[0].n_majority) for fd in fold_data
                ]
            for under in cfg.under_percents:
                tag = f"over={over},under={under}"
                try:
                    results.append((tag, eval_resampled(label, tag, over, under, variant)))
                except _SkipCell as skip:
                    warnings_log.append(str(skip))
                    log.warning("%s", skip)
            curves.append(build_family_curve(label, results))
        return curves

    curves: list[RocCurve] = []
    for family in cfg.families:
        if family == "smote_under":
            curves.extend(sweep_family("smote_under", cfg.variant))
        elif family == "replicate":
            curves.extend(sweep_family("replicate", "replicate"))
        elif family == "plain_under":
            results = []
            if cfg.include_raw_point:
                results.append(("raw", raw_cell()))
                cell_sizes[("plain_under", "raw")] = [
                    (fd[0].n_minority, fd[0].n_majority) for fd in fold_data
                ]
            for under in cfg.under_percents:
                tag = f"under={under}"
                try:
                    results.append(
                        (tag, eval_resampled("plain_under", tag, 0, under, cfg.variant))
                    )
                except _SkipCell as skip:
                    warnings_log.append(str(skip))
                    log.warning("%s", skip)
            curves.append(build_family_curve("plain_under", results))
        elif family == "priors_sweep":
            results = []
            for multiplier in cfg.prior_multipliers:
                spec = dataclasses.replace(cfg.classifier, prior_multiplier=multiplier)
                cms = []
                for train_ds, test_rows, test_labels in fold_data:
                    model = train(train_ds, spec)
                    cms.append(
                        confusion_from_scores(
                            model.score_rows(test_rows), test_labels, spec.threshold
                        )
                    )
                results.append((f"prior={multiplier}", cms))
            curves.append(build_family_curve("priors_sweep", results))
        else:  # threshold_sweep
            fold_scores = [
                (scorer(train_ds, test_rows), test_labels)
                for train_ds, test_rows, test_labels in fold_data
            ]
            results = [
                (
                    f"threshold={t}",
                    [
                        confusion_from_scores(scores, labels, t)
                        for scores, labels in fold_scores
                    ],
                )
                for t in cfg.thresholds
            ]
            curves.append(build_family_curve("threshold_sweep", results))

    curves.sort(key=lambda c: c.family)
    aucs = {curve.family: auc(curve) for curve in curves}
    hull = convex_hull(curves)

    hull_counts: dict[str, int] = {}
    family_counts: dict[str, int] = {}
    for vertex in hull:
        hull_counts[vertex.family] = hull_counts.get(vertex.family, 0) + 1
        base = _base_family(vertex.family)
        if base != "anchor":
            family_counts[base] = family_counts.get(base, 0) + 1
    for family in cfg.families:
        family_counts.setdefault(family, 0)

    total = sum(family_counts.values())
    best = max(family_counts.values()) if family_counts else 0
    leaders = sorted(f for f, c in family_counts.items() if c == best)
    if len(leaders) == 1:
        dominant = leaders[0]
        statement = (
            f"{dominant} contributes the most hull vertices "
            f"({best} of {total})"
        )
    else:
        dominant = ""
        statement = (
            f"hull vertex tie between {', '.join(leaders)} ({best} each of {total})"
        )

    return ExperimentResult(
        curves=curves,
        aucs=aucs,
        hull=hull,
        hull_counts=hull_counts,
        family_hull_counts=family_counts,
        dominant_family=dominant,
        statement=statement,
        warnings=warnings_log,
        cell_sizes=cell_sizes,
        config=cfg.to_dict(),
    )


def emit_report(
    result: ExperimentResult, out_dir: str | Path, dataset_info: dict = None
) -> dict:
    """Write the report files and return their paths.

    Files: ``roc_points.csv`` (family, tag, fp_rate, tp_rate, on_hull),
    ``hull.csv``, ``aucs.json`` (per-family AUC as fraction and x10^4
    integer, hull vertices and counts, the dominance statement, warnings),
    and ``manifest.json`` (config, dataset info, library versions). All files
    are deterministic: sorted content, no timestamps.
    """
    if not result.curves:
        raise ConfigError("nothing to report: no curves were produced")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "roc_points": out / "roc_points.csv",
        "hull": out / "hull.csv",
        "aucs": out / "aucs.json",
        "manifest": out / "manifest.json",
    }
    write_points_csv(paths["roc_points"], result.curves, result.hull)
    write_hull_csv(paths["hull"], result.hull)
    write_summary_json(
        paths["aucs"],
        {
            "auc_anchor": "origin",
            "aucs": {
                family: {"auc": value, "auc_e4": auc_e4(value)}
                for family, value in sorted(result.aucs.items())
            },
            "hull_vertices": [
                {
                    "family": v.family,
                    "tag": v.tag,
                    "fp_rate": v.fp_rate,
                    "tp_rate": v.tp_rate,
                }
                for v in result.hull
            ],
            "hull_vertex_counts": result.hull_counts,
            "hull_family_counts": result.family_hull_counts,
            "hull_dominant_family": result.dominant_family,
            "statement": result.statement,
            "warnings": result.warnings,
        },
    )
    write_summary_json(
        paths["manifest"],
        {
            "config": result.config,
            "dataset": dataset_info,
            "versions": {
                "smotekit": __version__,
                "numpy": np.__version__,
                "python": platform.python_version(),
            },
        },
    )
    return paths


def load_manifest(path: str | Path) -> tuple:
    """Read back a manifest: (ExperimentConfig, dataset_info dict or None)."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if "config" not in raw:
        raise ConfigError(f"{path} does not look like a run manifest")
    return ExperimentConfig.from_dict(raw["config"]), raw.get("dataset")
