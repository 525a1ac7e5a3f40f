"""The three recognition pipelines and their precision/recall evaluation.

Modes: `cnn` uses the per-image posterior alone, `affordance` uses the
object-keyed prior alone, `fused` combines both with the selected grasp
prior. Precision for a class that is never predicted is NaN (rendered as
null in JSON), matching the convention of the reference results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

import numpy as np

from .affordance import AffordanceDb, lookup
from .errors import GraspFusionError, MissingTruthError, ZeroSubsetMassError
from .scores import ScoreFile
from .taxonomy import (
    GraspDistribution,
    GraspTaxonomy,
    argmax_grasp,
    fuse,
    restrict,
    uniform,
)

MODES = ("cnn", "affordance", "fused")
PRIOR_MODES = ("uniform", "marginal")


@dataclass(frozen=True, eq=False)
class Prediction:
    image_id: str
    mode: str
    dist: GraspDistribution
    predicted: str
    fallback: bool = False


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Confusion matrix (rows = truth, cols = predicted) plus derived metrics."""

    taxonomy: GraspTaxonomy
    confusion: np.ndarray
    mode: str | None = None

    @property
    def n(self) -> int:
        return int(self.confusion.sum())

    @property
    def accuracy(self) -> float:
        return int(np.trace(self.confusion)) / self.n

    def precision(self, label: str) -> float:
        c = self.taxonomy.index(label)
        column = int(self.confusion[:, c].sum())
        if column == 0:
            return math.nan
        return int(self.confusion[c, c]) / column

    def recall(self, label: str) -> float:
        c = self.taxonomy.index(label)
        row = int(self.confusion[c, :].sum())
        if row == 0:
            return math.nan
        return int(self.confusion[c, c]) / row


def grasp_prior(db: AffordanceDb, focus: GraspTaxonomy, prior_mode: str) -> GraspDistribution:
    """The p(g) used by fusion: uniform, or the database's count marginal
    restricted to the focus taxonomy (uniform when that mass is zero)."""
    if prior_mode not in PRIOR_MODES:
        raise ValueError(f"prior_mode must be one of {PRIOR_MODES}")
    if prior_mode == "uniform":
        return uniform(focus)
    try:
        return restrict(db.marginal, focus)
    except ZeroSubsetMassError:
        return uniform(focus)


def run_pipeline(
    scores: ScoreFile,
    db: AffordanceDb,
    mode: str,
    prior_mode: str = "uniform",
    unknown_policy: str = "uniform",
) -> list[Prediction]:
    """Produce one Prediction per score record, in input order."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    focus = scores.taxonomy
    prior = grasp_prior(db, focus, prior_mode)
    predictions: list[Prediction] = []
    for record in scores.records:
        try:
            fallback = False
            if mode == "cnn":
                dist = record.scores
            else:
                looked_up = lookup(db, record.object_name, focus, unknown_policy)
                fallback = looked_up.fallback
                if mode == "affordance":
                    dist = looked_up.dist
                else:
                    dist = fuse(record.scores, looked_up.dist, prior)
        except GraspFusionError as exc:
            raise type(exc)(f"image {record.image_id!r}: {exc}") from exc
        predictions.append(
            Prediction(record.image_id, mode, dist, argmax_grasp(dist), fallback)
        )
    return predictions


def evaluate(predictions: Sequence[Prediction], scores: ScoreFile) -> EvalReport:
    """Tally the confusion matrix of predictions against the file's truths."""
    truths = {r.image_id: r.true_grasp for r in scores.records}
    missing = [p.image_id for p in predictions
               if p.image_id not in truths or truths[p.image_id] is None]
    if missing:
        raise MissingTruthError(
            "records without true_grasp: " + ", ".join(sorted(missing))
        )
    taxonomy = scores.taxonomy
    confusion = np.zeros((len(taxonomy), len(taxonomy)), dtype=np.int64)
    mode = predictions[0].mode if predictions else None
    for prediction in predictions:
        row = taxonomy.index(truths[prediction.image_id])
        col = taxonomy.index(prediction.predicted)
        confusion[row, col] += 1
    return EvalReport(taxonomy, confusion, mode)


def round2(numerator: int, denominator: int) -> float | None:
    """Exact 2-decimal rendering, half away from zero; None when undefined."""
    if denominator == 0:
        return None
    value = Decimal(numerator) / Decimal(denominator)
    return float(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def report_to_dict(report: EvalReport) -> dict:
    per_class = {}
    for c, label in enumerate(report.taxonomy.labels):
        tp = int(report.confusion[c, c])
        per_class[label] = {
            "precision": round2(tp, int(report.confusion[:, c].sum())),
            "recall": round2(tp, int(report.confusion[c, :].sum())),
        }
    return {
        "mode": report.mode,
        "n": report.n,
        "accuracy": round2(int(np.trace(report.confusion)), report.n),
        "per_class": per_class,
        "confusion": [[int(v) for v in row] for row in report.confusion],
    }


def render_report(report: EvalReport, format: str = "table") -> str:
    """Render a report as JSON (NaN -> null) or a 2-decimal text table."""
    if format == "json":
        return json.dumps(report_to_dict(report), indent=2) + "\n"
    if format != "table":
        raise ValueError("format must be 'json' or 'table'")

    def cell(value: float | None) -> str:
        return "NaN" if value is None else f"{value:.2f}"

    width = max(len(label) for label in report.taxonomy.labels)
    lines = [f"{'grasp_type':<{width}}  precision  recall"]
    for c, label in enumerate(report.taxonomy.labels):
        tp = int(report.confusion[c, c])
        p = round2(tp, int(report.confusion[:, c].sum()))
        r = round2(tp, int(report.confusion[c, :].sum()))
        lines.append(f"{label:<{width}}  {cell(p):>9}  {cell(r):>6}")
    accuracy = round2(int(np.trace(report.confusion)), report.n)
    lines.append(f"{'accuracy':<{width}}  {cell(accuracy):>9}  (n={report.n})")
    return "\n".join(lines) + "\n"
