"""Score-file wire format: per-image classifier posteriors plus ground truth.

Line-delimited JSON: line 1 is a header declaring the taxonomy; each
following line carries one image's posterior, its object name, and an
optional true grasp label. Any external classifier that emits this format
can feed the fusion pipeline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DuplicateImageIdError,
    HeaderMissingError,
    LengthMismatchError,
    NegativeScoreError,
    NonFiniteError,
    SchemaError,
)
from .fileio import atomic_write_text
from .taxonomy import BOUNDARY_TOL, GraspDistribution, GraspTaxonomy, normalize

SCORES_FORMAT = "afford-scores/1"


@dataclass(frozen=True, eq=False)
class ScoreRecord:
    """One test item: image id, object name, optional truth, and p(g|i)."""

    image_id: str
    object_name: str
    scores: GraspDistribution
    true_grasp: str | None = None


@dataclass(frozen=True, eq=False)
class ScoreFile:
    taxonomy: GraspTaxonomy
    records: tuple[ScoreRecord, ...]
    warnings: int = 0

    def __len__(self) -> int:
        return len(self.records)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def parse_scores(path: str | Path, mode: str = "strict") -> ScoreFile:
    """Parse a score file.

    strict: a record whose scores do not sum to 1 within 1e-6 is an error.
    lenient: such records are renormalized and counted in `warnings`.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError("mode must be 'strict' or 'lenient'")
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].strip():
        raise HeaderMissingError(f"{path}: missing header line")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line 1: not valid JSON: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != SCORES_FORMAT:
        raise HeaderMissingError(
            f"{path}: line 1 is not an {SCORES_FORMAT!r} header"
        )
    labels = header.get("taxonomy")
    _require(
        isinstance(labels, list) and labels and all(isinstance(l, str) for l in labels),
        f"{path}: line 1: header field 'taxonomy' must be a list of labels",
    )
    taxonomy = GraspTaxonomy(tuple(labels))

    records: list[ScoreRecord] = []
    seen_ids: set[str] = set()
    warnings = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: line {lineno}: not valid JSON: {exc}") from exc
        _require(isinstance(obj, dict), f"{path}: line {lineno}: expected a JSON object")
        for field_name in ("image_id", "object", "scores"):
            _require(field_name in obj, f"{path}: line {lineno}: missing field {field_name!r}")
        image_id = obj["image_id"]
        object_name = obj["object"]
        raw_scores = obj["scores"]
        _require(isinstance(image_id, str) and image_id,
                 f"{path}: line {lineno}: 'image_id' must be a non-empty string")
        _require(isinstance(object_name, str),
                 f"{path}: line {lineno}: 'object' must be a string")
        _require(
            isinstance(raw_scores, list)
            and all(isinstance(s, (int, float)) and not isinstance(s, bool) for s in raw_scores),
            f"{path}: line {lineno}: 'scores' must be a list of numbers",
        )
        if image_id in seen_ids:
            raise DuplicateImageIdError(f"{path}: line {lineno}: duplicate image_id {image_id!r}")
        seen_ids.add(image_id)
        if len(raw_scores) != len(taxonomy):
            raise SchemaError(
                f"{path}: line {lineno}: record {image_id!r}: "
                f"{len(raw_scores)} scores for {len(taxonomy)} labels"
            )
        if any(not math.isfinite(s) for s in raw_scores):
            raise SchemaError(f"{path}: line {lineno}: record {image_id!r}: non-finite score")
        if any(s < 0 for s in raw_scores):
            raise NegativeScoreError(
                f"{path}: line {lineno}: record {image_id!r}: negative score"
            )
        true_grasp = obj.get("true_grasp")
        if true_grasp is not None:
            _require(isinstance(true_grasp, str) and true_grasp in taxonomy,
                     f"{path}: line {lineno}: 'true_grasp' {true_grasp!r} not in taxonomy")
        vec = np.asarray(raw_scores, dtype=float)
        total = float(vec.sum())
        if not (1 - BOUNDARY_TOL <= total <= 1 + BOUNDARY_TOL):
            if mode == "strict":
                raise SchemaError(
                    f"{path}: line {lineno}: record {image_id!r}: "
                    f"scores sum to {total:.9g}, expected 1"
                )
            dist = normalize(vec, taxonomy)
            warnings += 1
        else:
            dist = GraspDistribution(taxonomy, vec)
        records.append(ScoreRecord(image_id, object_name, dist, true_grasp))
    return ScoreFile(taxonomy, tuple(records), warnings)


def write_scores(score_file: ScoreFile, path: str | Path) -> None:
    """Serialize a score file; floats round-trip exactly through JSON."""
    lines = [json.dumps(
        {"format": SCORES_FORMAT, "taxonomy": list(score_file.taxonomy.labels)},
        separators=(",", ":"),
    )]
    for record in score_file.records:
        doc: dict = {
            "image_id": record.image_id,
            "object": record.object_name,
        }
        if record.true_grasp is not None:
            doc["true_grasp"] = record.true_grasp
        doc["scores"] = [float(p) for p in record.scores.probs]
        lines.append(json.dumps(doc, separators=(",", ":")))
    atomic_write_text(path, "\n".join(lines) + "\n")


def from_logits(
    logits: Sequence[float] | np.ndarray,
    temperature: float,
    taxonomy: GraspTaxonomy,
) -> GraspDistribution:
    """Temperature-scaled softmax with max-subtraction for stability."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    z = np.asarray(logits, dtype=float)
    if z.shape != (len(taxonomy),):
        raise LengthMismatchError(
            f"logit vector has length {z.size}, taxonomy has {len(taxonomy)} labels"
        )
    if not np.all(np.isfinite(z)):
        raise NonFiniteError("logits must be finite")
    z = z / temperature
    w = np.exp(z - z.max())
    return normalize(w, taxonomy)
