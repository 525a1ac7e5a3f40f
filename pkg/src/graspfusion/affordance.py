"""Object-name -> grasp-type prior database ("affordance").

The database stores a per-object grasp-count histogram over a full
taxonomy; probabilities are normalized histograms with optional additive
smoothing. Lookups restrict the stored distribution to a focus taxonomy
and renormalize. Counts are the source of truth for serialization.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyInputError,
    EmptyNameError,
    SchemaError,
    TaxonomyMismatchError,
    UnknownGraspLabelError,
    UnknownLabelError,
    UnknownObjectError,
    ZeroSubsetMassError,
)
from .fileio import atomic_write_text
from .taxonomy import GraspDistribution, GraspTaxonomy, normalize, restrict, uniform

DB_FORMAT = "afford-db/1"

UNKNOWN_POLICIES = ("error", "uniform", "marginal")


@dataclass(frozen=True)
class AffordanceRecord:
    """One labeled observation: an object name and the grasp used on it."""

    object_name: str
    grasp_label: str


@dataclass(frozen=True, eq=False)
class AffordanceEntry:
    counts: np.ndarray
    prob: GraspDistribution


@dataclass(frozen=True, eq=False)
class AffordanceDb:
    taxonomy: GraspTaxonomy
    alpha: float
    entries: Mapping[str, AffordanceEntry]
    marginal: GraspDistribution

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffordanceDb):
            return NotImplemented
        return (
            self.taxonomy == other.taxonomy
            and self.alpha == other.alpha
            and set(self.entries) == set(other.entries)
            and all(
                np.array_equal(self.entries[name].counts, other.entries[name].counts)
                for name in self.entries
            )
        )

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, eq=False)
class LookupResult:
    """A lookup's distribution plus whether it came from a fallback path
    (unknown object or zero mass inside the focus) rather than stored data."""

    dist: GraspDistribution
    fallback: bool


def normalize_name(raw: str) -> str:
    """Canonical object-name key: case-folded, trimmed, whitespace runs -> '_'."""
    parts = raw.casefold().split()
    if not parts:
        raise EmptyNameError(f"object name is empty after normalization: {raw!r}")
    return "_".join(parts)


def _entry_from_counts(counts: np.ndarray, alpha: float, taxonomy: GraspTaxonomy) -> AffordanceEntry:
    counts = counts.copy()
    counts.flags.writeable = False
    return AffordanceEntry(counts, normalize(counts + alpha, taxonomy))


def build(
    records: Iterable[AffordanceRecord],
    taxonomy: GraspTaxonomy,
    alpha: float = 0.0,
) -> AffordanceDb:
    """Tally per-object grasp counts and normalize with pseudo-count alpha.

    Permutation-invariant: the resulting database does not depend on the
    order of the input records.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    records = list(records)
    if not records:
        raise EmptyInputError("no affordance records")
    counts: dict[str, np.ndarray] = {}
    for record in records:
        name = normalize_name(record.object_name)
        if record.grasp_label not in taxonomy:
            raise UnknownGraspLabelError(
                f"unknown grasp label {record.grasp_label!r} "
                f"in record for object {record.object_name!r}"
            )
        per_object = counts.setdefault(name, np.zeros(len(taxonomy), dtype=np.int64))
        per_object[taxonomy.index(record.grasp_label)] += 1
    entries = {
        name: _entry_from_counts(counts[name], alpha, taxonomy)
        for name in sorted(counts)
    }
    total = np.sum([e.counts for e in entries.values()], axis=0)
    marginal = normalize(total + alpha, taxonomy)
    return AffordanceDb(taxonomy, float(alpha), entries, marginal)


def lookup(
    db: AffordanceDb,
    object_name: str,
    focus: GraspTaxonomy,
    unknown_policy: str = "error",
) -> LookupResult:
    """Fetch an object's grasp distribution restricted to a focus taxonomy.

    unknown_policy decides what an absent object yields: an error, the
    uniform distribution over focus, or the database marginal. A stored
    distribution whose mass lies entirely outside the focus falls back to
    uniform and is flagged.
    """
    if unknown_policy not in UNKNOWN_POLICIES:
        raise ValueError(f"unknown_policy must be one of {UNKNOWN_POLICIES}")
    for label in focus.labels:
        if label not in db.taxonomy:
            raise UnknownLabelError(f"focus label {label!r} not in database taxonomy")
    name = normalize_name(object_name)
    entry = db.entries.get(name)
    if entry is None:
        if unknown_policy == "error":
            raise UnknownObjectError(f"object not in database: {object_name!r}")
        if unknown_policy == "uniform":
            return LookupResult(uniform(focus), fallback=True)
        return LookupResult(_restrict_or_uniform(db.marginal, focus), fallback=True)
    try:
        return LookupResult(restrict(entry.prob, focus), fallback=False)
    except ZeroSubsetMassError:
        return LookupResult(uniform(focus), fallback=True)


def _restrict_or_uniform(dist: GraspDistribution, focus: GraspTaxonomy) -> GraspDistribution:
    try:
        return restrict(dist, focus)
    except ZeroSubsetMassError:
        return uniform(focus)


def save(db: AffordanceDb, path: str | Path) -> None:
    """Write the database as a single JSON document (counts are canonical)."""
    doc = {
        "format": DB_FORMAT,
        "taxonomy": list(db.taxonomy.labels),
        "alpha": db.alpha,
        "objects": {
            name: {"counts": [int(c) for c in entry.counts]}
            for name, entry in sorted(db.entries.items())
        },
    }
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load(path: str | Path) -> AffordanceDb:
    """Read a database file; probabilities and the marginal are recomputed."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != DB_FORMAT:
        raise SchemaError(f"{path}: missing or wrong format marker (expected {DB_FORMAT!r})")
    try:
        labels = doc["taxonomy"]
        alpha = doc["alpha"]
        objects = doc["objects"]
    except KeyError as exc:
        raise SchemaError(f"{path}: missing field {exc.args[0]!r}") from exc
    if not isinstance(labels, list) or not all(isinstance(l, str) for l in labels):
        raise SchemaError(f"{path}: field 'taxonomy' must be a list of strings")
    taxonomy = GraspTaxonomy(tuple(labels))
    if not isinstance(alpha, (int, float)) or isinstance(alpha, bool) or alpha < 0:
        raise SchemaError(f"{path}: field 'alpha' must be a non-negative number")
    if not isinstance(objects, dict) or not objects:
        raise SchemaError(f"{path}: field 'objects' must be a non-empty object map")
    entries: dict[str, AffordanceEntry] = {}
    for name in sorted(objects):
        obj = objects[name]
        if not isinstance(obj, dict) or "counts" not in obj:
            raise SchemaError(f"{path}: object {name!r}: missing field 'counts'")
        counts = obj["counts"]
        if not isinstance(counts, list) or not all(
            isinstance(c, int) and not isinstance(c, bool) for c in counts
        ):
            raise SchemaError(f"{path}: object {name!r}: counts must be integers")
        if len(counts) != len(taxonomy):
            raise TaxonomyMismatchError(
                f"{path}: object {name!r}: counts length {len(counts)} "
                f"!= taxonomy length {len(taxonomy)}"
            )
        if any(c < 0 for c in counts):
            raise SchemaError(f"{path}: object {name!r}: negative count")
        entries[name] = _entry_from_counts(np.asarray(counts, dtype=np.int64), alpha, taxonomy)
    total = np.sum([e.counts for e in entries.values()], axis=0)
    marginal = normalize(total + alpha, taxonomy)
    return AffordanceDb(taxonomy, float(alpha), entries, marginal)


def read_records_csv(
    path: str | Path,
    taxonomy: GraspTaxonomy | None = None,
) -> list[AffordanceRecord]:
    """Read `object,grasp` CSV rows; with a taxonomy, labels are validated
    per row so errors can name the offending line."""
    records: list[AffordanceRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file, expected header 'object,grasp'")
        if [h.strip() for h in header] != ["object", "grasp"]:
            raise SchemaError(f"{path}: line 1: expected header 'object,grasp'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise SchemaError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
            object_name, grasp = row[0], row[1].strip()
            if taxonomy is not None and grasp not in taxonomy:
                raise SchemaError(f"{path}: line {lineno}: unknown grasp label {grasp!r}")
            records.append(AffordanceRecord(object_name, grasp))
    if not records:
        raise EmptyInputError(f"{path}: no records")
    return records


def write_records_csv(records: Sequence[AffordanceRecord], path: str | Path) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["object", "grasp"])
    for record in records:
        writer.writerow([record.object_name, record.grasp_label])
    atomic_write_text(path, buffer.getvalue())
