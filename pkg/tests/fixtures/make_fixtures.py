"""Regenerates the checked-in fixture files.

The three confusion matrices are solved by hand from the published
per-class precision/recall at 5 truths per class (n=20). Score files and
the shared affordance DB are constructed so each pipeline mode reproduces
its matrix exactly:

  cnn:        scores peak at the target prediction, objects uninformative
  affordance: uniform scores, objects whose stored argmax is the target
  fused:      scores peak at the truth (0.4), object affordance peaks at
              the target (0.7); the product's argmax is the target

Run from the repo root: python3 tests/fixtures/make_fixtures.py
"""

from pathlib import Path

import numpy as np

from graspfusion import (
    AffordanceDb,
    GraspDistribution,
    GraspTaxonomy,
    ScoreFile,
    ScoreRecord,
    save,
    write_scores,
)
from graspfusion.affordance import _entry_from_counts
from graspfusion.taxonomy import normalize

HERE = Path(__file__).parent
FOCUS = GraspTaxonomy.focus()
L, M, P, T = FOCUS.labels

CONFUSION = {
    "cnn": [
        [2, 1, 1, 1],
        [0, 2, 2, 1],
        [0, 0, 4, 1],
        [1, 1, 1, 2],
    ],
    "affordance": [
        [5, 0, 0, 0],
        [4, 1, 0, 0],
        [5, 0, 0, 0],
        [5, 0, 0, 0],
    ],
    "fused": [
        [4, 0, 0, 1],
        [2, 2, 0, 1],
        [0, 0, 5, 0],
        [2, 0, 0, 3],
    ],
}

DB_COUNTS = {
    "widget": [1, 1, 1, 1],
    "aff_towel": [3, 0, 0, 0],
    "aff_bottle": [0, 2, 0, 0],
    f"fused_obj_{L}": [7, 1, 1, 1],
    f"fused_obj_{M}": [1, 7, 1, 1],
    f"fused_obj_{P}": [1, 1, 7, 1],
    f"fused_obj_{T}": [1, 1, 1, 7],
}

AFFORDANCE_OBJECT = {L: "aff_towel", M: "aff_bottle"}


def peaked(at: int, peak: float, rest: float) -> GraspDistribution:
    probs = [rest] * 4
    probs[at] = peak
    return GraspDistribution(FOCUS, probs)


def records_for(mode: str) -> list[ScoreRecord]:
    records = []
    k = 0
    for truth_idx, row in enumerate(CONFUSION[mode]):
        for pred_idx, count in enumerate(row):
            for _ in range(count):
                if mode == "cnn":
                    scores = peaked(pred_idx, 0.7, 0.1)
                    obj = "widget"
                elif mode == "affordance":
                    scores = GraspDistribution(FOCUS, [0.25] * 4)
                    obj = AFFORDANCE_OBJECT[FOCUS.labels[pred_idx]]
                else:
                    scores = peaked(truth_idx, 0.4, 0.2)
                    obj = f"fused_obj_{FOCUS.labels[pred_idx]}"
                records.append(ScoreRecord(
                    image_id=f"{mode}_{k:03d}",
                    object_name=obj,
                    scores=scores,
                    true_grasp=FOCUS.labels[truth_idx],
                ))
                k += 1
    return records


def main() -> None:
    entries = {
        name: _entry_from_counts(np.asarray(c, dtype=np.int64), 0.0, FOCUS)
        for name, c in sorted(DB_COUNTS.items())
    }
    total = np.sum([e.counts for e in entries.values()], axis=0)
    db = AffordanceDb(FOCUS, 0.0, entries, normalize(total, FOCUS))
    save(db, HERE / "reference_db.json")
    for mode in CONFUSION:
        write_scores(ScoreFile(FOCUS, tuple(records_for(mode))),
                     HERE / f"reference_{mode}.scores.jsonl")
    print("fixtures written to", HERE)


if __name__ == "__main__":
    main()
