"""Grasp taxonomies, probability vectors over them, and the late-fusion rule.

The fusion combines a per-image posterior with an object-keyed prior
distribution by an element-wise product divided by the grasp-type prior,
then renormalizes. Zeros propagate exactly; strictly positive entries are
combined in the log domain to avoid underflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AllZeroError,
    DegenerateFusionError,
    InconsistentPriorError,
    LengthMismatchError,
    TaxonomyMismatchError,
    UnknownLabelError,
    ZeroSubsetMassError,
)

#: The four grasp types this project focuses on, in canonical order.
FOCUS_LABELS = ("lateral_tripod", "medium_wrap", "power_sphere", "thumb_2_finger")

#: Tolerance for sum-to-one at module boundaries.
BOUNDARY_TOL = 1e-6


@dataclass(frozen=True)
class GraspTaxonomy:
    """An ordered set of unique grasp-type names.

    The label order is the vector layout for every distribution built on
    top of this taxonomy.
    """

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            raise ValueError("taxonomy needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("taxonomy labels must be distinct")

    @classmethod
    def focus(cls) -> "GraspTaxonomy":
        return cls(FOCUS_LABELS)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabelError(f"unknown grasp label: {label!r}") from None

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def __iter__(self):
        return iter(self.labels)


@dataclass(frozen=True, eq=False)
class GraspDistribution:
    """A probability vector over a taxonomy (posterior, prior, or affordance)."""

    taxonomy: GraspTaxonomy
    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (len(self.taxonomy),):
            raise LengthMismatchError(
                f"probability vector has length {probs.size}, "
                f"taxonomy has {len(self.taxonomy)} labels"
            )
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        total = float(probs.sum())
        if not (1 - BOUNDARY_TOL <= total <= 1 + BOUNDARY_TOL):
            raise ValueError(f"probabilities sum to {total:.9g}, expected 1")
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    def prob(self, label: str) -> float:
        return float(self.probs[self.taxonomy.index(label)])


def normalize(weights: Sequence[float] | np.ndarray, taxonomy: GraspTaxonomy) -> GraspDistribution:
    """Normalize a non-negative weight vector into a distribution.

    Raises AllZeroError when the weights sum to zero and
    LengthMismatchError when the vector does not fit the taxonomy.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(taxonomy),):
        raise LengthMismatchError(
            f"weight vector has length {w.size}, taxonomy has {len(taxonomy)} labels"
        )
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    total = float(w.sum())
    if total == 0.0:
        raise AllZeroError("all weights are zero; nothing to normalize")
    return GraspDistribution(taxonomy, w / total)


def uniform(taxonomy: GraspTaxonomy) -> GraspDistribution:
    """The uniform distribution over a taxonomy."""
    n = len(taxonomy)
    return GraspDistribution(taxonomy, np.full(n, 1.0 / n))


def _require_same_taxonomy(*dists: GraspDistribution) -> GraspTaxonomy:
    taxonomy = dists[0].taxonomy
    for d in dists[1:]:
        if d.taxonomy != taxonomy:
            raise TaxonomyMismatchError("distributions use different taxonomies")
    return taxonomy


def fuse(
    p_img: GraspDistribution,
    p_obj: GraspDistribution,
    prior: GraspDistribution,
) -> GraspDistribution:
    """Fuse two cue posteriors with a shared prior.

    result[k] is proportional to p_img[k] * p_obj[k] / prior[k]. Entries
    where either cue is zero are excluded (the result is zero there); the
    strictly positive remainder is combined in the log domain.
    """
    taxonomy = _require_same_taxonomy(p_img, p_obj, prior)
    pi, po, pr = p_img.probs, p_obj.probs, prior.probs
    support = (pi > 0) & (po > 0)
    bad = support & (pr == 0)
    if np.any(bad):
        labels = [taxonomy.labels[k] for k in np.flatnonzero(bad)]
        raise InconsistentPriorError(
            f"prior is zero but cue product is positive at: {', '.join(labels)}"
        )
    if not support.any():
        raise DegenerateFusionError("cues have disjoint support; fused product is all-zero")
    log_w = np.log(pi[support]) + np.log(po[support]) - np.log(pr[support])
    w = np.zeros_like(pi)
    w[support] = np.exp(log_w - log_w.max())
    return normalize(w, taxonomy)


def argmax_grasp(dist: GraspDistribution) -> str:
    """The label with maximal probability; ties go to the smallest index."""
    return dist.taxonomy.labels[int(np.argmax(dist.probs))]


def restrict(dist: GraspDistribution, subset: GraspTaxonomy) -> GraspDistribution:
    """Project a distribution onto a label subset and renormalize."""
    indices = [dist.taxonomy.index(label) for label in subset.labels]
    selected = dist.probs[indices]
    if float(selected.sum()) == 0.0:
        raise ZeroSubsetMassError(
            "selected labels carry zero mass; caller decides the fallback"
        )
    return normalize(selected, subset)
