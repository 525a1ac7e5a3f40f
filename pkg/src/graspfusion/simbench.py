"""Small discrete generative worlds and a brute-force enumeration oracle.

A world fixes p(g), p(i|g), p(o|g) with image and object symbols
conditionally independent given the grasp. Everything downstream of that
is computable by exhaustive enumeration: exact posteriors, the fusion
identity check, and exact expected accuracies of the three decision
rules. Randomness uses the counter-based Philox generator so worlds and
sampled datasets are reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .affordance import AffordanceRecord
from .errors import BadParameterError, ImpossibleObservationError
from .scores import ScoreFile, ScoreRecord
from .taxonomy import (
    FOCUS_LABELS,
    GraspDistribution,
    GraspTaxonomy,
    fuse,
    normalize,
)

G_RANGE = (2, 4)
SYMBOL_RANGE = (2, 5)

WORLD_FORMAT = "afford-world/1"


@dataclass(frozen=True, eq=False)
class World:
    taxonomy: GraspTaxonomy
    prior: GraspDistribution
    p_image_given_grasp: np.ndarray  # |G| x I, row-stochastic
    p_object_given_grasp: np.ndarray  # |G| x O, row-stochastic
    seed: int

    @property
    def image_count(self) -> int:
        return self.p_image_given_grasp.shape[1]

    @property
    def object_count(self) -> int:
        return self.p_object_given_grasp.shape[1]

    def joint(self) -> np.ndarray:
        """p(g, i, o) as a |G| x I x O array."""
        return (
            self.prior.probs[:, None, None]
            * self.p_image_given_grasp[:, :, None]
            * self.p_object_given_grasp[:, None, :]
        )


@dataclass(frozen=True, eq=False)
class Sample:
    grasp: str
    image_symbol: int
    object_symbol: int


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def generate_world(
    seed: int,
    g_count: int = 4,
    i_count: int = 5,
    o_count: int = 5,
    concentration: float = 1.0,
) -> World:
    """Draw a world with Dirichlet(concentration) prior and emission rows."""
    if not (G_RANGE[0] <= g_count <= G_RANGE[1]):
        raise BadParameterError(f"g_count must be in {G_RANGE}, got {g_count}")
    for name, count in (("i_count", i_count), ("o_count", o_count)):
        if not (SYMBOL_RANGE[0] <= count <= SYMBOL_RANGE[1]):
            raise BadParameterError(f"{name} must be in {SYMBOL_RANGE}, got {count}")
    if not (concentration > 0):
        raise BadParameterError(f"concentration must be > 0, got {concentration}")
    rng = _rng(seed)
    taxonomy = GraspTaxonomy(FOCUS_LABELS[:g_count])
    prior = normalize(rng.dirichlet(np.full(g_count, concentration)), taxonomy)
    p_image = rng.dirichlet(np.full(i_count, concentration), size=g_count)
    p_object = rng.dirichlet(np.full(o_count, concentration), size=g_count)
    p_image.flags.writeable = False
    p_object.flags.writeable = False
    return World(taxonomy, prior, p_image, p_object, seed)


def exact_posterior(world: World, image_symbol: int, object_symbol: int) -> GraspDistribution:
    """p(g | i, o) by direct enumeration of p(g) p(i|g) p(o|g)."""
    weights = (
        world.prior.probs
        * world.p_image_given_grasp[:, image_symbol]
        * world.p_object_given_grasp[:, object_symbol]
    )
    if float(weights.sum()) == 0.0:
        raise ImpossibleObservationError(
            f"observation (i={image_symbol}, o={object_symbol}) has zero joint mass"
        )
    return normalize(weights, world.taxonomy)


def cue_posterior(world: World, cue: str, symbol: int) -> GraspDistribution:
    """p(g | i) or p(g | o) for a single cue symbol."""
    if cue == "image":
        emission = world.p_image_given_grasp[:, symbol]
    elif cue == "object":
        emission = world.p_object_given_grasp[:, symbol]
    else:
        raise ValueError("cue must be 'image' or 'object'")
    weights = world.prior.probs * emission
    if float(weights.sum()) == 0.0:
        raise ImpossibleObservationError(f"{cue} symbol {symbol} has zero marginal mass")
    return normalize(weights, world.taxonomy)


def fusion_identity_error(world: World) -> float:
    """Max element-wise gap between fused cue posteriors and the exact
    posterior, over every (i, o) with positive joint mass. The fusion rule
    is an identity under the world's construction, so this measures only
    numerical error."""
    joint = world.joint()
    pair_mass = joint.sum(axis=0)
    image_posteriors = [
        cue_posterior(world, "image", i) if pair_mass[i, :].sum() > 0 else None
        for i in range(world.image_count)
    ]
    object_posteriors = [
        cue_posterior(world, "object", o) if pair_mass[:, o].sum() > 0 else None
        for o in range(world.object_count)
    ]
    worst = 0.0
    for i in range(world.image_count):
        for o in range(world.object_count):
            if pair_mass[i, o] <= 0:
                continue
            fused = fuse(image_posteriors[i], object_posteriors[o], world.prior)
            exact = exact_posterior(world, i, o)
            worst = max(worst, float(np.abs(fused.probs - exact.probs).max()))
    return worst


def expected_accuracy(world: World, rule: str) -> float:
    """Exact expected accuracy of a decision rule by full enumeration.

    cnn decides from p(g|i), affordance from p(g|o), fused from p(g|i,o);
    argmax ties break to the smallest taxonomy index, as in the library.
    """
    if rule not in ("cnn", "affordance", "fused"):
        raise ValueError("rule must be 'cnn', 'affordance', or 'fused'")
    joint = world.joint()
    pair_mass = joint.sum(axis=0)
    total = 0.0
    if rule == "cnn":
        for i in range(world.image_count):
            if pair_mass[i, :].sum() <= 0:
                continue
            g = int(np.argmax(cue_posterior(world, "image", i).probs))
            total += float(joint[g, i, :].sum())
    elif rule == "affordance":
        for o in range(world.object_count):
            if pair_mass[:, o].sum() <= 0:
                continue
            g = int(np.argmax(cue_posterior(world, "object", o).probs))
            total += float(joint[g, :, o].sum())
    else:
        for i in range(world.image_count):
            for o in range(world.object_count):
                if pair_mass[i, o] <= 0:
                    continue
                g = int(np.argmax(exact_posterior(world, i, o).probs))
                total += float(joint[g, i, o])
    return total


@dataclass(frozen=True, eq=False)
class SampledDataset:
    """A simulated dataset in the pipeline's own interchange types."""

    samples: tuple[Sample, ...]
    scores: ScoreFile
    affordance_records: tuple[AffordanceRecord, ...]
    seed: int


def _inverse_cdf(cumulative: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.searchsorted(cumulative, u, side="right").clip(max=len(cumulative) - 1)


def sample_dataset(world: World, n: int, seed: int) -> SampledDataset:
    """Draw n samples and bridge them into a ScoreFile (scores = p(g|i))
    plus affordance records (object name, grasp) from the same draws."""
    if n < 1:
        raise BadParameterError(f"n must be >= 1, got {n}")
    rng = _rng(seed)
    u = rng.random((n, 3))
    grasps = _inverse_cdf(np.cumsum(world.prior.probs), u[:, 0])
    image_cdf = np.cumsum(world.p_image_given_grasp, axis=1)
    object_cdf = np.cumsum(world.p_object_given_grasp, axis=1)
    images = np.array([
        _inverse_cdf(image_cdf[g], u[k, 1]) for k, g in enumerate(grasps)
    ])
    objects = np.array([
        _inverse_cdf(object_cdf[g], u[k, 2]) for k, g in enumerate(grasps)
    ])
    image_posterior = [
        cue_posterior(world, "image", i) for i in range(world.image_count)
    ]
    width = max(5, len(str(n - 1)))
    samples = []
    records = []
    affordances = []
    for k in range(n):
        g, i, o = world.taxonomy.labels[grasps[k]], int(images[k]), int(objects[k])
        samples.append(Sample(g, i, o))
        records.append(ScoreRecord(
            image_id=f"img_{k:0{width}d}",
            object_name=f"obj_{o}",
            scores=image_posterior[i],
            true_grasp=g,
        ))
        affordances.append(AffordanceRecord(f"obj_{o}", g))
    score_file = ScoreFile(world.taxonomy, tuple(records))
    return SampledDataset(tuple(samples), score_file, tuple(affordances), seed)


def world_to_dict(world: World) -> dict:
    return {
        "format": WORLD_FORMAT,
        "seed": world.seed,
        "taxonomy": list(world.taxonomy.labels),
        "prior": [float(p) for p in world.prior.probs],
        "p_image_given_grasp": [[float(p) for p in row] for row in world.p_image_given_grasp],
        "p_object_given_grasp": [[float(p) for p in row] for row in world.p_object_given_grasp],
    }
