import numpy as np
import pytest

from graspfusion import (
    GraspDistribution,
    GraspTaxonomy,
    build,
    fusion_identity_error,
    cue_posterior,
    exact_posterior,
    expected_accuracy,
    generate_world,
    restrict,
    sample_dataset,
    write_scores,
)
from graspfusion.errors import BadParameterError, ImpossibleObservationError
from graspfusion.simbench import World

FOCUS = GraspTaxonomy.focus()


# ---------------------------------------------------------------------------
# Independent brute-force oracle: plain-Python loops, no shared code paths
# with the simulator beyond the World's raw fields.
# ---------------------------------------------------------------------------

def oracle_posterior(world, i, o):
    weights = [
        float(world.prior.probs[g])
        * float(world.p_image_given_grasp[g][i])
        * float(world.p_object_given_grasp[g][o])
        for g in range(len(world.taxonomy))
    ]
    total = sum(weights)
    return [w / total for w in weights]


def oracle_cue_posterior(world, matrix, symbol):
    weights = [float(world.prior.probs[g]) * float(matrix[g][symbol])
               for g in range(len(world.taxonomy))]
    total = sum(weights)
    return [w / total for w in weights]


def oracle_expected_accuracy(world, rule):
    n_g = len(world.taxonomy)
    total = 0.0
    for i in range(world.image_count):
        for o in range(world.object_count):
            joint = [
                float(world.prior.probs[g])
                * float(world.p_image_given_grasp[g][i])
                * float(world.p_object_given_grasp[g][o])
                for g in range(n_g)
            ]
            if sum(joint) == 0:
                continue
            if rule == "cnn":
                post = oracle_cue_posterior(world, world.p_image_given_grasp, i)
            elif rule == "affordance":
                post = oracle_cue_posterior(world, world.p_object_given_grasp, o)
            else:
                post = oracle_posterior(world, i, o)
            decision = post.index(max(post))
            total += joint[decision]
    return total


def deterministic_world():
    """Each grasp emits a unique (i, o): posteriors are one-hot."""
    eye = np.eye(3)
    taxonomy = GraspTaxonomy(FOCUS.labels[:3])
    return World(
        taxonomy,
        GraspDistribution(taxonomy, [1 / 3] * 3),
        eye.copy(), eye.copy(), seed=0,
    )


class TestGenerateWorld:
    def test_deterministic_for_seed(self):
        a = generate_world(11, 3, 4, 5, 1.0)
        b = generate_world(11, 3, 4, 5, 1.0)
        np.testing.assert_array_equal(a.prior.probs, b.prior.probs)
        np.testing.assert_array_equal(a.p_image_given_grasp, b.p_image_given_grasp)
        np.testing.assert_array_equal(a.p_object_given_grasp, b.p_object_given_grasp)

    def test_rows_stochastic(self):
        w = generate_world(5)
        np.testing.assert_allclose(w.p_image_given_grasp.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(w.p_object_given_grasp.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(w.p_image_given_grasp >= 0)

    def test_large_concentration_near_uniform(self):
        worst = 0.0
        for seed in range(100):
            w = generate_world(seed, 4, 5, 5, concentration=1e4)
            worst = max(worst, float(np.abs(w.p_image_given_grasp - 0.2).max()))
        assert worst < 0.05

    @pytest.mark.parametrize("kwargs", [
        dict(g_count=5), dict(g_count=1),
        dict(i_count=1), dict(i_count=6),
        dict(o_count=1), dict(o_count=6),
        dict(concentration=0.0), dict(concentration=-1.0),
    ])
    def test_bad_parameters(self, kwargs):
        with pytest.raises(BadParameterError):
            generate_world(0, **{**dict(g_count=4, i_count=5, o_count=5,
                                        concentration=1.0), **kwargs})


class TestExactPosterior:
    def test_deterministic_world_one_hot(self):
        w = deterministic_world()
        for g in range(3):
            post = exact_posterior(w, g, g)
            expected = [0.0] * 3
            expected[g] = 1.0
            assert post.probs.tolist() == expected

    def test_uniform_world_uniform_posterior(self):
        taxonomy = GraspTaxonomy(FOCUS.labels[:2])
        w = World(taxonomy, GraspDistribution(taxonomy, [0.5, 0.5]),
                  np.full((2, 3), 1 / 3), np.full((2, 2), 0.5), seed=0)
        np.testing.assert_allclose(exact_posterior(w, 1, 0).probs, [0.5, 0.5],
                                   atol=1e-15)

    def test_matches_oracle_on_seeded_world(self):
        w = generate_world(42, 3, 3, 3, 1.0)
        for i in range(3):
            for o in range(3):
                np.testing.assert_allclose(
                    exact_posterior(w, i, o).probs, oracle_posterior(w, i, o),
                    atol=1e-12)

    def test_impossible_observation(self):
        w = deterministic_world()
        with pytest.raises(ImpossibleObservationError):
            exact_posterior(w, 0, 1)


class TestCuePosterior:
    def test_one_hot_emission(self):
        w = deterministic_world()
        post = cue_posterior(w, "image", 2)
        assert post.probs.tolist() == [0.0, 0.0, 1.0]

    def test_uniform_emissions_give_prior(self):
        taxonomy = GraspTaxonomy(FOCUS.labels[:2])
        prior = GraspDistribution(taxonomy, [0.3, 0.7])
        w = World(taxonomy, prior, np.full((2, 4), 0.25), np.full((2, 2), 0.5),
                  seed=0)
        np.testing.assert_allclose(cue_posterior(w, "image", 1).probs, prior.probs,
                                   atol=1e-15)

    def test_matches_oracle(self):
        w = generate_world(42, 3, 3, 3, 1.0)
        for i in range(3):
            np.testing.assert_allclose(
                cue_posterior(w, "image", i).probs,
                oracle_cue_posterior(w, w.p_image_given_grasp, i), atol=1e-12)
            np.testing.assert_allclose(
                cue_posterior(w, "object", i).probs,
                oracle_cue_posterior(w, w.p_object_given_grasp, i), atol=1e-12)


class TestFusionIdentity:
    def test_deterministic_world_exact(self):
        assert fusion_identity_error(deterministic_world()) == 0.0

    def test_seeded_worlds_within_tolerance(self):
        for seed in range(50):
            assert fusion_identity_error(generate_world(seed)) <= 1e-9


class TestExpectedAccuracy:
    def test_deterministic_world_perfect(self):
        w = deterministic_world()
        for rule in ("cnn", "affordance", "fused"):
            assert expected_accuracy(w, rule) == pytest.approx(1.0, abs=1e-15)

    def test_uninformative_object_cue(self):
        base = generate_world(9, 3, 4, 4, 1.0)
        w = World(base.taxonomy, base.prior, base.p_image_given_grasp,
                  np.full((3, 4), 0.25), seed=9)
        assert expected_accuracy(w, "fused") == pytest.approx(
            expected_accuracy(w, "cnn"), abs=1e-15)

    def test_matches_oracle_and_dominates(self):
        for seed in range(30):
            w = generate_world(seed, 4, 4, 4, 1.0)
            acc = {}
            for rule in ("cnn", "affordance", "fused"):
                acc[rule] = expected_accuracy(w, rule)
                assert acc[rule] == pytest.approx(
                    oracle_expected_accuracy(w, rule), abs=1e-12)
            assert acc["fused"] >= acc["cnn"] - 1e-12
            assert acc["fused"] >= acc["affordance"] - 1e-12

    def test_base_rate_floor(self):
        for seed in range(20):
            w = generate_world(seed)
            floor = float(w.prior.probs.max())
            for rule in ("cnn", "affordance", "fused"):
                assert expected_accuracy(w, rule) >= floor - 1e-12


class TestSampleDataset:
    def test_single_sample(self):
        w = generate_world(1)
        ds = sample_dataset(w, 1, 123)
        assert len(ds.scores) == 1
        assert len(ds.affordance_records) == 1

    def test_bad_n(self):
        with pytest.raises(BadParameterError):
            sample_dataset(generate_world(1), 0, 0)

    def test_byte_identical_output(self, tmp_path):
        w = generate_world(3)
        for run in ("a", "b"):
            write_scores(sample_dataset(w, 200, 77).scores, tmp_path / f"{run}.jsonl")
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_scores_are_cue_posteriors(self):
        w = generate_world(3)
        ds = sample_dataset(w, 50, 8)
        for sample, record in zip(ds.samples, ds.scores.records):
            np.testing.assert_array_equal(
                record.scores.probs,
                cue_posterior(w, "image", sample.image_symbol).probs)
            assert record.object_name == f"obj_{sample.object_symbol}"
            assert record.true_grasp == sample.grasp

    def test_law_of_large_numbers(self):
        w = generate_world(21)
        ds = sample_dataset(w, 100_000, 5)
        db = build(ds.affordance_records, w.taxonomy)
        object_counts = {}
        for record in ds.affordance_records:
            object_counts[record.object_name] = object_counts.get(record.object_name, 0) + 1
        checked = 0
        for o in range(w.object_count):
            name = f"obj_{o}"
            if object_counts.get(name, 0) < 1000:
                continue
            true_conditional = cue_posterior(w, "object", o)
            empirical = db.entries[name].prob
            l1 = float(np.abs(empirical.probs - true_conditional.probs).sum())
            assert l1 < 0.05, f"object {o}: L1 {l1}"
            checked += 1
        assert checked > 0
