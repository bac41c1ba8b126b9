import numpy as np
import pytest

from spacerank.corpus import Observation, RatingEvent, build_profiles
from spacerank.errors import FormatError
from spacerank.hsoftmax import build_huffman, build_vocabulary, hs_probability, new_node_matrix
from spacerank.spaces import (
    EmbeddingSpace,
    SpaceTrainConfig,
    build_vsm_space,
    export_vectors,
    load_space,
    save_space,
    train_space,
)


def shared_token_corpus():
    """Items 1 and 2 share every token; item 3 shares none."""
    obs = []
    for token in ("u1_r2", "u2_r2", "u3_r1", "u4_r2", "u5_r1", "u6_r2"):
        for item in (1, 2):
            obs.extend([Observation(item, token)] * 3)
    for token in ("u7_r2", "u8_r1", "u9_r2", "u10_r2", "u11_r1", "u12_r2"):
        obs.extend([Observation(3, token)] * 3)
    return obs


def cosine(a, b):
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


class TestTrainSpace:
    def test_vanishing_alpha_keeps_initialization(self):
        obs = shared_token_corpus()
        trained = train_space(obs, SpaceTrainConfig(8, iterations=1, alpha0=1e-12, seed=4))
        rng = np.random.default_rng(4)
        init = rng.uniform(-0.5 / 8, 0.5 / 8, size=(3, 8)).astype(np.float32)
        np.testing.assert_allclose(trained.matrix, init, atol=1e-9)

    def test_cooccurrence_pulls_items_together(self):
        space = train_space(shared_token_corpus(), SpaceTrainConfig(8, iterations=200, seed=3))
        v1, v2, v3 = (space.vector(i) for i in (1, 2, 3))
        assert cosine(v1, v2) > cosine(v1, v3)

    def test_single_worker_determinism(self):
        obs = shared_token_corpus()
        config = SpaceTrainConfig(6, iterations=5, seed=11)
        assert train_space(obs, config) == train_space(obs, config)

    def test_empty_stream_rejected(self):
        with pytest.raises(ValueError):
            train_space([], SpaceTrainConfig(4))

    def test_training_reduces_mean_loss(self):
        # 50 items, 20 tokens, structured so there is something to learn.
        rng = np.random.default_rng(9)
        obs = []
        for item in range(50):
            for _ in range(12):
                token = f"t{(item % 5) * 4 + int(rng.integers(4))}"
                obs.append(Observation(item, token))
        vocab = build_vocabulary(obs)
        tree = build_huffman(vocab)
        d = 8

        def mean_loss(space, nodes):
            losses = [
                -np.log(hs_probability(space.vector(o.item_id), o.token, vocab, tree, nodes))
                for o in obs
            ]
            return float(np.mean(losses))

        trained = train_space(obs, SpaceTrainConfig(d, iterations=30, seed=2))
        init_rng = np.random.default_rng(2)
        init_matrix = init_rng.uniform(-0.5 / d, 0.5 / d, size=(50, d)).astype(np.float32)
        untrained = EmbeddingSpace(d, sorted({o.item_id for o in obs}), init_matrix)
        # Zero nodes make every branch 0.5, so the initial loss is exactly
        # the mean code length times log 2.
        initial = mean_loss(untrained, new_node_matrix(tree, d))
        assert mean_loss(trained, trained.hs_nodes) < initial

    def test_multiworker_runs(self):
        obs = shared_token_corpus()
        space = train_space(obs, SpaceTrainConfig(4, iterations=3, seed=1, workers=2))
        assert len(space) == 3 and np.isfinite(space.matrix).all()


class TestVsmSpace:
    def test_single_rater_unit_vector(self):
        events = [RatingEvent(5, 40, 4, 0)]
        profiles = build_profiles(events)
        space = build_vsm_space(events, profiles)
        np.testing.assert_array_equal(space.vector(40), np.array([1.0], dtype=np.float32))

    def test_unrated_item_zero_vector(self):
        events = [RatingEvent(1, 10, 4, 0), RatingEvent(2, 10, 5, 0)]
        space = build_vsm_space(events, build_profiles(events), item_ids=[10, 99])
        assert np.all(space.vector(99) == 0)

    def test_identical_ratings_identical_vectors(self):
        events = [
            RatingEvent(1, 10, 4, 0), RatingEvent(2, 10, 2, 0),
            RatingEvent(1, 11, 4, 1), RatingEvent(2, 11, 2, 1),
        ]
        space = build_vsm_space(events, build_profiles(events))
        np.testing.assert_array_equal(space.vector(10), space.vector(11))

    def test_norms_are_unit_or_zero(self):
        rng = np.random.default_rng(0)
        events = []
        seen = set()
        for _ in range(300):
            u, i = int(rng.integers(1, 30)), int(rng.integers(1, 60))
            if (u, i) not in seen:
                seen.add((u, i))
                events.append(RatingEvent(u, i, int(rng.integers(1, 6)), 0))
        space = build_vsm_space(events, build_profiles(events))
        norms = np.linalg.norm(space.matrix, axis=1)
        assert np.all((np.abs(norms - 1.0) <= 1e-12) | (norms == 0))
        assert space.provenance == "vsm"
        assert space.dimensions == 29


class TestSpaceFiles:
    def make_space(self):
        matrix = np.array([[0.5, -1.0, 0.25], [1e-7, 3.5, -2.25]], dtype=np.float32)
        return EmbeddingSpace(3, [240, 7], matrix, "cf")

    def test_round_trip_identity(self, tmp_path):
        space = self.make_space()
        path = tmp_path / "s.space"
        save_space(space, path)
        assert load_space(path) == space

    def test_round_trip_awkward_floats(self, tmp_path):
        rng = np.random.default_rng(5)
        matrix = (rng.normal(size=(20, 6)) * 10.0 ** rng.integers(-8, 8, size=(20, 6))).astype(
            np.float32
        )
        space = EmbeddingSpace(6, list(range(20)), matrix, "cb")
        path = tmp_path / "s.space"
        save_space(space, path)
        loaded = load_space(path)
        assert np.array_equal(loaded.matrix, space.matrix)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "s.space"
        save_space(self.make_space(), path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(FormatError):
            load_space(path)

    def test_header_without_provenance_accepted(self, tmp_path):
        path = tmp_path / "s.space"
        path.write_text("2 3\n1 0.0 1.0 2.0\n2 3.0 4.0 5.0\n")
        space = load_space(path)
        assert space.provenance is None and len(space) == 2

    def test_wrong_value_count(self, tmp_path):
        path = tmp_path / "s.space"
        path.write_text("1 3 cf\n1 0.0 1.0\n")
        with pytest.raises(FormatError):
            load_space(path)

    def test_export_format_and_round_trip(self, tmp_path):
        space = EmbeddingSpace(2, [240], np.array([[0.5, -1.0]], dtype=np.float32))
        path = tmp_path / "vecs.txt"
        export_vectors(space, path)
        assert path.read_text().splitlines() == ["1 2", "240 0.5 -1.0"]
        assert load_space(path) == space

    def test_export_empty_space(self, tmp_path):
        space = EmbeddingSpace(4, [], np.zeros((0, 4), dtype=np.float32))
        path = tmp_path / "vecs.txt"
        export_vectors(space, path)
        assert path.read_text() == "0 4\n"

    def test_vsm_round_trip_keeps_double_precision(self, tmp_path):
        events = [RatingEvent(1, 10, 4, 0), RatingEvent(2, 10, 5, 0), RatingEvent(1, 11, 2, 1)]
        space = build_vsm_space(events, build_profiles(events))
        path = tmp_path / "v.space"
        save_space(space, path)
        loaded = load_space(path)
        assert loaded == space
        assert loaded.matrix.dtype == np.float64
