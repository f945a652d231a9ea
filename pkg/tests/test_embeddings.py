import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mira import (
    EmbeddingSet,
    ProbDistribution,
    aggregate_track,
    cosine_score,
    kl_divergence,
    load_embedding_set,
    read_embedding_file,
    read_prob_file,
    symmetric_kl,
    write_embedding_file,
    write_prob_file,
)
from mira.errors import (
    ConfigurationError,
    CorruptFileError,
    DegenerateInputError,
    DimensionError,
    EmptyInputError,
    FormatError,
    MissingEntryError,
)


def make_manifest(tmp_path, tracks, model_id="builtin"):
    mpath = tmp_path / "emb_manifest.json"
    mpath.write_text(json.dumps({"model_id": model_id, "tracks": tracks}))
    return mpath


class TestEmbeddingFiles:
    def test_roundtrip(self, tmp_path, rng):
        matrix = rng.standard_normal((7, 16)).astype(np.float32)
        path = tmp_path / "a.emb"
        write_embedding_file(path, matrix)
        back = read_embedding_file(path)
        assert back.shape == (7, 16)
        assert np.allclose(back, matrix.astype(np.float64))

    def test_bad_magic_is_format_error(self, tmp_path):
        path = tmp_path / "bad.emb"
        write_embedding_file(path, np.zeros((2, 4)))
        data = bytearray(path.read_bytes())
        data[7] = ord("2")  # MIRAEMB1 -> MIRAEMB2
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError, match="magic"):
            read_embedding_file(path)

    def test_truncated_is_corrupt_error(self, tmp_path):
        path = tmp_path / "short.emb"
        write_embedding_file(path, np.zeros((4, 4)))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(CorruptFileError):
            read_embedding_file(path)

    def test_nan_rejected(self, tmp_path):
        path = tmp_path / "nan.emb"
        matrix = np.zeros((2, 3))
        matrix[1, 1] = np.nan
        write_embedding_file(path, matrix)
        with pytest.raises(FormatError, match="NaN"):
            read_embedding_file(path)


class TestLoadEmbeddingSet:
    def test_two_tracks_loaded(self, tmp_path, rng):
        write_embedding_file(tmp_path / "a.emb", rng.random((3, 16)))
        write_embedding_file(tmp_path / "b.emb", rng.random((5, 16)))
        manifest = make_manifest(tmp_path, {"a": "a.emb", "b": "b.emb"})
        es = load_embedding_set(manifest, "builtin")
        assert set(es.entries) == {"a", "b"}
        assert es.dim == 16

    def test_dim_mismatch_is_format_error(self, tmp_path, rng):
        write_embedding_file(tmp_path / "a.emb", rng.random((3, 16)))
        write_embedding_file(tmp_path / "b.emb", rng.random((3, 512)))
        manifest = make_manifest(tmp_path, {"a": "a.emb", "b": "b.emb"})
        with pytest.raises(FormatError, match="dim"):
            load_embedding_set(manifest, "builtin")

    def test_missing_file_names_track(self, tmp_path, rng):
        write_embedding_file(tmp_path / "a.emb", rng.random((3, 16)))
        manifest = make_manifest(tmp_path, {"a": "a.emb", "ghost": "ghost.emb"})
        with pytest.raises(MissingEntryError, match="ghost"):
            load_embedding_set(manifest, "builtin")

    def test_model_id_mismatch(self, tmp_path):
        manifest = make_manifest(tmp_path, {}, model_id="clap")
        with pytest.raises(ConfigurationError):
            load_embedding_set(manifest, "builtin")


class TestProbFiles:
    def test_roundtrip(self, tmp_path):
        rows = np.array([[0.25, 0.25, 0.5]])
        path = tmp_path / "p.prb"
        write_prob_file(path, rows)
        assert np.allclose(read_prob_file(path), rows)

    def test_non_distribution_rejected(self, tmp_path):
        path = tmp_path / "bad.prb"
        write_prob_file(path, np.array([[0.9, 0.9]]))
        with pytest.raises(FormatError):
            read_prob_file(path)


class TestAggregateTrack:
    def test_single_frame_normalized(self):
        assert np.allclose(aggregate_track(np.array([[3.0, 4.0]])), [0.6, 0.8])

    def test_mean_then_normalize(self):
        v = aggregate_track(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert np.allclose(v, [1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_zero_frames_stay_zero(self):
        assert np.array_equal(aggregate_track(np.zeros((3, 4))), np.zeros(4))

    def test_empty_raises(self):
        with pytest.raises(EmptyInputError):
            aggregate_track(np.zeros((0, 4)))


class TestCosineScore:
    def test_self_is_one(self):
        v = np.array([0.3, -0.4, 1.0])
        assert cosine_score(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_is_zero(self):
        assert cosine_score(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(0.0, abs=1e-12)

    def test_45_degrees(self):
        a = np.array([1.0, 0.0])
        b = np.array([1.0, 1.0]) / math.sqrt(2)
        assert cosine_score(a, b) == pytest.approx(math.sqrt(0.5), abs=1e-9)

    def test_scale_invariance(self, rng):
        a = rng.standard_normal(8)
        b = rng.standard_normal(8)
        assert abs(cosine_score(17.3 * a, b) - cosine_score(a, b)) < 1e-9

    def test_zero_vector_degenerate(self):
        with pytest.raises(DegenerateInputError):
            cosine_score(np.zeros(3), np.ones(3))

    def test_dim_mismatch(self):
        with pytest.raises(DimensionError):
            cosine_score(np.ones(3), np.ones(4))


class TestKlDivergence:
    def test_identity_is_zero(self):
        p = ProbDistribution(np.array([0.2, 0.3, 0.5]))
        assert kl_divergence(p, p) == pytest.approx(0.0, abs=1e-12)

    def test_point_mass_vs_uniform(self):
        # oracle: direct formula with smoothing eps=1e-10 -> ln 2
        p = ProbDistribution(np.array([1.0, 0.0]))
        q = ProbDistribution(np.array([0.5, 0.5]))
        assert kl_divergence(p, q, eps=1e-10) == pytest.approx(math.log(2), abs=1e-4)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            kl_divergence(ProbDistribution(np.array([1.0])), ProbDistribution(np.array([0.5, 0.5])))

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_gibbs_inequality(self, seed):
        gen = np.random.default_rng(seed)
        p = gen.random(6)
        q = gen.random(6)
        kl = kl_divergence(ProbDistribution(p / p.sum()), ProbDistribution(q / q.sum()))
        assert kl >= -1e-12

    def test_continuity_at_zero_entries(self):
        base = np.array([0.5, 0.5, 0.0])
        bumped = np.array([0.5, 0.5, 1e-11])
        q = ProbDistribution(np.array([0.2, 0.3, 0.5]))
        a = kl_divergence(ProbDistribution(base / base.sum()), q)
        b = kl_divergence(ProbDistribution(bumped / bumped.sum()), q)
        assert abs(a - b) < 1e-6


class TestSymmetricKl:
    def test_symmetry_exact(self, rng):
        p = rng.random(5)
        q = rng.random(5)
        p = ProbDistribution(p / p.sum())
        q = ProbDistribution(q / q.sum())
        assert symmetric_kl(p, q) == symmetric_kl(q, p)

    def test_identity_zero(self):
        p = ProbDistribution(np.full(4, 0.25))
        assert symmetric_kl(p, p) == pytest.approx(0.0, abs=1e-12)

    def test_hand_computed_value(self):
        # oracle: KL(p||q) = 0.9 ln 9 - 0.1 ln 9 = 0.8 ln 9 and same reversed
        p = ProbDistribution(np.array([0.9, 0.1]))
        q = ProbDistribution(np.array([0.1, 0.9]))
        assert symmetric_kl(p, q) == pytest.approx(0.8 * math.log(9), abs=1e-4)


class TestProbDistribution:
    def test_sum_tolerance_enforced(self):
        with pytest.raises(ValueError):
            ProbDistribution(np.array([0.7, 0.2]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            ProbDistribution(np.array([1.1, -0.1]))


def test_embedding_set_holds_dim():
    es = EmbeddingSet("m", {"a": np.zeros((2, 8))}, 8)
    assert es.dim == 8 and es.model_id == "m"
