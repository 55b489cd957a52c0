"""Probe math and synthetic oracle scorer tests."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from segbudget.errors import DimensionMismatch, EmptySegment
from segbudget.relevance import (
    RelevanceProbe,
    ScorerSpec,
    oracle_score,
    probe_score,
    score_episode,
    sigmoid,
)

finite_vec = arrays(
    float,
    st.integers(1, 8),
    elements=st.floats(min_value=-50, max_value=50, allow_nan=False),
)


def probe_from_diff(diff):
    diff = np.asarray(diff, dtype=float)
    return RelevanceProbe(w_yes=diff, w_no=np.zeros_like(diff))


class TestProbeScore:
    def test_identical_weights_give_half(self):
        w = np.array([0.3, -1.2, 4.0])
        probe = RelevanceProbe(w_yes=w, w_no=w.copy())
        assert probe_score(probe, np.array([9.0, -2.0, 0.5])) == 0.5

    def test_orthogonal_hidden_state_gives_half(self):
        probe = probe_from_diff([1.0, 1.0])
        assert probe_score(probe, np.array([1.0, -1.0])) == 0.5

    def test_log2_worked_value(self):
        probe = probe_from_diff([1.0, 1.0])
        s = probe_score(probe, np.array([math.log(2.0), 0.0]))
        assert s == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_dimension_mismatch(self):
        probe = probe_from_diff([1.0, 1.0])
        with pytest.raises(DimensionMismatch):
            probe_score(probe, np.array([1.0, 2.0, 3.0]))

    @given(finite_vec)
    @settings(deadline=None)
    def test_strictly_inside_unit_interval(self, h):
        probe = probe_from_diff(np.ones_like(h) * 40.0)
        s = probe_score(probe, h)
        assert 0.0 < s < 1.0

    @given(finite_vec)
    @settings(deadline=None)
    def test_antisymmetry_under_swap(self, h):
        w_yes = np.linspace(-1.0, 2.0, h.shape[0])
        w_no = np.linspace(0.5, -0.5, h.shape[0])
        fwd = probe_score(RelevanceProbe(w_yes=w_yes, w_no=w_no), h)
        rev = probe_score(RelevanceProbe(w_yes=w_no, w_no=w_yes), h)
        assert fwd == pytest.approx(1.0 - rev, abs=1e-12)

    def test_positive_scaling_preserves_ranking(self):
        rng = np.random.default_rng(3)
        states = rng.normal(size=(16, 6))
        diff = rng.normal(size=6)
        for c in (0.1, 3.0, 17.0):
            base = [probe_score(probe_from_diff(diff), h) for h in states]
            scaled = [probe_score(probe_from_diff(c * diff), h) for h in states]
            assert np.argsort(base).tolist() == np.argsort(scaled).tolist()

    def test_extreme_logits_stay_open(self):
        probe = probe_from_diff([1e6])
        assert probe_score(probe, np.array([1e6])) < 1.0
        assert probe_score(probe, np.array([-1e6])) > 0.0


class TestSigmoid:
    def test_midpoint(self):
        assert sigmoid(0.0) == 0.5

    @given(st.floats(min_value=-700, max_value=700))
    def test_complement(self, z):
        assert sigmoid(z) + sigmoid(-z) == pytest.approx(1.0, abs=1e-12)


class TestOracleScore:
    def test_exact_match_sharpness_ten(self):
        q = np.array([1.0, 0.0, 0.0])
        spec = ScorerSpec(noise_sigma=0.0, sharpness=10.0)
        content = [np.array([0.0, 1.0, 0.0]), q.copy()]
        assert oracle_score(spec, q, content) == pytest.approx(sigmoid(5.0), abs=1e-12)
        assert oracle_score(spec, q, content) == pytest.approx(0.9933, abs=1e-4)

    def test_orthogonal_content(self):
        q = np.array([1.0, 0.0])
        spec = ScorerSpec(noise_sigma=0.0, sharpness=10.0)
        content = [np.array([0.0, 1.0]), np.array([0.0, -1.0])]
        assert oracle_score(spec, q, content) == pytest.approx(0.0067, abs=1e-4)

    def test_midpoint_similarity_gives_half(self):
        # cos = 1.0 / (1.0 * 2.0) = 0.5 exactly, so the logit is exactly zero
        q = np.array([1.0, 0.0, 0.0, 0.0])
        atom = np.array([1.0, 1.0, 1.0, 1.0])
        for sharpness in (1.0, 10.0, 55.0):
            spec = ScorerSpec(noise_sigma=0.0, sharpness=sharpness)
            assert oracle_score(spec, q, [atom]) == 0.5

    def test_empty_content(self):
        with pytest.raises(EmptySegment):
            oracle_score(ScorerSpec(), np.array([1.0, 0.0]), [])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            oracle_score(ScorerSpec(), np.array([1.0, 0.0]), [np.array([1.0, 0.0, 0.0])])

    def test_noise_moves_score_deterministically(self):
        q = np.array([1.0, 0.0])
        spec = ScorerSpec(noise_sigma=0.5, sharpness=10.0, seed=9)
        a = oracle_score(spec, q, [q])
        b = oracle_score(spec, q, [q])
        assert a == b  # fresh generator from spec.seed each call
        assert a != oracle_score(ScorerSpec(noise_sigma=0.0, sharpness=10.0), q, [q])

    def test_noise_free_is_monotone_in_similarity(self):
        q = np.array([1.0, 0.0])
        spec = ScorerSpec(noise_sigma=0.0, sharpness=10.0)
        angles = np.linspace(0.0, math.pi, 9)
        scores = [
            oracle_score(spec, q, [np.array([math.cos(a), math.sin(a)])]) for a in angles
        ]
        assert scores == sorted(scores, reverse=True)


class TestScoreEpisode:
    def test_single_segment(self):
        q = np.array([1.0, 0.0])
        vec = score_episode(ScorerSpec(), q, [[q]])
        assert len(vec) == 1

    def test_needle_attains_maximum(self):
        from segbudget.episodes import EpisodeSpec, generate_episode

        spec = EpisodeSpec(n_segments=16, seed=21, query_noise_sigma=0.0)
        segments, query, needle_id = generate_episode(spec)
        needle_segment = next(
            i for i, seg in enumerate(segments) if needle_id in seg.atom_ids
        )
        vec = score_episode(ScorerSpec(noise_sigma=0.0), query, segments)
        assert vec.scores.index(max(vec.scores)) == needle_segment

    def test_fixed_seed_is_reproducible(self):
        rng = np.random.default_rng(11)
        q = rng.normal(size=4)
        segments = [rng.normal(size=(3, 4)) for _ in range(5)]
        spec = ScorerSpec(noise_sigma=0.3, seed=77)
        assert score_episode(spec, q, segments) == score_episode(spec, q, segments)

    def test_error_carries_segment_index(self):
        q = np.array([1.0, 0.0])
        segments = [np.array([[0.0, 1.0]]), np.array([[0.0, 1.0, 2.0]])]
        with pytest.raises(DimensionMismatch, match="segment 1"):
            score_episode(ScorerSpec(), q, segments)

    def test_probe_path_scores_hidden_states(self):
        probe = probe_from_diff([2.0, 0.0])
        states = [np.array([1.0, 0.0]), np.array([-1.0, 0.0]), np.array([0.0, 5.0])]
        vec = score_episode(probe, None, states)
        assert vec.scores[0] > vec.scores[2] > vec.scores[1]
        assert vec.scores[2] == 0.5

    def test_no_segments(self):
        with pytest.raises(EmptySegment):
            score_episode(ScorerSpec(), np.array([1.0]), [])
