"""Allocator unit and property tests."""

from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segbudget.allocation import (
    AllocationConfig,
    MemoryBlock,
    NormalizedScores,
    ScoreVector,
    allocate,
    distribute_remainders,
    empty_block,
    head_truncate,
    ideal_allocation,
    normalize_scores,
    residual_allocation,
    tail_truncate,
)
from segbudget.errors import (
    BudgetInfeasible,
    ConfigError,
    EmptyScores,
    TruncationOutOfRange,
)

from oracle import is_weakly_monotone, reference_allocate

scores_strategy = st.lists(
    st.floats(min_value=1e-6, max_value=1.0 - 1e-6, allow_nan=False), min_size=1, max_size=40
)


def make_config(b_max, k_min=4, k_max=128, **kw):
    return AllocationConfig(b_max=b_max, k_min=k_min, k_max=k_max, **kw)


class TestNormalizeScores:
    def test_endpoints_map_to_unit_interval(self):
        norm = normalize_scores([0.2, 0.8])
        assert norm.values == (0.0, 1.0)

    def test_degenerate_spread_is_all_zeros(self):
        norm = normalize_scores([0.5, 0.5])
        assert norm.values == (0.0, 0.0)
        assert norm.spread == 0.0

    def test_three_point_minmax(self):
        # (0.5 - 0.1) / (0.9 - 0.1) = 0.5 exactly in binary floating point
        norm = normalize_scores([0.1, 0.9, 0.5])
        assert norm.values == (0.0, 1.0, 0.5)

    def test_empty_rejected(self):
        with pytest.raises(EmptyScores):
            normalize_scores([])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            normalize_scores([0.5, 1.0])

    @given(scores_strategy)
    def test_output_in_unit_interval_with_extremes(self, scores):
        norm = normalize_scores(scores)
        assert all(0.0 <= v <= 1.0 for v in norm.values)
        assert len(norm.values) == len(scores)
        if norm.spread > 1e-6:
            assert max(norm.values) == 1.0
            assert min(norm.values) == 0.0


class TestIdealAllocation:
    def test_hand_worked_mapping(self):
        norm = NormalizedScores(values=(1.0, 0.0, 0.5), spread=1.0)
        assert ideal_allocation(norm, make_config(1000)) == [128, 4, 66]

    def test_zero_scores_take_floor(self):
        norm = NormalizedScores(values=(0.0, 0.0), spread=0.0)
        assert ideal_allocation(norm, make_config(1000)) == [4, 4]

    def test_collapsed_range_forces_cap(self):
        norm = NormalizedScores(values=(1.0,), spread=1.0)
        assert ideal_allocation(norm, make_config(1000, k_min=8, k_max=8)) == [8]


class TestResidualAllocation:
    def test_hand_worked_floors_and_remainders(self):
        norm = NormalizedScores(values=(1.0, 0.0, 0.5), spread=0.8)
        floors, rem = residual_allocation(norm, make_config(100))
        assert floors == [62, 4, 33]
        assert rem[0] == pytest.approx(0.6667, abs=1e-3)
        assert rem[1] == 0.0
        assert rem[2] == pytest.approx(0.3333, abs=1e-3)

    def test_all_zero_scores_keep_floor(self):
        norm = NormalizedScores(values=(0.0, 0.0, 0.0), spread=0.0)
        floors, rem = residual_allocation(norm, make_config(100))
        assert floors == [4, 4, 4]
        assert rem == [0.0, 0.0, 0.0]

    def test_single_segment_absorbs_residual_up_to_cap(self):
        norm = NormalizedScores(values=(1.0,), spread=0.9)
        floors, _ = residual_allocation(norm, make_config(500))
        assert floors == [128]  # min(k_max, k_min + B_res)

    def test_infeasible_budget(self):
        norm = NormalizedScores(values=(1.0, 0.0), spread=0.9)
        with pytest.raises(BudgetInfeasible):
            residual_allocation(norm, make_config(7))


class TestDistributeRemainders:
    def test_leftover_goes_to_largest_remainder(self):
        norm = NormalizedScores(values=(1.0, 0.0, 0.5), spread=0.8)
        out = distribute_remainders([62, 4, 33], [0.667, 0.0, 0.333], norm, make_config(100))
        assert out == [63, 4, 33]

    def test_zero_leftover_unchanged(self):
        norm = NormalizedScores(values=(1.0, 0.0), spread=0.8)
        out = distribute_remainders([90, 10], [0.5, 0.5], norm, make_config(100))
        assert out == [90, 10]

    def test_all_capped_unchanged(self):
        norm = NormalizedScores(values=(1.0, 1.0), spread=0.8)
        out = distribute_remainders([128, 128], [0.9, 0.9], norm, make_config(261))
        assert out == [128, 128]

    def test_tie_broken_by_higher_normalized_score(self):
        norm = NormalizedScores(values=(0.2, 0.8), spread=0.5)
        out = distribute_remainders([10, 10], [0.5, 0.5], norm, make_config(21, k_min=0))
        assert out == [10, 11]

    def test_round_robin_when_leftover_exceeds_one_pass(self):
        norm = NormalizedScores(values=(1.0, 0.0), spread=0.5)
        out = distribute_remainders([4, 4], [0.4, 0.1], norm, make_config(13, k_min=4, k_max=10))
        assert out == [7, 6]


class TestAllocate:
    def test_stage1_worked_example(self):
        plan = allocate([0.9, 0.1, 0.5], make_config(200))
        assert plan.budgets == (128, 4, 66)
        assert plan.stage == "ideal-adopted"
        assert plan.total == 198
        assert plan.b_base == 12

    def test_stage2_worked_example(self):
        plan = allocate([0.9, 0.1, 0.5], make_config(100))
        assert plan.budgets == (63, 4, 33)
        assert plan.stage == "residual-distributed"
        assert plan.total == 100
        assert plan.b_res == 88

    def test_infeasible_budget(self):
        with pytest.raises(BudgetInfeasible):
            allocate([0.9, 0.1, 0.5], make_config(10))

    def test_empty_scores(self):
        with pytest.raises(EmptyScores):
            allocate([], make_config(100))

    def test_all_equal_scores_take_k_min(self):
        plan = allocate([0.4, 0.4, 0.4], make_config(100))
        assert plan.budgets == (4, 4, 4)

    def test_uniform_fallback_splits_evenly(self):
        plan = allocate([0.4, 0.4, 0.4], make_config(100, uniform_fallback=True))
        assert plan.budgets == (33, 33, 33)

    def test_uniform_fallback_respects_cap(self):
        plan = allocate([0.4, 0.4], make_config(400, uniform_fallback=True))
        assert plan.budgets == (128, 128)

    @given(scores_strategy, st.integers(0, 12), st.integers(1, 140), st.integers(0, 4000))
    @settings(max_examples=300, deadline=None)
    def test_invariants_and_oracle_equivalence(self, scores, k_min, k_span, extra):
        k_max = k_min + max(k_span, 1)
        n = len(scores)
        cfg = AllocationConfig(b_max=n * k_min + extra, k_min=k_min, k_max=k_max)
        plan = allocate(scores, cfg)

        assert plan.total == sum(plan.budgets) <= cfg.b_max
        assert all(cfg.k_min <= k <= cfg.k_max for k in plan.budgets)
        assert is_weakly_monotone(list(scores), list(plan.budgets))

        expect, stage = reference_allocate(list(scores), cfg.b_max, k_min, k_max)
        assert list(plan.budgets) == expect
        assert plan.stage == stage

    @given(scores_strategy)
    @settings(max_examples=100, deadline=None)
    def test_stage1_exactness(self, scores):
        cfg = make_config(10**6)
        plan = allocate(scores, cfg)
        assert plan.stage == "ideal-adopted"
        assert list(plan.budgets) == ideal_allocation(normalize_scores(scores, cfg.epsilon), cfg)

    def test_determinism(self):
        rng = random.Random(5)
        scores = [rng.uniform(0.01, 0.99) for _ in range(20)]
        cfg = make_config(300, k_max=64)
        assert allocate(scores, cfg) == allocate(scores, cfg)

    def test_score_vector_coercion(self):
        vec = ScoreVector((0.9, 0.1, 0.5))
        assert allocate(vec, make_config(200)) == allocate([0.9, 0.1, 0.5], make_config(200))


class TestConfigValidation:
    def test_negative_k_min(self):
        with pytest.raises(ConfigError):
            AllocationConfig(b_max=10, k_min=-1, k_max=4)

    def test_k_min_above_k_max(self):
        with pytest.raises(ConfigError):
            AllocationConfig(b_max=10, k_min=9, k_max=4)

    def test_nonpositive_epsilon(self):
        with pytest.raises(ConfigError):
            AllocationConfig(b_max=10, epsilon=0.0)


def block_of(rows: int, d: int = 4, segment_index: int = 0) -> MemoryBlock:
    tokens = np.arange(rows * d, dtype=float).reshape(rows, d)
    return MemoryBlock(
        tokens=tokens, segment_index=segment_index, latent_atom_ids=tuple(range(rows))
    )


class TestTruncation:
    def test_head_identity_slice(self):
        b = block_of(8)
        out = head_truncate(b, 8)
        assert np.array_equal(out.tokens, b.tokens)
        assert out.latent_atom_ids == b.latent_atom_ids

    def test_head_prefix_of_one(self):
        b = block_of(8)
        out = head_truncate(b, 1)
        assert np.array_equal(out.tokens, b.tokens[:1])

    def test_head_prefix_preserves_order(self):
        b = block_of(128)
        out = head_truncate(b, 66)
        assert out.row_count == 66
        assert np.array_equal(out.tokens, b.tokens[:66])
        assert out.latent_atom_ids == b.latent_atom_ids[:66]

    def test_tail_identity_slice(self):
        b = block_of(8)
        out = tail_truncate(b, 8)
        assert np.array_equal(out.tokens, b.tokens)

    def test_tail_keeps_last_row(self):
        b = block_of(8)
        out = tail_truncate(b, 1)
        assert np.array_equal(out.tokens, b.tokens[7:])

    def test_tail_suffix(self):
        b = block_of(128)
        out = tail_truncate(b, 66)
        assert np.array_equal(out.tokens, b.tokens[62:])
        assert out.latent_atom_ids == b.latent_atom_ids[62:]

    @pytest.mark.parametrize("k", [0, 9, -1])
    def test_out_of_range(self, k):
        with pytest.raises(TruncationOutOfRange):
            head_truncate(block_of(8), k)
        with pytest.raises(TruncationOutOfRange):
            tail_truncate(block_of(8), k)

    def test_input_untouched(self):
        b = block_of(8)
        before = b.tokens.copy()
        out = head_truncate(b, 3)
        out.tokens[:] = -1.0
        assert np.array_equal(b.tokens, before)

    def test_empty_block_helper(self):
        out = empty_block(block_of(8))
        assert out.row_count == 0
        assert out.latent_atom_ids == ()

    @given(st.integers(1, 32), st.integers(1, 32))
    def test_prefix_suffix_property(self, rows, k):
        if k > rows:
            k = rows
        b = block_of(rows)
        assert np.array_equal(head_truncate(b, k).tokens, b.tokens[:k])
        assert np.array_equal(tail_truncate(b, k).tokens, b.tokens[rows - k :])
