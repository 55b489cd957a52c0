"""Two-stage budget allocation over per-segment relevance scores.

Turns a vector of relevance scores into integer per-segment token budgets
under a hard global budget: min-max normalization, a contrastive linear
mapping into [k_min, k_max], and, when that overshoots the budget, a
proportional redistribution of the residual followed by largest-remainder
discretization. Also holds the memory-block container and the prefix/suffix
truncation primitives that realize the budgets.

Everything here is pure and deterministic; no hidden state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence, Union

import numpy as np

from .errors import (
    BudgetInfeasible,
    ConfigError,
    EmptyScores,
    TruncationOutOfRange,
)

Stage = Literal["ideal-adopted", "residual-distributed"]

STAGE_IDEAL: Stage = "ideal-adopted"
STAGE_RESIDUAL: Stage = "residual-distributed"


@dataclass(frozen=True)
class AllocationConfig:
    """Budget and bound parameters for the allocator.

    k_min is the guaranteed floor per segment (0 permitted: it realizes the
    hard-pruning baseline in the same code path), k_max the per-segment cap,
    b_max the global token budget, epsilon the guard constant for degenerate
    spreads and zero denominators. uniform_fallback opts into an equal split
    min(k_max, b_max // N) when all scores are equal instead of the literal
    all-k_min result.
    """

    b_max: int
    k_min: int = 4
    k_max: int = 128
    epsilon: float = 1e-6
    uniform_fallback: bool = False

    def __post_init__(self):
        if not 0 <= self.k_min <= self.k_max:
            raise ConfigError(f"need 0 <= k_min <= k_max, got ({self.k_min}, {self.k_max})")
        if self.k_max < 1:
            raise ConfigError(f"k_max must be >= 1, got {self.k_max}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class ScoreVector:
    """Ordered per-segment relevance probabilities, each strictly in (0, 1)."""

    scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.scores) == 0:
            raise EmptyScores("score vector must contain at least one score")
        for i, s in enumerate(self.scores):
            if not 0.0 < s < 1.0:  # also rejects NaN
                raise ValueError(f"score {i} is {s!r}, must lie strictly in (0, 1)")

    def __len__(self) -> int:
        return len(self.scores)

    @classmethod
    def coerce(cls, scores: "ScoresLike") -> "ScoreVector":
        if isinstance(scores, ScoreVector):
            return scores
        return cls(tuple(float(s) for s in scores))


ScoresLike = Union[ScoreVector, Sequence[float], Iterable[float]]


@dataclass(frozen=True)
class NormalizedScores:
    """Min-max normalized scores in [0, 1] plus the raw max-min spread."""

    values: tuple[float, ...]
    spread: float


@dataclass(frozen=True)
class AllocationPlan:
    """Integer per-segment budgets plus allocation diagnostics.

    stage records which branch produced the budgets; b_base = N * k_min and
    b_res = b_max - b_base (b_res is only meaningful for the residual stage).
    The record itself only enforces self-consistency (total == sum); bound
    and budget conformance are postconditions of :func:`allocate`.
    """

    budgets: tuple[int, ...]
    stage: Stage
    b_base: int
    b_res: int
    total: int

    def __post_init__(self):
        if self.total != sum(self.budgets):
            raise ConfigError(
                f"plan total {self.total} != sum of budgets {sum(self.budgets)}"
            )
        if any(k < 0 for k in self.budgets):
            raise ConfigError("budgets must be non-negative")


@dataclass(frozen=True, eq=False)
class MemoryBlock:
    """One segment's ordered memory-token matrix (rows x embedding dim).

    Row 0 is the earliest generated token. latent_atom_ids carries per-row
    provenance (which content atom each row encodes) for the simulator's
    reader oracle; production blocks have k_max rows, truncated ones k_i.
    """

    tokens: np.ndarray
    segment_index: int
    latent_atom_ids: tuple[int, ...]

    def __post_init__(self):
        if self.tokens.ndim != 2:
            raise ConfigError(f"tokens must be a 2-D matrix, got ndim={self.tokens.ndim}")
        if len(self.latent_atom_ids) != self.tokens.shape[0]:
            raise ConfigError(
                f"{len(self.latent_atom_ids)} atom ids for {self.tokens.shape[0]} rows"
            )

    @property
    def row_count(self) -> int:
        return self.tokens.shape[0]


def normalize_scores(scores: ScoresLike, epsilon: float = 1e-6) -> NormalizedScores:
    """Min-max scale scores onto [0, 1].

    When the spread max-min exceeds epsilon the denominator is the exact
    spread, so the top segment reaches exactly 1 and the bottom exactly 0.
    A spread <= epsilon means the scores are indistinguishable; the result
    is all zeros with the raw spread recorded.
    """
    vec = ScoreVector.coerce(scores)
    lo = min(vec.scores)
    hi = max(vec.scores)
    spread = hi - lo
    if spread > epsilon:
        values = tuple((s - lo) / spread for s in vec.scores)
    else:
        values = (0.0,) * len(vec.scores)
    return NormalizedScores(values=values, spread=spread)


def ideal_allocation(norm: NormalizedScores, cfg: AllocationConfig) -> list[int]:
    """Contrastive linear mapping: k_min + floor((k_max - k_min) * value)."""
    span = cfg.k_max - cfg.k_min
    return [cfg.k_min + math.floor(span * v) for v in norm.values]


def residual_allocation(
    norm: NormalizedScores, cfg: AllocationConfig
) -> tuple[list[int], list[float]]:
    """Proportional split of the residual budget, floored, with remainders.

    Each segment's raw share of b_res = b_max - N*k_min is proportional to
    its normalized score (epsilon guards the all-zero denominator). Returns
    the floored budgets clamped to k_max and the fractional remainders of
    the raw shares for largest-remainder discretization.
    """
    n = len(norm.values)
    b_base = n * cfg.k_min
    if cfg.b_max < b_base:
        raise BudgetInfeasible(
            f"budget {cfg.b_max} cannot cover {n} segments at k_min={cfg.k_min}"
        )
    b_res = cfg.b_max - b_base
    denom = sum(norm.values) + cfg.epsilon
    floors: list[int] = []
    remainders: list[float] = []
    for v in norm.values:
        raw = b_res * v / denom
        whole = math.floor(raw)
        floors.append(min(cfg.k_min + whole, cfg.k_max))
        remainders.append(raw - whole)
    return floors, remainders


def distribute_remainders(
    floors: Sequence[int],
    remainders: Sequence[float],
    norm: NormalizedScores,
    cfg: AllocationConfig,
) -> list[int]:
    """Hand out leftover tokens one at a time by descending remainder.

    Ties break by higher normalized score, then lower index. Segments at
    k_max are skipped; the sweep repeats until the leftover is exhausted or
    every segment is capped, so the final total never exceeds b_max.
    """
    budgets = list(floors)
    leftover = cfg.b_max - sum(budgets)
    order = sorted(
        range(len(budgets)),
        key=lambda i: (-remainders[i], -norm.values[i], i),
    )
    while leftover > 0:
        granted = False
        for i in order:
            if leftover == 0:
                break
            if budgets[i] < cfg.k_max:
                budgets[i] += 1
                leftover -= 1
                granted = True
        if not granted:
            break
    return budgets


def allocate(scores: ScoresLike, cfg: AllocationConfig) -> AllocationPlan:
    """Run the full allocation: normalize, map, adopt or redistribute.

    If the ideal budgets fit under b_max they are adopted verbatim
    (stage "ideal-adopted"); otherwise the residual budget is distributed
    proportionally and discretized by largest remainder (stage
    "residual-distributed"). Raises BudgetInfeasible when b_max < N * k_min.

    With uniform_fallback on, an all-equal score vector yields an equal
    split min(k_max, b_max // N) instead of all-k_min; such plans report
    the ideal-adopted stage since they are adopted without redistribution.
    """
    vec = ScoreVector.coerce(scores)
    n = len(vec)
    b_base = n * cfg.k_min
    if cfg.b_max < b_base:
        raise BudgetInfeasible(
            f"budget {cfg.b_max} cannot cover {n} segments at k_min={cfg.k_min}"
        )
    b_res = cfg.b_max - b_base

    norm = normalize_scores(vec, cfg.epsilon)
    if norm.spread <= cfg.epsilon and cfg.uniform_fallback:
        k_uniform = min(cfg.k_max, cfg.b_max // n)
        budgets = [k_uniform] * n
        stage = STAGE_IDEAL
    else:
        ideal = ideal_allocation(norm, cfg)
        if sum(ideal) <= cfg.b_max:
            budgets = ideal
            stage = STAGE_IDEAL
        else:
            floors, remainders = residual_allocation(norm, cfg)
            budgets = distribute_remainders(floors, remainders, norm, cfg)
            stage = STAGE_RESIDUAL

    return AllocationPlan(
        budgets=tuple(budgets),
        stage=stage,
        b_base=b_base,
        b_res=b_res,
        total=sum(budgets),
    )


def _check_truncation(block: MemoryBlock, k: int):
    if not 1 <= k <= block.row_count:
        raise TruncationOutOfRange(
            f"k={k} outside [1, {block.row_count}] for segment {block.segment_index}"
        )


def head_truncate(block: MemoryBlock, k: int) -> MemoryBlock:
    """Keep the first k rows (generation order preserved). Input untouched."""
    _check_truncation(block, k)
    return MemoryBlock(
        tokens=block.tokens[:k].copy(),
        segment_index=block.segment_index,
        latent_atom_ids=block.latent_atom_ids[:k],
    )


def tail_truncate(block: MemoryBlock, k: int) -> MemoryBlock:
    """Keep the last k rows (ablation baseline). Input untouched."""
    _check_truncation(block, k)
    return MemoryBlock(
        tokens=block.tokens[block.row_count - k :].copy(),
        segment_index=block.segment_index,
        latent_atom_ids=block.latent_atom_ids[block.row_count - k :],
    )


def empty_block(block: MemoryBlock) -> MemoryBlock:
    """Zero-row version of a block, for segments allocated 0 tokens."""
    return MemoryBlock(
        tokens=block.tokens[:0].copy(),
        segment_index=block.segment_index,
        latent_atom_ids=(),
    )
