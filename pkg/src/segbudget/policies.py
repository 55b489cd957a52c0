"""Segment-level allocation policy zoo and the reader oracle.

Every policy turns (scores, full memory blocks, allocation config) into a
budget-conformant assembled sequence. The adaptive family reuses the
allocator and differs only in how budgets are realized (head truncation,
tail truncation, merging, or a forced k_min of 0); the baselines fix kept
segments at k_max and drop the rest. read_answer replaces a downstream
decoder: it decodes retained rows to their nearest vocabulary atoms and
answers with the decoded atom most similar to the query.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .allocation import (
    AllocationConfig,
    AllocationPlan,
    MemoryBlock,
    STAGE_IDEAL,
    ScoresLike,
    ScoreVector,
    allocate,
    empty_block,
    head_truncate,
    tail_truncate,
)
from .assembly import AssembledSequence, PipelineConfig, assemble
from .compressor import merge_reduce
from .errors import ConfigError, NoEvidence, PlanMismatch

PolicyKind = Literal[
    "ata",
    "uniform",
    "random_drop",
    "adversarial",
    "top_k",
    "hard_pruning",
    "ata_tail_truncate",
    "ata_merge",
]

POLICY_KINDS: tuple[PolicyKind, ...] = (
    "ata",
    "uniform",
    "random_drop",
    "adversarial",
    "top_k",
    "hard_pruning",
    "ata_tail_truncate",
    "ata_merge",
)

ADAPTIVE_KINDS = frozenset({"ata", "hard_pruning", "ata_tail_truncate", "ata_merge"})


@dataclass(frozen=True)
class Policy:
    """One allocation policy. keep_fraction optionally caps how many
    segments the keep/drop baselines may retain (on top of the budget)."""

    kind: PolicyKind
    keep_fraction: float | None = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"unknown policy kind {self.kind!r}")
        if self.keep_fraction is not None and not 0 < self.keep_fraction <= 1:
            raise ConfigError(f"keep_fraction must be in (0, 1], got {self.keep_fraction}")


def _fixed_plan(budgets: Sequence[int], cfg: AllocationConfig) -> AllocationPlan:
    # Baseline budgets adopted as-given; no residual stage ran.
    n = len(budgets)
    return AllocationPlan(
        budgets=tuple(budgets),
        stage=STAGE_IDEAL,
        b_base=n * cfg.k_min,
        b_res=cfg.b_max - n * cfg.k_min,
        total=sum(budgets),
    )


def _keep_order_budgets(
    order: Sequence[int], n: int, cfg: AllocationConfig, keep_fraction: float | None
) -> list[int]:
    budgets = [0] * n
    max_kept = n if keep_fraction is None else int(n * keep_fraction)
    kept = 0
    total = 0
    for i in order:
        if kept >= max_kept or total + cfg.k_max > cfg.b_max:
            break
        budgets[i] = cfg.k_max
        total += cfg.k_max
        kept += 1
    return budgets


def _realize(blocks: Sequence[MemoryBlock], budgets: Sequence[int], scheme: str):
    out = []
    for block, k in zip(blocks, budgets):
        if k == 0:
            out.append(empty_block(block))
        elif scheme == "head":
            out.append(head_truncate(block, k))
        elif scheme == "tail":
            out.append(tail_truncate(block, k))
        else:
            out.append(merge_reduce(block, k))
    return out


def default_pipeline(n_segments: int, b_max: int, window: int = 8, fps: float = 2.0) -> PipelineConfig:
    return PipelineConfig(f_max=n_segments * window, b_max=b_max, fps=fps, window=window)


def apply_policy(
    policy: Policy,
    scores: ScoresLike,
    blocks: Sequence[MemoryBlock],
    cfg: AllocationConfig,
    pipeline: PipelineConfig | None = None,
    rng: np.random.Generator | None = None,
) -> AssembledSequence:
    """Run one policy end to end and return its assembled sequence.

    ata allocates adaptively and head-truncates; hard_pruning is ata with
    k_min forced to 0; ata_tail_truncate and ata_merge realize the same
    budgets by suffix truncation and merging. uniform gives every segment
    min(k_max, b_max // N). The keep/drop baselines retain segments at
    k_max until the budget would be exceeded: top_k by descending score,
    adversarial by ascending score, random_drop in a random order drawn
    from rng (only random_drop consumes randomness).
    """
    vec = ScoreVector.coerce(scores)
    n = len(vec)
    if len(blocks) != n:
        raise PlanMismatch(f"{len(blocks)} blocks for {n} scores")
    if pipeline is None:
        pipeline = default_pipeline(n, cfg.b_max)

    kind = policy.kind
    if kind in ADAPTIVE_KINDS:
        ata_cfg = dataclasses.replace(cfg, k_min=0) if kind == "hard_pruning" else cfg
        plan = allocate(vec, ata_cfg)
        scheme = {"ata_tail_truncate": "tail", "ata_merge": "merge"}.get(kind, "head")
        truncated = _realize(blocks, plan.budgets, scheme)
        return assemble(truncated, plan, pipeline)

    if kind == "uniform":
        budgets = [min(cfg.k_max, cfg.b_max // n)] * n
    elif kind == "top_k":
        order = sorted(range(n), key=lambda i: (-vec.scores[i], i))
        budgets = _keep_order_budgets(order, n, cfg, policy.keep_fraction)
    elif kind == "adversarial":
        order = sorted(range(n), key=lambda i: (vec.scores[i], i))
        budgets = _keep_order_budgets(order, n, cfg, policy.keep_fraction)
    else:  # random_drop
        if rng is None:
            rng = np.random.default_rng()
        order = [int(i) for i in rng.permutation(n)]
        budgets = _keep_order_budgets(order, n, cfg, policy.keep_fraction)

    truncated = _realize(blocks, budgets, "head")
    return assemble(truncated, _fixed_plan(budgets, cfg), pipeline)


def decode_rows(rows: np.ndarray, vocab: np.ndarray) -> np.ndarray:
    """Nearest-vocabulary atom id per row (cosine, lower id on ties)."""
    sims = rows @ vocab.T
    sims = sims / np.linalg.norm(rows, axis=1, keepdims=True)
    sims = sims / np.linalg.norm(vocab, axis=1)
    return np.argmax(sims, axis=1)


def read_answer(
    seq: AssembledSequence, query: np.ndarray, vocab: np.ndarray
) -> int:
    """Oracle read of an assembled sequence.

    Decodes every retained row to its nearest vocabulary atom and returns
    the decoded atom id with the highest cosine similarity to the query
    (lower id on exact ties). Raises NoEvidence for an empty sequence.
    """
    if not seq.entries or seq.total_tokens == 0:
        raise NoEvidence("assembled sequence has no tokens")
    rows = np.concatenate([e.rows for e in seq.entries], axis=0)
    decoded = np.unique(decode_rows(rows, vocab))
    query = np.asarray(query, dtype=float)
    sims = vocab[decoded] @ query
    sims = sims / (np.linalg.norm(vocab[decoded], axis=1) * np.linalg.norm(query))
    return int(decoded[int(np.argmax(sims))])
