"""Seeded ablation runs over the policy zoo, aggregated into a RunReport.

Each trial generates a needle episode, scores it once, compresses every
segment once, then replays the same scores and blocks through every policy
and reads an answer per policy. Trial seeds are spawned from the master
seed, so reports are bit-identical across runs and independent of any
evaluation order.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .allocation import AllocationConfig, allocate
from .compressor import CompressorSpec, compress_segment
from .episodes import EpisodeSpec, generate_episode, vocabulary
from .errors import NoEvidence, ParseError
from .policies import Policy, apply_policy, default_pipeline, read_answer
from .relevance import ScorerSpec, score_episode
from .stats import allocation_histogram


@dataclass(frozen=True)
class RunReport:
    """Aggregated results of one ablation run.

    accuracy and mean_tokens are keyed by policy kind; the histogram covers
    the adaptive allocator's per-segment budgets over all trials (counts sum
    to trials * n_segments); utilization pairs each trial's allocated total
    with the theoretical capacity b_max. Tokens per frame is reported under
    both aggregations since they differ on ragged data: the per-episode mean
    of means and the pooled tokens-over-pooled-frames ratio.
    """

    policies: tuple[str, ...]
    accuracy: dict[str, float]
    mean_tokens: dict[str, float]
    hist_bin_edges: tuple[float, ...]
    hist_counts: tuple[int, ...]
    utilization: tuple[tuple[int, int], ...]
    tokens_per_frame_mean_of_means: float
    tokens_per_frame_pooled: float
    trials: int
    n_segments: int
    window: int
    b_max: int

    def segments_scored(self) -> int:
        return self.trials * self.n_segments


def run_ablation(
    spec: EpisodeSpec,
    policies: Sequence[Policy],
    scorer: ScorerSpec,
    cfg: AllocationConfig,
    trials: int,
    window: int = 8,
    fps: float = 2.0,
    compressor: CompressorSpec | None = None,
) -> RunReport:
    """Run every policy over the same seeded trials and aggregate.

    spec.seed is the master seed: per-trial seeds for the episode, scorer
    noise, compressor noise, and the random_drop permutation are spawned
    from it. The compressor defaults to front-loading on with mild token
    noise; pass one explicitly to ablate front-loading itself.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if compressor is None:
        compressor = CompressorSpec(
            k_max=cfg.k_max, d=spec.embed_dim, token_noise_sigma=0.05, frontload=True
        )

    pipeline = default_pipeline(spec.n_segments, cfg.b_max, window=window, fps=fps)
    kinds = [p.kind for p in policies]
    if len(set(kinds)) != len(kinds):
        raise ValueError(f"duplicate policy kinds in {kinds}")
    correct = {k: 0 for k in kinds}
    tokens = {k: 0 for k in kinds}
    ata_budgets: list[int] = []
    utilization: list[tuple[int, int]] = []
    per_trial_tpf: list[float] = []
    pooled_tokens = 0

    master = np.random.SeedSequence(spec.seed)
    for child in master.spawn(trials):
        ep_seed, scorer_seed, comp_seed, drop_seed = (
            int(s) for s in child.generate_state(4)
        )
        trial_spec = dataclasses.replace(spec, seed=ep_seed)
        segments, query, needle_id = generate_episode(trial_spec)
        vocab = vocabulary(trial_spec)
        scores = score_episode(
            dataclasses.replace(scorer, seed=scorer_seed), query, segments
        )
        trial_comp = dataclasses.replace(compressor, seed=comp_seed)
        blocks = [compress_segment(trial_comp, query, seg) for seg in segments]

        plan = allocate(scores, cfg)
        ata_budgets.extend(plan.budgets)
        utilization.append((plan.total, cfg.b_max))
        per_trial_tpf.append(plan.total / (spec.n_segments * window))
        pooled_tokens += plan.total

        drop_rng = np.random.default_rng(drop_seed)
        for policy in policies:
            seq = apply_policy(
                policy, scores, blocks, cfg, pipeline=pipeline, rng=drop_rng
            )
            tokens[policy.kind] += seq.total_tokens
            try:
                answer = read_answer(seq, query, vocab)
            except NoEvidence:
                continue
            if answer == needle_id:
                correct[policy.kind] += 1

    edges, counts = allocation_histogram(ata_budgets, cfg.k_max)
    return RunReport(
        policies=tuple(kinds),
        accuracy={k: correct[k] / trials for k in kinds},
        mean_tokens={k: tokens[k] / trials for k in kinds},
        hist_bin_edges=edges,
        hist_counts=counts,
        utilization=tuple(utilization),
        tokens_per_frame_mean_of_means=sum(per_trial_tpf) / trials,
        tokens_per_frame_pooled=pooled_tokens / (trials * spec.n_segments * window),
        trials=trials,
        n_segments=spec.n_segments,
        window=window,
        b_max=cfg.b_max,
    )


def serialize_report(report: RunReport) -> str:
    """Canonical JSON document for a RunReport."""
    doc = dataclasses.asdict(report)
    doc["utilization"] = [list(u) for u in report.utilization]
    return json.dumps(doc, sort_keys=True)


def parse_report(text: str) -> RunReport:
    """Parse a report document written by serialize_report."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid report document: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(doc, dict):
        raise ParseError("report document must be an object")
    expected = {f.name for f in dataclasses.fields(RunReport)}
    if set(doc) != expected:
        raise ParseError(
            f"report fields {sorted(set(doc) ^ expected)} missing or unknown"
        )
    try:
        return RunReport(
            policies=tuple(doc["policies"]),
            accuracy={str(k): float(v) for k, v in doc["accuracy"].items()},
            mean_tokens={str(k): float(v) for k, v in doc["mean_tokens"].items()},
            hist_bin_edges=tuple(float(e) for e in doc["hist_bin_edges"]),
            hist_counts=tuple(int(c) for c in doc["hist_counts"]),
            utilization=tuple((int(a), int(b)) for a, b in doc["utilization"]),
            tokens_per_frame_mean_of_means=float(doc["tokens_per_frame_mean_of_means"]),
            tokens_per_frame_pooled=float(doc["tokens_per_frame_pooled"]),
            trials=int(doc["trials"]),
            n_segments=int(doc["n_segments"]),
            window=int(doc["window"]),
            b_max=int(doc["b_max"]),
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed report document: {exc}") from exc
