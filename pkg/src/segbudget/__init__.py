"""Budget-constrained per-segment token allocation with a retrieval simulator."""

from .allocation import (
    AllocationConfig,
    AllocationPlan,
    MemoryBlock,
    NormalizedScores,
    ScoreVector,
    allocate,
    distribute_remainders,
    head_truncate,
    ideal_allocation,
    normalize_scores,
    residual_allocation,
    tail_truncate,
)
from .assembly import (
    AssembledSequence,
    PipelineConfig,
    assemble,
    parse_plan,
    parse_sequence,
    serialize_plan,
    serialize_sequence,
    timestamp_tag,
)
from .ablation import RunReport, run_ablation
from .compressor import CompressorSpec, SegmentContent, compress_segment, merge_reduce
from .episodes import EpisodeSpec, generate_episode, vocabulary
from .policies import Policy, apply_policy, read_answer
from .relevance import RelevanceProbe, ScorerSpec, oracle_score, probe_score, score_episode
from .reports import emit_report
from .stats import dataset_avg_capacity, tokens_per_frame_bound, tokens_per_frame_range

__version__ = "0.1.0"

__all__ = [
    "AllocationConfig",
    "AllocationPlan",
    "AssembledSequence",
    "CompressorSpec",
    "EpisodeSpec",
    "MemoryBlock",
    "NormalizedScores",
    "PipelineConfig",
    "Policy",
    "RelevanceProbe",
    "RunReport",
    "ScoreVector",
    "ScorerSpec",
    "SegmentContent",
    "allocate",
    "apply_policy",
    "assemble",
    "compress_segment",
    "dataset_avg_capacity",
    "distribute_remainders",
    "emit_report",
    "generate_episode",
    "head_truncate",
    "ideal_allocation",
    "merge_reduce",
    "normalize_scores",
    "oracle_score",
    "parse_plan",
    "parse_sequence",
    "probe_score",
    "read_answer",
    "residual_allocation",
    "run_ablation",
    "score_episode",
    "serialize_plan",
    "serialize_sequence",
    "tail_truncate",
    "timestamp_tag",
    "tokens_per_frame_bound",
    "tokens_per_frame_range",
    "vocabulary",
]
