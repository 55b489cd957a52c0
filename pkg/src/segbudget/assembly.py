"""Temporally tagged sequence assembly and plan/sequence serialization.

Builds the global token sequence from truncated memory blocks: entries are
ordered by segment, each prefixed with a textual timestamp tag like
"<t=16.0s>" (segment start time, one decimal), zero-token segments dropped,
and the global budget enforced. Plans and sequences serialize to JSON
documents with fixed field sets; unknown fields are rejected.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .allocation import AllocationPlan, MemoryBlock, STAGE_IDEAL, STAGE_RESIDUAL
from .errors import BudgetExceeded, ConfigError, ParseError, PlanMismatch

TAG_PATTERN = re.compile(r"^<t=(\d+\.\d)s>$")

_PLAN_FIELDS = {"budgets", "stage", "b_base", "b_res", "total"}
_ENTRY_FIELDS = {"segment_index", "timestamp_tag", "token_count", "rows"}
_SEQUENCE_FIELDS = {"entries", "total_tokens"}


@dataclass(frozen=True)
class PipelineConfig:
    """Sampling geometry and the global budget for sequence assembly."""

    f_max: int
    b_max: int
    fps: float = 2.0
    window: int = 8

    def __post_init__(self):
        if self.fps <= 0:
            raise ConfigError(f"fps must be > 0, got {self.fps}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.f_max < self.window:
            raise ConfigError(f"f_max {self.f_max} must be >= window {self.window}")


@dataclass(frozen=True, eq=False)
class SequenceEntry:
    """One retained segment: index, tag, and its truncated token rows."""

    segment_index: int
    timestamp_tag: str
    token_count: int
    rows: np.ndarray


@dataclass(frozen=True, eq=False)
class AssembledSequence:
    """Budget-conformant, temporally ordered sequence of tagged entries."""

    entries: tuple[SequenceEntry, ...]
    total_tokens: int

    def segment_indices(self) -> tuple[int, ...]:
        return tuple(e.segment_index for e in self.entries)


def timestamp_tag(segment_index: int, cfg: PipelineConfig) -> str:
    """Tag for a segment's start time: index * window / fps, one decimal."""
    if segment_index < 0:
        raise ConfigError(f"segment_index must be >= 0, got {segment_index}")
    t = segment_index * cfg.window / cfg.fps
    return f"<t={t:.1f}s>"


def parse_timestamp_tag(tag: str) -> float:
    """Recover the segment start time in seconds from a tag."""
    m = TAG_PATTERN.match(tag)
    if m is None:
        raise ParseError(f"not a timestamp tag: {tag!r}")
    return float(m.group(1))


def assemble(
    blocks: Sequence[MemoryBlock], plan: AllocationPlan, cfg: PipelineConfig
) -> AssembledSequence:
    """Assemble truncated blocks into the tagged global sequence.

    Blocks may arrive in any order; entries are emitted in segment order.
    Block i must have exactly plan.budgets[i] rows (zero-row blocks are
    legal and simply absent from the output). The budget is re-verified
    here: a sequence over b_max raises instead of being returned.
    """
    n = len(plan.budgets)
    if len(blocks) != n:
        raise PlanMismatch(f"{len(blocks)} blocks for a {n}-segment plan")
    by_index = sorted(blocks, key=lambda b: b.segment_index)
    indices = [b.segment_index for b in by_index]
    if indices != list(range(n)):
        raise PlanMismatch(f"block segment indices {indices} are not 0..{n - 1}")

    entries = []
    total = 0
    for block in by_index:
        want = plan.budgets[block.segment_index]
        if block.row_count != want:
            raise PlanMismatch(
                f"segment {block.segment_index} has {block.row_count} rows, "
                f"plan allocates {want}"
            )
        if want == 0:
            continue
        total += want
        if total > cfg.b_max:
            raise BudgetExceeded(f"sequence would hold {total} tokens > b_max {cfg.b_max}")
        entries.append(
            SequenceEntry(
                segment_index=block.segment_index,
                timestamp_tag=timestamp_tag(block.segment_index, cfg),
                token_count=want,
                rows=block.tokens.copy(),
            )
        )
    return AssembledSequence(entries=tuple(entries), total_tokens=total)


def serialize_plan(plan: AllocationPlan) -> str:
    """Canonical JSON document for a plan (stable key order and spacing)."""
    doc = {
        "budgets": list(plan.budgets),
        "stage": plan.stage,
        "b_base": plan.b_base,
        "b_res": plan.b_res,
        "total": plan.total,
    }
    return json.dumps(doc, sort_keys=True)


def _decode_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid document: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(doc, dict):
        raise ParseError(f"expected an object document, got {type(doc).__name__}")
    return doc


def _require_int(doc: dict, field: str) -> int:
    value = doc.get(field)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f"field {field!r} must be an integer, got {value!r}")
    return value


def parse_plan(text: str) -> AllocationPlan:
    """Parse a plan document, rejecting unknown fields and bad shapes."""
    doc = _decode_json(text)
    unknown = set(doc) - _PLAN_FIELDS
    if unknown:
        raise ParseError(f"unknown plan fields: {sorted(unknown)}")
    missing = _PLAN_FIELDS - set(doc)
    if missing:
        raise ParseError(f"missing plan fields: {sorted(missing)}")
    budgets = doc["budgets"]
    if not isinstance(budgets, list) or not all(
        isinstance(k, int) and not isinstance(k, bool) for k in budgets
    ):
        raise ParseError("field 'budgets' must be an array of integers")
    stage = doc["stage"]
    if stage not in (STAGE_IDEAL, STAGE_RESIDUAL):
        raise ParseError(f"unknown stage {stage!r}")
    b_base = _require_int(doc, "b_base")
    b_res = _require_int(doc, "b_res")
    total = _require_int(doc, "total")
    if total != sum(budgets):
        raise ParseError(f"total {total} != sum of budgets {sum(budgets)}")
    try:
        return AllocationPlan(
            budgets=tuple(budgets), stage=stage, b_base=b_base, b_res=b_res, total=total
        )
    except ConfigError as exc:
        raise ParseError(str(exc)) from exc


def serialize_sequence(seq: AssembledSequence) -> str:
    """JSON export of an assembled sequence for replay and golden tests."""
    doc = {
        "entries": [
            {
                "segment_index": e.segment_index,
                "timestamp_tag": e.timestamp_tag,
                "token_count": e.token_count,
                "rows": [[float(x) for x in row] for row in e.rows],
            }
            for e in seq.entries
        ],
        "total_tokens": seq.total_tokens,
    }
    return json.dumps(doc, sort_keys=True)


def parse_sequence(text: str) -> AssembledSequence:
    """Parse a sequence document produced by serialize_sequence."""
    doc = _decode_json(text)
    unknown = set(doc) - _SEQUENCE_FIELDS
    if unknown:
        raise ParseError(f"unknown sequence fields: {sorted(unknown)}")
    missing = _SEQUENCE_FIELDS - set(doc)
    if missing:
        raise ParseError(f"missing sequence fields: {sorted(missing)}")
    raw_entries = doc["entries"]
    if not isinstance(raw_entries, list):
        raise ParseError("field 'entries' must be an array")
    entries = []
    for i, raw in enumerate(raw_entries):
        if not isinstance(raw, dict):
            raise ParseError(f"entries[{i}] must be an object")
        unknown = set(raw) - _ENTRY_FIELDS
        if unknown:
            raise ParseError(f"entries[{i}] has unknown fields: {sorted(unknown)}")
        missing = _ENTRY_FIELDS - set(raw)
        if missing:
            raise ParseError(f"entries[{i}] is missing fields: {sorted(missing)}")
        tag = raw["timestamp_tag"]
        if not isinstance(tag, str) or TAG_PATTERN.match(tag) is None:
            raise ParseError(f"entries[{i}].timestamp_tag {tag!r} is malformed")
        try:
            rows = np.asarray(raw["rows"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"entries[{i}].rows is not a numeric matrix: {exc}") from exc
        if rows.size and rows.ndim != 2:
            raise ParseError(f"entries[{i}].rows must be a matrix")
        count = _require_int(raw, "token_count")
        if count != rows.shape[0]:
            raise ParseError(
                f"entries[{i}].token_count {count} != {rows.shape[0]} rows"
            )
        entries.append(
            SequenceEntry(
                segment_index=_require_int(raw, "segment_index"),
                timestamp_tag=tag,
                token_count=count,
                rows=rows,
            )
        )
    total = _require_int(doc, "total_tokens")
    if total != sum(e.token_count for e in entries):
        raise ParseError(f"total_tokens {total} != sum of entry token counts")
    return AssembledSequence(entries=tuple(entries), total_tokens=total)
