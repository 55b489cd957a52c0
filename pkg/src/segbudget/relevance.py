"""Relevance scoring: an exact logit-difference probe and a synthetic oracle.

The probe scores a hidden-state vector against frozen yes/no head weights,
sigmoid((w_yes - w_no) . h); the oracle scores a query against a segment's
content vectors via max cosine similarity pushed through a logistic, with
optional Gaussian noise added in logit space so outputs stay in (0, 1).
Both plug into score_episode behind one interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np

from .allocation import ScoreVector
from .errors import ConfigError, DimensionMismatch, EmptySegment, SegBudgetError

_ONE_BELOW_1 = math.nextafter(1.0, 0.0)
_ONE_ABOVE_0 = math.nextafter(0.0, 1.0)


def sigmoid(z: float) -> float:
    """Numerically stable logistic, clamped into the open interval (0, 1)."""
    if z >= 0:
        s = 1.0 / (1.0 + math.exp(-z))
    else:
        w = math.exp(z)
        s = w / (1.0 + w)
    if s >= 1.0:
        return _ONE_BELOW_1
    if s <= 0.0:
        return _ONE_ABOVE_0
    return s


@dataclass(frozen=True, eq=False)
class RelevanceProbe:
    """Frozen head weight vectors for the yes and no tokens."""

    w_yes: np.ndarray
    w_no: np.ndarray

    def __post_init__(self):
        if self.w_yes.ndim != 1 or self.w_no.ndim != 1:
            raise ConfigError("probe weights must be 1-D vectors")
        if self.w_yes.shape != self.w_no.shape:
            raise DimensionMismatch(
                f"w_yes dim {self.w_yes.shape[0]} != w_no dim {self.w_no.shape[0]}"
            )
        if self.w_yes.shape[0] < 1:
            raise ConfigError("probe dimension must be >= 1")


@dataclass(frozen=True)
class ScorerSpec:
    """Configuration for a pluggable scorer.

    kind "oracle" scores segments by max cosine similarity to the query;
    kind "probe" is reserved for scoring pre-extracted hidden states, which
    score_episode performs when handed a RelevanceProbe directly. sharpness
    is the logistic slope around the similarity midpoint 0.5; noise_sigma
    adds Gaussian noise in logit space.
    """

    kind: Literal["probe", "oracle"] = "oracle"
    noise_sigma: float = 0.0
    sharpness: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.sharpness <= 0:
            raise ConfigError(f"sharpness must be > 0, got {self.sharpness}")


def probe_score(probe: RelevanceProbe, h: np.ndarray) -> float:
    """Relevance probability sigmoid((w_yes - w_no) . h), strictly in (0, 1).

    Constant-time in sequence length: one dot product over the hidden state.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.shape[0] != probe.w_yes.shape[0]:
        raise DimensionMismatch(
            f"hidden state dim {h.shape} does not match probe dim {probe.w_yes.shape[0]}"
        )
    logit = float((probe.w_yes - probe.w_no) @ h)
    return sigmoid(logit)


def _max_cosine(query: np.ndarray, atoms: np.ndarray) -> float:
    q_norm = float(np.linalg.norm(query))
    if q_norm == 0.0:
        raise ValueError("query vector has zero norm")
    a_norms = np.linalg.norm(atoms, axis=1)
    sims = (atoms @ query) / (a_norms * q_norm)
    return float(np.max(sims))


def oracle_score(
    spec: ScorerSpec,
    query: np.ndarray,
    segment_content: Union[Sequence[np.ndarray], np.ndarray],
    rng: np.random.Generator | None = None,
) -> float:
    """Synthetic relevance score from max query-atom cosine similarity.

    sigmoid(sharpness * (sim - 0.5) + noise), noise ~ N(0, noise_sigma^2)
    drawn from rng (a fresh generator seeded from spec.seed when omitted),
    so a sequence of calls is deterministic given seed and call order.
    """
    atoms = np.asarray(segment_content, dtype=float)
    if atoms.size == 0:
        raise EmptySegment("segment has no content vectors")
    if atoms.ndim == 1:
        atoms = atoms[None, :]
    query = np.asarray(query, dtype=float)
    if atoms.shape[1] != query.shape[0]:
        raise DimensionMismatch(
            f"content dim {atoms.shape[1]} != query dim {query.shape[0]}"
        )
    sim = _max_cosine(query, atoms)
    logit = spec.sharpness * (sim - 0.5)
    if spec.noise_sigma > 0:
        if rng is None:
            rng = np.random.default_rng(spec.seed)
        logit += rng.normal(0.0, spec.noise_sigma)
    return sigmoid(logit)


def score_episode(
    scorer: Union[ScorerSpec, RelevanceProbe],
    query: np.ndarray | None,
    segments: Sequence,
) -> ScoreVector:
    """Score every segment in order, returning one score per segment.

    With a ScorerSpec, each segment supplies content vectors (anything with
    an ``atoms`` attribute, or an array of vectors) scored by oracle_score
    against the query under one generator seeded from spec.seed. With a
    RelevanceProbe, each segment supplies a hidden-state vector scored by
    probe_score (the query is unused). Per-segment failures are re-raised
    with the segment index attached.
    """
    if len(segments) == 0:
        raise EmptySegment("episode has no segments")
    scores: list[float] = []
    rng = None
    if isinstance(scorer, ScorerSpec):
        rng = np.random.default_rng(scorer.seed)
    for i, segment in enumerate(segments):
        try:
            if isinstance(scorer, RelevanceProbe):
                scores.append(probe_score(scorer, np.asarray(segment, dtype=float)))
            else:
                content = getattr(segment, "atoms", segment)
                scores.append(oracle_score(scorer, query, content, rng=rng))
        except SegBudgetError as exc:
            raise type(exc)(f"segment {i}: {exc}") from exc
    return ScoreVector(tuple(scores))
