"""Synthetic needle-retrieval episode generation.

An episode is a row of segments whose atoms come from a shared random
unit-vector vocabulary; exactly one atom (the needle) answers the query,
which is a noisy copy of the needle vector. All draws come from a single
generator seeded by the spec, so episodes are fully reproducible -- and
vocabulary(spec) regenerates the same vocabulary independently for the
reader oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compressor import SegmentContent
from .errors import ConfigError


@dataclass(frozen=True)
class EpisodeSpec:
    """Shape and randomness of one synthetic episode."""

    n_segments: int = 32
    atoms_per_segment: int = 8
    embed_dim: int = 32
    vocab_size: int = 64
    needle_count: int = 1
    query_noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_segments < 1:
            raise ConfigError(f"n_segments must be >= 1, got {self.n_segments}")
        if self.vocab_size < self.atoms_per_segment:
            raise ConfigError(
                f"vocab_size {self.vocab_size} < atoms_per_segment {self.atoms_per_segment}"
            )
        if self.atoms_per_segment < 1:
            raise ConfigError(f"atoms_per_segment must be >= 1, got {self.atoms_per_segment}")
        if not 1 <= self.needle_count <= self.n_segments:
            raise ConfigError(
                f"needle_count must be in [1, n_segments], got {self.needle_count}"
            )
        if self.embed_dim < 2:
            raise ConfigError(f"embed_dim must be >= 2, got {self.embed_dim}")
        if self.query_noise_sigma < 0:
            raise ConfigError(f"query_noise_sigma must be >= 0, got {self.query_noise_sigma}")


def _unit_rows(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    rows = rng.normal(size=(n, d))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def vocabulary(spec: EpisodeSpec) -> np.ndarray:
    """The episode's atom vocabulary, identical to the one used internally."""
    rng = np.random.default_rng(spec.seed)
    return _unit_rows(rng, spec.vocab_size, spec.embed_dim)


def generate_episode(
    spec: EpisodeSpec,
) -> tuple[list[SegmentContent], np.ndarray, int]:
    """Build (segments, query, needle atom id) for one trial.

    The needle atom is placed at a random slot of needle_count uniformly
    chosen segments; distractor atoms are sampled per segment from the rest
    of the vocabulary (without replacement where it fits). The query is the
    needle vector plus Gaussian noise, renormalized; with zero noise it is
    the needle vector itself.
    """
    rng = np.random.default_rng(spec.seed)
    vocab = _unit_rows(rng, spec.vocab_size, spec.embed_dim)

    needle_id = int(rng.integers(spec.vocab_size))
    needle_segments = set(
        int(i) for i in rng.choice(spec.n_segments, size=spec.needle_count, replace=False)
    )

    others = np.array([i for i in range(spec.vocab_size) if i != needle_id])
    replace = len(others) < spec.atoms_per_segment
    segments: list[SegmentContent] = []
    for idx in range(spec.n_segments):
        ids = rng.choice(others, size=spec.atoms_per_segment, replace=replace)
        if idx in needle_segments:
            slot = int(rng.integers(spec.atoms_per_segment))
            ids[slot] = needle_id
        ids = tuple(int(i) for i in ids)
        segments.append(
            SegmentContent(atoms=vocab[list(ids)], atom_ids=ids, segment_index=idx)
        )

    query = vocab[needle_id]
    if spec.query_noise_sigma > 0:
        query = query + rng.normal(0.0, spec.query_noise_sigma, size=spec.embed_dim)
        query = query / np.linalg.norm(query)
    else:
        query = query.copy()

    return segments, query, needle_id
