"""Synthetic segment compressor with controllable semantic front-loading.

Stands in for a learned local compressor: each segment's content atoms are
ranked by cosine similarity to the query and written into a fixed-capacity
memory block. With front-loading on, row j holds the rank-j atom, so prefix
truncation retains the most query-salient evidence; rows past the atom
count repeat the lowest-ranked atom, making suffix truncation strictly
worse. With front-loading off the rank-to-row mapping is a seeded random
permutation. Also provides the token-merging reduction baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .allocation import MemoryBlock
from .errors import ConfigError, DimensionMismatch, TruncationOutOfRange


@dataclass(frozen=True, eq=False)
class SegmentContent:
    """One segment's content: unit vectors with vocabulary atom ids."""

    atoms: np.ndarray
    atom_ids: tuple[int, ...]
    segment_index: int

    def __post_init__(self):
        if self.atoms.ndim != 2 or self.atoms.shape[0] < 1:
            raise ConfigError("atoms must be a non-empty 2-D matrix")
        if len(self.atom_ids) != self.atoms.shape[0]:
            raise ConfigError(
                f"{len(self.atom_ids)} ids for {self.atoms.shape[0]} atoms"
            )

    @property
    def atom_count(self) -> int:
        return self.atoms.shape[0]


@dataclass(frozen=True)
class CompressorSpec:
    """Block capacity, embedding dim, per-row noise, and the front-load toggle."""

    k_max: int
    d: int
    token_noise_sigma: float = 0.0
    frontload: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.k_max < 1:
            raise ConfigError(f"k_max must be >= 1, got {self.k_max}")
        if self.d < 2:
            raise ConfigError(f"embedding dim must be >= 2, got {self.d}")
        if self.token_noise_sigma < 0:
            raise ConfigError(f"token_noise_sigma must be >= 0, got {self.token_noise_sigma}")


def compress_segment(
    spec: CompressorSpec, query: np.ndarray, content: SegmentContent
) -> MemoryBlock:
    """Produce the segment's k_max-row memory block.

    Atoms are ranked by descending cosine similarity to the query (ties by
    original position). Row j < A carries a noisy copy of the rank-j atom;
    rows j >= A are noisy repeats of the lowest-ranked atom. With frontload
    off, the row order is a seeded random permutation of that layout. The
    noise stream is keyed by (seed, segment_index) so blocks are
    deterministic per segment.
    """
    query = np.asarray(query, dtype=float)
    if query.ndim != 1 or query.shape[0] != spec.d:
        raise DimensionMismatch(f"query dim {query.shape} != spec dim {spec.d}")
    if content.atoms.shape[1] != spec.d:
        raise DimensionMismatch(
            f"content dim {content.atoms.shape[1]} != spec dim {spec.d}"
        )

    sims = content.atoms @ query
    sims = sims / (np.linalg.norm(content.atoms, axis=1) * np.linalg.norm(query))
    ranking = np.argsort(-sims, kind="stable")

    a = content.atom_count
    source = np.empty(spec.k_max, dtype=int)
    source[: min(a, spec.k_max)] = ranking[: min(a, spec.k_max)]
    if spec.k_max > a:
        source[a:] = ranking[a - 1]

    rng = np.random.default_rng([spec.seed, content.segment_index])
    if not spec.frontload:
        source = source[rng.permutation(spec.k_max)]

    tokens = content.atoms[source].astype(float)
    if spec.token_noise_sigma > 0:
        tokens = tokens + rng.normal(0.0, spec.token_noise_sigma, size=tokens.shape)
    atom_ids = tuple(content.atom_ids[i] for i in source)

    return MemoryBlock(
        tokens=tokens,
        segment_index=content.segment_index,
        latent_atom_ids=atom_ids,
    )


def merge_reduce(block: MemoryBlock, k: int) -> MemoryBlock:
    """Temporal-pooling reduction: k contiguous near-equal groups, mean each.

    The merged row's atom id is that of the group member nearest the group
    mean (euclidean, first on ties). Contiguous grouping keeps the cost
    linear; it deliberately does not cluster by similarity.
    """
    if not 1 <= k <= block.row_count:
        raise TruncationOutOfRange(
            f"k={k} outside [1, {block.row_count}] for segment {block.segment_index}"
        )
    groups = np.array_split(np.arange(block.row_count), k)
    rows = np.empty((k, block.tokens.shape[1]), dtype=float)
    ids: list[int] = []
    for g, idx in enumerate(groups):
        members = block.tokens[idx]
        mean = members.mean(axis=0)
        rows[g] = mean
        nearest = int(np.argmin(np.linalg.norm(members - mean, axis=1)))
        ids.append(block.latent_atom_ids[idx[nearest]])
    return MemoryBlock(
        tokens=rows,
        segment_index=block.segment_index,
        latent_atom_ids=tuple(ids),
    )
