"""Run configuration documents for the simulation commands.

A run config is a JSON object with the documented field names below; every
field has a desk-scale default, so an empty object is a valid config. The
budget may be a single integer or a list of integers to sweep. Validation
errors carry the offending field path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .allocation import AllocationConfig
from .compressor import CompressorSpec
from .episodes import EpisodeSpec
from .errors import ConfigError, ParseError
from .policies import POLICY_KINDS, Policy
from .relevance import ScorerSpec

DEFAULT_POLICIES = list(POLICY_KINDS)

_FIELDS = {
    "n_segments": (int, 32),
    "atoms_per_segment": (int, 8),
    "embed_dim": (int, 32),
    "vocab_size": (int, 64),
    "needle_count": (int, 1),
    "query_noise_sigma": (float, 0.0),
    "seed": (int, 0),
    "budget": (None, 512),  # int or list of ints
    "k_min": (int, 4),
    "k_max": (int, 64),
    "epsilon": (float, 1e-6),
    "trials": (int, 200),
    "policies": (list, None),
    "noise_sigma": (float, 0.0),
    "sharpness": (float, 10.0),
    "frontload": (bool, True),
    "token_noise_sigma": (float, 0.05),
    "window": (int, 8),
    "fps": (float, 2.0),
}


@dataclass
class RunConfig:
    """Validated run configuration with all defaults resolved."""

    n_segments: int = 32
    atoms_per_segment: int = 8
    embed_dim: int = 32
    vocab_size: int = 64
    needle_count: int = 1
    query_noise_sigma: float = 0.0
    seed: int = 0
    budgets: list[int] = field(default_factory=lambda: [512])
    k_min: int = 4
    k_max: int = 64
    epsilon: float = 1e-6
    trials: int = 200
    policies: list[str] = field(default_factory=lambda: list(DEFAULT_POLICIES))
    noise_sigma: float = 0.0
    sharpness: float = 10.0
    frontload: bool = True
    token_noise_sigma: float = 0.05
    window: int = 8
    fps: float = 2.0

    def episode_spec(self) -> EpisodeSpec:
        return EpisodeSpec(
            n_segments=self.n_segments,
            atoms_per_segment=self.atoms_per_segment,
            embed_dim=self.embed_dim,
            vocab_size=self.vocab_size,
            needle_count=self.needle_count,
            query_noise_sigma=self.query_noise_sigma,
            seed=self.seed,
        )

    def allocation_config(self, budget: int) -> AllocationConfig:
        return AllocationConfig(
            b_max=budget, k_min=self.k_min, k_max=self.k_max, epsilon=self.epsilon
        )

    def scorer_spec(self) -> ScorerSpec:
        return ScorerSpec(
            kind="oracle",
            noise_sigma=self.noise_sigma,
            sharpness=self.sharpness,
            seed=self.seed,
        )

    def compressor_spec(self) -> CompressorSpec:
        return CompressorSpec(
            k_max=self.k_max,
            d=self.embed_dim,
            token_noise_sigma=self.token_noise_sigma,
            frontload=self.frontload,
            seed=self.seed,
        )

    def policy_list(self) -> list[Policy]:
        return [Policy(kind=k) for k in self.policies]


def _coerce_number(name: str, value, want: type):
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"config.{name}: expected a number, got {value!r}")
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"config.{name}: expected an integer, got {value!r}")
        return value
    if want is bool:
        if not isinstance(value, bool):
            raise ParseError(f"config.{name}: expected a boolean, got {value!r}")
        return value
    raise AssertionError(name)


def load_run_config(text: str) -> RunConfig:
    """Parse and validate a run-config document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid config document: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(doc, dict):
        raise ParseError("config document must be an object")
    unknown = set(doc) - set(_FIELDS)
    if unknown:
        raise ParseError(f"config has unknown fields: {sorted(unknown)}")

    cfg = RunConfig()
    for name, value in doc.items():
        if name == "budget":
            if isinstance(value, int) and not isinstance(value, bool):
                cfg.budgets = [value]
            elif (
                isinstance(value, list)
                and value
                and all(isinstance(b, int) and not isinstance(b, bool) for b in value)
            ):
                cfg.budgets = list(value)
            else:
                raise ParseError(
                    f"config.budget: expected an integer or integer array, got {value!r}"
                )
        elif name == "policies":
            if not isinstance(value, list):
                raise ParseError(f"config.policies: expected an array, got {value!r}")
            for i, kind in enumerate(value):
                if kind not in POLICY_KINDS:
                    raise ParseError(
                        f"config.policies[{i}]: unknown policy {kind!r}; "
                        f"valid kinds: {', '.join(POLICY_KINDS)}"
                    )
            cfg.policies = list(value)
        else:
            want, _ = _FIELDS[name]
            setattr(cfg, name, _coerce_number(name, value, want))

    # Surface domain invariant violations with the config prefix.
    try:
        cfg.episode_spec()
        for b in cfg.budgets:
            cfg.allocation_config(b)
        cfg.scorer_spec()
        cfg.compressor_spec()
        if cfg.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {cfg.trials}")
        if cfg.window < 1:
            raise ConfigError(f"window must be >= 1, got {cfg.window}")
        if cfg.fps <= 0:
            raise ConfigError(f"fps must be > 0, got {cfg.fps}")
    except ConfigError as exc:
        raise ParseError(f"config: {exc}") from exc
    return cfg


def default_config() -> RunConfig:
    """The bundled desk-scale configuration."""
    return RunConfig()
