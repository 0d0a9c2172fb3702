"""Plain-text run configuration: ``key = value`` lines, grouped dataclasses.

The file format is deliberately simple: one assignment per line, ``#``
starts a comment, blank lines are ignored. Keys map onto the configuration
dataclasses as follows:

* simulation keys are bare (``n_pursuers``, ``arena_radius``,
  ``capture_radius``, ``timeout_steps``, ``pursuer_speed``,
  ``evader_speed``, ``max_turn_rate``, ``variable_speed``,
  ``pursuer_spawn_radius``, ``evader_spawn_inner_radius``, ``seed``);
* reward keys are bare (``captor_reward``, ``helper_reward``,
  ``formation_weight``, ``distance_weight``);
* trainer keys carry the ``td3_`` prefix (``td3_train_steps``, ...);
* baseline parameters carry their model prefix (``janosov_``,
  ``angelani_``);
* run-level keys: ``policy`` (td3 | janosov | angelani | pure_pursuit),
  ``checkpoint`` (path; ``{n}`` expands to the pursuer count), ``gain``,
  ``neighbor_cap`` (-1 = observe everyone), ``evader`` (repulsive |
  repulsive_printed | circle | eight | triangle | external), ``trials``,
  ``base_seed``, ``workers``, ``out_dir``, ``tick_hz``.

Booleans accept true/false/yes/no/1/0; ``td3_hidden_sizes`` is a
comma-separated integer list. Unknown keys and unparseable values raise
``ConfigError``.
"""

from __future__ import annotations

import typing
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .baselines import AngelaniParams, JanosovParams
from .rewards import RewardConfig
from .sim import SimConfig
from .td3 import TD3Config


class ConfigError(ValueError):
    """A configuration file or override that cannot be applied."""


@dataclass
class RunConfig:
    """Everything a CLI invocation needs, with sensible defaults."""

    sim: SimConfig = field(default_factory=SimConfig)
    rewards: RewardConfig = field(default_factory=RewardConfig)
    td3: TD3Config = field(default_factory=TD3Config)
    janosov: JanosovParams = field(default_factory=JanosovParams)
    angelani: AngelaniParams = field(default_factory=AngelaniParams)
    policy: str = "td3"
    checkpoint: str = ""
    gain: float = 4.0
    neighbor_cap: int = -1  # -1 observes all other pursuers
    evader: str = "repulsive"
    trials: int = 100
    base_seed: int = 0
    workers: int = 1
    out_dir: str = "runs"
    tick_hz: float = 20.0

    def neighbor_cap_or_none(self) -> Optional[int]:
        return None if self.neighbor_cap < 0 else self.neighbor_cap


_RUN_LEVEL_KEYS = (
    "policy", "checkpoint", "gain", "neighbor_cap", "evader",
    "trials", "base_seed", "workers", "out_dir", "tick_hz",
)

POLICY_KINDS = ("td3", "janosov", "angelani", "pure_pursuit")
EVADER_KINDS = ("repulsive", "repulsive_printed", "circle", "eight", "triangle", "external")


def _schema() -> dict[str, tuple[str, str, type]]:
    """key -> (attribute group, field name, declared type)."""
    table: dict[str, tuple[str, str, type]] = {}
    for attr, cls in (("sim", SimConfig), ("rewards", RewardConfig)):
        hints = typing.get_type_hints(cls)
        for f in fields(cls):
            table[f.name] = (attr, f.name, hints[f.name])
    for prefix, attr, cls in (
        ("td3_", "td3", TD3Config),
        ("janosov_", "janosov", JanosovParams),
        ("angelani_", "angelani", AngelaniParams),
    ):
        hints = typing.get_type_hints(cls)
        for f in fields(cls):
            table[prefix + f.name] = (attr, f.name, hints[f.name])
    hints = typing.get_type_hints(RunConfig)
    for key in _RUN_LEVEL_KEYS:
        table[key] = ("", key, hints[key])
    return table


SCHEMA = _schema()


def _parse_value(raw: str, declared: type, key: str):
    origin = typing.get_origin(declared)
    args = typing.get_args(declared)
    if origin is typing.Union and type(None) in args:  # Optional[...]
        if raw.lower() in ("none", ""):
            return None
        declared = next(a for a in args if a is not type(None))
        origin = typing.get_origin(declared)
        args = typing.get_args(declared)
    try:
        if declared is bool:
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if declared is int:
            return int(raw)
        if declared is float:
            return float(raw)
        if declared is str:
            return raw
        if origin is tuple:
            return tuple(int(part.strip()) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}") from None
    raise ConfigError(f"unsupported type for key {key!r}: {declared}")


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; comments (#) and blanks are skipped."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        out[key.strip()] = value.strip()
    return out


def apply_settings(cfg: RunConfig, settings: dict[str, str]) -> RunConfig:
    """Return a new RunConfig with the given raw key/value settings applied."""
    grouped: dict[str, dict] = {}
    for key, raw in settings.items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown configuration key {key!r}")
        attr, name, declared = SCHEMA[key]
        grouped.setdefault(attr, {})[name] = _parse_value(raw, declared, key)

    for attr, changes in grouped.items():
        if attr == "":
            cfg = replace(cfg, **changes)
        else:
            cfg = replace(cfg, **{attr: replace(getattr(cfg, attr), **changes)})
    return cfg


def load_run_config(path, overrides: Optional[dict[str, str]] = None) -> RunConfig:
    """RunConfig from a file (optional) plus raw overrides (e.g. CLI flags)."""
    cfg = RunConfig()
    if path is not None:
        text = Path(path).read_text()
        cfg = apply_settings(cfg, parse_kv_text(text))
    if overrides:
        cfg = apply_settings(cfg, overrides)
    if cfg.policy not in POLICY_KINDS:
        raise ConfigError(f"unknown policy {cfg.policy!r}; expected one of {POLICY_KINDS}")
    if cfg.evader not in EVADER_KINDS:
        raise ConfigError(f"unknown evader {cfg.evader!r}; expected one of {EVADER_KINDS}")
    try:
        cfg.sim.validate()
        cfg.rewards.validate()
        cfg.td3.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def dump_run_config(cfg: RunConfig) -> str:
    """Render a RunConfig back into the file format (defaults included)."""
    lines = []
    for key, (attr, name, _) in SCHEMA.items():
        holder = cfg if attr == "" else getattr(cfg, attr)
        value = getattr(holder, name)
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        elif value is None:
            value = "none"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
