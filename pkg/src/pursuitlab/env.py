"""Episode wrapper: world stepping, per-agent features, rewards, evader policy.

``PursuitEnv`` owns one episode at a time. Each step it asks the evader
behavior for its displacement, advances the world with the pursuers'
(turn, speed) commands, computes rewards, and rebuilds every pursuer's
normalized feature vector (tracking the previous target geometry so the
range/bearing rates are proper one-step differences).

Policies consume either the raw world (classical chasers) or the feature
vectors (learned policies); the ``needs_observations`` attribute tells the
harness whether features must be built at all.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional, Protocol, Sequence, runtime_checkable

import numpy as np

from .evaders import (
    ExternalPolicy,
    FixedPath,
    FixedPathPolicy,
    RepulsivePolicy,
    evader_step,
    standard_paths,
)
from .observe import build_observation, feature_length, normalize_observation
from .rewards import RewardConfig, formation_score, per_agent_rewards
from .sim import SimConfig, WorldState, reset_world, step_world

EVADER_MODES = ("repulsive", "repulsive_printed", "circle", "eight", "triangle", "external")


@runtime_checkable
class Policy(Protocol):
    """Anything that maps a world (and optionally features) to pursuer commands."""

    needs_observations: bool

    def begin(self, world: WorldState) -> None: ...

    def act(self, world: WorldState, observations) -> list[tuple[float, float]]: ...


class PursuitEnv:
    """One pursuit-evasion episode at a time, deterministically seeded.

    ``evader`` selects the opponent: the repulsive potential-field evader
    (optionally with the printed, attractive signs), one of the three fixed
    paths, or external command mode (live play). ``capture_radius`` may be
    overwritten between steps by a training curriculum; it resets to the
    config value on every ``reset``.
    """

    def __init__(
        self,
        sim_cfg: SimConfig,
        reward_cfg: Optional[RewardConfig] = None,
        evader: str = "repulsive",
        neighbor_cap: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
        observe: bool = True,
    ):
        if evader not in EVADER_MODES:
            raise ValueError(f"unknown evader mode {evader!r}; expected one of {EVADER_MODES}")
        sim_cfg.validate()
        self.cfg = sim_cfg
        self.reward_cfg = reward_cfg or RewardConfig()
        self.evader_mode = evader
        self.neighbor_cap = neighbor_cap
        self.observe = observe  # skip feature building for policies that act on the raw world
        self.rng = rng or np.random.default_rng(sim_cfg.seed)
        self.capture_radius = sim_cfg.capture_radius
        self.world: Optional[WorldState] = None
        self._prev_targets: list = []
        self._paths = standard_paths(sim_cfg.arena_radius)

    @property
    def feature_dim(self) -> int:
        return feature_length(self.cfg.n_pursuers, self.neighbor_cap)

    def reset(self, seed: Optional[int] = None) -> list[np.ndarray]:
        """Start a new episode; returns the initial per-agent features.

        With ``seed`` given the internal generator is reseeded first, so a
        trial is fully determined by (seed, commands).
        """
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self.capture_radius = self.cfg.capture_radius
        world = reset_world(self.cfg, self.rng)
        world = replace(world, evader=replace(world.evader, behavior=self._make_behavior()))
        if isinstance(world.evader.behavior, FixedPathPolicy):
            # fixed-path evaders start on the path, not in the spawn annulus
            x, y = world.evader.behavior.path.position()
            world = replace(world, evader=replace(world.evader, x=x, y=y))
        self.world = world
        self._prev_targets = [None] * self.cfg.n_pursuers
        return self._observe()

    def _make_behavior(self):
        mode = self.evader_mode
        if mode == "repulsive":
            return RepulsivePolicy(arena_radius=self.cfg.arena_radius)
        if mode == "repulsive_printed":
            return RepulsivePolicy(arena_radius=self.cfg.arena_radius, printed_signs=True)
        if mode == "external":
            return ExternalPolicy()
        geometry = self._paths[mode]
        phase = self.rng.uniform(0.0, geometry.length)
        return FixedPathPolicy(FixedPath(geometry, phase=phase))

    def _observe(self) -> list[np.ndarray]:
        if not self.observe:
            return []
        feats = []
        for i in range(self.cfg.n_pursuers):
            obs = build_observation(self.world, i, k=self.neighbor_cap, prev_target=self._prev_targets[i])
            self._prev_targets[i] = obs.target
            feats.append(normalize_observation(obs, self.cfg))
        return feats

    def step(
        self,
        commands: Sequence[tuple[float, float]],
        external_cmd: Optional[tuple[float, float]] = None,
    ) -> tuple[list[np.ndarray], list[float], bool, dict]:
        """Advance one step; returns (features, rewards, done, info).

        ``info`` carries the outcome, the post-step formation score (None
        for a single pursuer) and the minimum pursuer-evader distance.
        """
        displacement, new_behavior = evader_step(self.world, external_cmd)
        after = step_world(
            self.world,
            commands,
            (0.0, 0.0),
            self.cfg,
            evader_displacement=displacement,
            capture_radius=self.capture_radius,
        )
        after = replace(after, evader=replace(after.evader, behavior=new_behavior))
        rewards = per_agent_rewards(self.world, after, self.reward_cfg)
        self.world = after

        q = formation_score(after) if after.n_pursuers >= 2 else None
        ex, ey = after.evader.x, after.evader.y
        min_dist = min(((a.x - ex) ** 2 + (a.y - ey) ** 2) ** 0.5 for a in after.agents)
        info = {"outcome": after.outcome, "q": q, "min_dist": min_dist}
        return self._observe(), rewards, not after.outcome.running, info
