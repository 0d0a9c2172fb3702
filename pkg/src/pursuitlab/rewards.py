"""Per-agent rewards: terminal captor/helper split, dense formation + distance cost.

While the evader is free, every pursuer receives the same group formation
penalty plus its own distance-to-target penalty, both negated:

    reward_i = -formation_weight * q - distance_weight * distance_i

The formation score q is a group metric in [0, 2] (lower is better): with
unit vectors u_i pointing from each pursuer toward the target and agent 0
defined as the pursuer closest to the target,

    q = (1/n) * sum_i (u_0 . u_i + 1)

q is 0 when the pursuers approach from perfectly opposite directions of the
closest agent and 2 when they all come from the same direction. On the
capture step the capturing agent gets ``captor_reward`` and every teammate
``helper_reward`` instead.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .sim import Status, WorldState


@dataclass(frozen=True, slots=True)
class RewardConfig:
    """Weights of the reward structure.

    Defaults: captor 100, helper 10, formation weight 0.1, distance weight
    0.002 (reward per pixel). ``captor_reward > helper_reward`` is the
    intended ordering; the transposed variant (captor 10, helper 100) is
    constructible for ablations via ``transposed()``.
    """

    captor_reward: float = 100.0
    helper_reward: float = 10.0
    formation_weight: float = 0.1   # reward per formation-score unit
    distance_weight: float = 0.002  # reward per pixel of distance to target

    def validate(self) -> None:
        if self.formation_weight < 0 or self.distance_weight < 0:
            raise ValueError("reward weights must be >= 0")

    def transposed(self) -> "RewardConfig":
        """Variant with captor/helper swapped (the ablation ordering)."""
        return RewardConfig(
            captor_reward=self.helper_reward,
            helper_reward=self.captor_reward,
            formation_weight=self.formation_weight,
            distance_weight=self.distance_weight,
        )


def formation_score(world: WorldState) -> float:
    """Group formation score q in [0, 2]; lower means better angular spread.

    Requires at least two pursuers. A pursuer exactly on top of the target
    has no defined direction; the convention (1, 0) is used and a warning
    emitted (the episode would have ended in capture anyway).
    """
    n = world.n_pursuers
    if n < 2:
        raise ValueError("formation score needs at least two pursuers")

    ex, ey = world.evader.x, world.evader.y
    units = []
    best_i = 0
    best_d = math.inf
    for i, a in enumerate(world.agents):
        dx = ex - a.x
        dy = ey - a.y
        d = math.hypot(dx, dy)
        if d == 0.0:
            warnings.warn("pursuer coincident with target; using unit vector (1, 0)")
            units.append((1.0, 0.0))
        else:
            units.append((dx / d, dy / d))
        if d < best_d:
            best_d = d
            best_i = i

    ux, uy = units[best_i]
    return sum(ux * vx + uy * vy + 1.0 for vx, vy in units) / n


def per_agent_rewards(
    world_before: WorldState,
    world_after: WorldState,
    cfg: RewardConfig,
) -> list[float]:
    """Rewards for the step that took ``world_before`` to ``world_after``.

    On capture, exactly one agent (the captor) receives ``captor_reward``
    and the others ``helper_reward``. Otherwise every agent receives the
    negated weighted sum of the formation score and its own distance to the
    target, both evaluated on the post-step world (q is taken as 0 for a
    single pursuer, where the formation score is undefined).
    """
    n = world_after.n_pursuers
    if world_after.outcome.status is Status.CAPTURED:
        captor = world_after.outcome.captor
        return [cfg.captor_reward if i == captor else cfg.helper_reward for i in range(n)]

    q = formation_score(world_after) if n >= 2 else 0.0
    ex, ey = world_after.evader.x, world_after.evader.y
    return [
        -cfg.formation_weight * q - cfg.distance_weight * math.hypot(ex - a.x, ey - a.y)
        for a in world_after.agents
    ]
