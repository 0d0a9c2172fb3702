"""Classical pursuit baselines adapted to unicycle kinematics.

The underlying heuristics are omnidirectional: each produces a desired
velocity (dx, dy). A proportional heading controller converts that into a
bounded turn rate:

    desired_heading = atan2(dy, dx)
    turn = clamp(K * wrap(desired_heading - heading), +-max_turn_rate)

Three chase models are provided:

* pure pursuit: drive straight at the target;
* a Janosov-style chaser: drive at a predicted target position (linear
  extrapolation), with short-range inter-pursuer repulsion and a softening
  push away from the arena wall;
* an Angelani-style chaser: target attraction blended with Vicsek heading
  alignment of nearby pursuers and short-range repulsion.

These are faithful simplifications of the published models, not
re-implementations; all constants are exposed in the parameter records.
``tune_gain`` grid-searches the controller gain by capture count, the same
procedure used to pick gains in the benchmark.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

from .sim import WorldState, wrap_angle

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True, slots=True)
class HeadingController:
    """P controller from desired heading to turn rate."""

    gain: float = 4.0
    max_turn_rate: float = math.pi / 10.0

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("controller gain must be > 0")


def heading_to_omega(ctrl: HeadingController, heading: float, dx: float, dy: float) -> float:
    """Turn rate steering toward the direction of (dx, dy).

    The heading error is wrapped to the shortest signed arc before the gain
    is applied. A zero desired velocity yields a zero turn.
    """
    if dx == 0.0 and dy == 0.0:
        return 0.0
    error = wrap_angle(math.atan2(dy, dx) - heading)
    return min(max(ctrl.gain * error, -ctrl.max_turn_rate), ctrl.max_turn_rate)


def _index_direction(i: int) -> tuple[float, float]:
    # deterministic symmetry breaker for exactly coincident pursuers
    a = GOLDEN_ANGLE * (i + 1)
    return math.cos(a), math.sin(a)


def pure_pursuit_action(world: WorldState, i: int, speed: float) -> tuple[float, float]:
    """Velocity pointing straight at the evader."""
    a = world.agents[i]
    dx = world.evader.x - a.x
    dy = world.evader.y - a.y
    d = math.hypot(dx, dy)
    if d == 0.0:
        return 0.0, 0.0
    return speed * dx / d, speed * dy / d


@dataclass(frozen=True, slots=True)
class JanosovParams:
    speed: float = 10.0
    arena_radius: float = 430.0
    prediction_horizon: float = 6.0    # steps of linear target extrapolation
    interaction_radius: float = 80.0   # px; inter-pursuer repulsion range
    repulsion_strength: float = 0.6
    wall_margin: float = 60.0          # px; wall softening range
    wall_strength: float = 1.0


def janosov_action(
    world: WorldState,
    i: int,
    params: JanosovParams,
    evader_velocity: tuple[float, float] = (0.0, 0.0),
) -> tuple[float, float]:
    """Prediction + repulsion + wall-softening chase velocity, capped at the
    pursuer speed.

    ``evader_velocity`` is the caller's running estimate (px/step); a zero
    estimate degenerates into plain pursuit of the current position.
    """
    me = world.agents[i]
    aim_x = world.evader.x + params.prediction_horizon * evader_velocity[0]
    aim_y = world.evader.y + params.prediction_horizon * evader_velocity[1]
    dx, dy = aim_x - me.x, aim_y - me.y
    d = math.hypot(dx, dy)
    if d > 0:
        vx, vy = params.speed * dx / d, params.speed * dy / d
    else:
        vx = vy = 0.0

    # inter-pursuer repulsion, inverse-distance with a 1 px cap
    for j, other in enumerate(world.agents):
        if j == i:
            continue
        rx, ry = me.x - other.x, me.y - other.y
        dist = math.hypot(rx, ry)
        if dist >= params.interaction_radius:
            continue
        if dist == 0.0:
            ux, uy = _index_direction(i)
            dist = 1.0
        else:
            ux, uy = rx / dist, ry / dist
            dist = max(dist, 1.0)
        mag = params.repulsion_strength * params.speed * (params.interaction_radius / dist - 1.0) / (
            params.interaction_radius - 1.0
        )
        vx += mag * ux
        vy += mag * uy

    # wall softening: push inward when close to the boundary
    r = math.hypot(me.x, me.y)
    wall_dist = params.arena_radius - r
    if r > 0 and wall_dist < params.wall_margin:
        push = params.wall_strength * params.speed * (1.0 - wall_dist / params.wall_margin)
        vx -= push * me.x / r
        vy -= push * me.y / r

    norm = math.hypot(vx, vy)
    if norm > params.speed:
        vx, vy = vx * params.speed / norm, vy * params.speed / norm
    return vx, vy


@dataclass(frozen=True, slots=True)
class AngelaniParams:
    speed: float = 10.0
    alignment_radius: float = 150.0
    repulsion_radius: float = 40.0
    alignment_weight: float = 0.6
    repulsion_weight: float = 1.0


def angelani_action(world: WorldState, i: int, params: AngelaniParams) -> tuple[float, float]:
    """Vicsek-style chase: target attraction + neighbor heading alignment +
    short-range repulsion, emitted at full speed."""
    me = world.agents[i]
    tx, ty = world.evader.x - me.x, world.evader.y - me.y
    td = math.hypot(tx, ty)
    if td > 0:
        dir_x, dir_y = tx / td, ty / td
    else:
        dir_x, dir_y = 1.0, 0.0

    align_x = align_y = 0.0
    n_align = 0
    rep_x = rep_y = 0.0
    for j, other in enumerate(world.agents):
        if j == i:
            continue
        rx, ry = me.x - other.x, me.y - other.y
        dist = math.hypot(rx, ry)
        if dist < params.alignment_radius:
            align_x += math.cos(other.heading)
            align_y += math.sin(other.heading)
            n_align += 1
        if dist < params.repulsion_radius:
            if dist == 0.0:
                ux, uy = _index_direction(i)
            else:
                ux, uy = rx / dist, ry / dist
            f = 1.0 - dist / params.repulsion_radius
            rep_x += f * ux
            rep_y += f * uy

    if n_align:
        dir_x += params.alignment_weight * align_x / n_align
        dir_y += params.alignment_weight * align_y / n_align
    dir_x += params.repulsion_weight * rep_x
    dir_y += params.repulsion_weight * rep_y

    norm = math.hypot(dir_x, dir_y)
    if norm == 0.0:
        if td > 0:
            return params.speed * tx / td, params.speed * ty / td
        return params.speed, 0.0
    return params.speed * dir_x / norm, params.speed * dir_y / norm


# --------------------------------------------------------------------------
# stateful policy adapter


class ChaserPolicy:
    """Unicycle policy wrapping one of the omnidirectional chase models.

    Tracks the evader position between steps to estimate its velocity
    (used by the Janosov-style prediction). Produces one (turn, speed)
    command per pursuer.
    """

    def __init__(
        self,
        model: str = "pure_pursuit",
        controller: Optional[HeadingController] = None,
        speed: float = 10.0,
        janosov: Optional[JanosovParams] = None,
        angelani: Optional[AngelaniParams] = None,
    ):
        if model not in ("pure_pursuit", "janosov", "angelani"):
            raise ValueError(f"unknown baseline model {model!r}")
        self.model = model
        self.controller = controller or HeadingController()
        self.speed = speed
        self.janosov = janosov or JanosovParams(speed=speed)
        self.angelani = angelani or AngelaniParams(speed=speed)
        self._prev_evader: Optional[tuple[float, float]] = None

    needs_observations = False

    def begin(self, world: WorldState) -> None:
        self._prev_evader = (world.evader.x, world.evader.y)

    def act(self, world: WorldState, observations=None) -> list[tuple[float, float]]:
        if self._prev_evader is None:
            ev_vel = (0.0, 0.0)
        else:
            ev_vel = (world.evader.x - self._prev_evader[0], world.evader.y - self._prev_evader[1])
        self._prev_evader = (world.evader.x, world.evader.y)

        actions = []
        for i, agent in enumerate(world.agents):
            if self.model == "janosov":
                dx, dy = janosov_action(world, i, self.janosov, ev_vel)
            elif self.model == "angelani":
                dx, dy = angelani_action(world, i, self.angelani)
            else:
                dx, dy = pure_pursuit_action(world, i, self.speed)
            turn = heading_to_omega(self.controller, agent.heading, dx, dy)
            actions.append((turn, self.speed))
        return actions


DEFAULT_GAIN_GRID = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)


def tune_gain(
    make_policy: Callable[[float], ChaserPolicy],
    cfg,
    trials_per_gain: int = 50,
    grid: tuple[float, ...] = DEFAULT_GAIN_GRID,
    base_seed: int = 0,
) -> tuple[float, dict[float, float]]:
    """Grid-search the controller gain by capture rate against the repulsive
    evader.

    Returns the best gain (ties to the smaller gain) and the per-gain
    capture-rate report. Warns when no gain captures anything.
    """
    from .bench import run_trial  # late import; bench builds on these policies

    report: dict[float, float] = {}
    for gain in grid:
        policy = make_policy(gain)
        captures = 0
        for k in range(trials_per_gain):
            result = run_trial(policy, "repulsive", cfg, seed=base_seed + k)
            captures += result.captured
        report[gain] = captures / trials_per_gain

    best_rate = max(report.values())
    if best_rate == 0.0:
        warnings.warn("no gain in the grid produced a single capture")
    best_gain = min(g for g, r in report.items() if r == best_rate)
    return best_gain, report
