"""Deterministic discrete-time world model for multi-agent pursuit-evasion.

Pursuers follow unicycle kinematics (heading-constrained motion, bounded
turn rate), the evader is omnidirectional. The world lives in a circular
arena centered at the origin; entities that would leave the arena are
projected radially back onto the boundary. A trial ends when a pursuer
gets within the capture radius of the evader, or when the step counter
reaches the timeout.

All distances are in pixels, angles in radians, and one simulation step is
the unit of time. ``WorldState`` is a value: stepping returns a new state,
so episodes can be advanced and replayed deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return (angle + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True, slots=True)
class AgentState:
    """Pose and last applied commands of one unicycle pursuer.

    ``turn_rate`` holds the heading change applied on the previous step; it
    doubles as the heading-rate feature exposed to observers (zero at the
    start of an episode, before any command was applied).
    """

    x: float
    y: float
    heading: float       # radians, wrapped to [-pi, pi)
    speed: float = 0.0   # pixels/step, last applied linear speed
    turn_rate: float = 0.0  # radians/step, last applied angular rate


@dataclass(frozen=True, slots=True)
class EvaderState:
    """Position and speed of the omnidirectional evader.

    ``behavior`` is an opaque handle for whatever motion policy drives the
    evader (repulsive field, fixed path, external commands); the policy's
    mutable bits (path phase, previous direction) live inside it so that
    world states stay self-contained.
    """

    x: float
    y: float
    speed: float         # pixels/step
    behavior: object = None


class Status(Enum):
    RUNNING = "running"
    CAPTURED = "captured"
    TIMEOUT = "timeout"


@dataclass(frozen=True, slots=True)
class Outcome:
    status: Status
    captor: Optional[int] = None  # index of the capturing pursuer
    step: Optional[int] = None    # step at which the episode ended

    @property
    def running(self) -> bool:
        return self.status is Status.RUNNING


RUNNING = Outcome(Status.RUNNING)


@dataclass(frozen=True, slots=True)
class SimConfig:
    """Static parameters of the pursuit-evasion world.

    Defaults follow the benchmark setting: a 430 px arena, capture radius
    30 px, 500-step timeout, pursuer speed 10 px/step, turn rate capped at
    pi/10 rad/step, pursuers spawned inside a 100 px disk and the evader
    in the [300, arena_radius] annulus.
    """

    n_pursuers: int = 3
    arena_radius: float = 430.0
    capture_radius: float = 30.0
    timeout_steps: int = 500
    pursuer_speed: float = 10.0
    evader_speed: float = 12.0
    max_turn_rate: float = math.pi / 10.0
    variable_speed: bool = False
    pursuer_spawn_radius: float = 100.0
    evader_spawn_inner_radius: float = 300.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_pursuers < 1:
            raise ValueError("n_pursuers must be >= 1")
        if self.capture_radius <= 0:
            raise ValueError("capture_radius must be > 0")
        if self.timeout_steps <= 0:
            raise ValueError("timeout_steps must be > 0")
        if not (0 < self.pursuer_spawn_radius < self.evader_spawn_inner_radius < self.arena_radius):
            raise ValueError(
                "spawn areas must satisfy pursuer_spawn_radius < "
                "evader_spawn_inner_radius < arena_radius"
            )
        if self.max_turn_rate <= 0 or self.pursuer_speed < 0 or self.evader_speed < 0:
            raise ValueError("speeds must be >= 0 and max_turn_rate > 0")


@dataclass(frozen=True, slots=True)
class WorldState:
    """Complete state of one episode: all pursuers, the evader, the clock."""

    agents: tuple[AgentState, ...]
    evader: EvaderState
    t: int = 0
    outcome: Outcome = RUNNING

    @property
    def n_pursuers(self) -> int:
        return len(self.agents)


def integrate_unicycle(
    state: AgentState,
    turn_cmd: float,
    speed_cmd: float,
    max_turn_rate: float,
    max_speed: float,
) -> AgentState:
    """Advance a unicycle agent by one step of explicit Euler.

    The position update uses the pre-update heading; the heading is updated
    afterwards, so a straight-line command moves exactly ``speed`` along the
    current heading. Commands are saturated to the kinematic limits before
    being applied.

    Raises:
        ValueError: if any input is not finite.
    """
    if not (math.isfinite(turn_cmd) and math.isfinite(speed_cmd)):
        raise ValueError(f"non-finite command ({turn_cmd}, {speed_cmd})")
    if not (math.isfinite(state.x) and math.isfinite(state.y) and math.isfinite(state.heading)):
        raise ValueError("non-finite agent state")

    turn = min(max(turn_cmd, -max_turn_rate), max_turn_rate)
    speed = min(max(speed_cmd, 0.0), max_speed)
    return AgentState(
        x=state.x + speed * math.cos(state.heading),
        y=state.y + speed * math.sin(state.heading),
        heading=wrap_angle(state.heading + turn),
        speed=speed,
        turn_rate=turn,
    )


def clamp_to_arena(x: float, y: float, arena_radius: float) -> tuple[float, float]:
    """Project a position radially onto the arena boundary if it lies outside.

    Positions inside the arena are returned unchanged (bit-exact).
    """
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite position ({x}, {y})")
    norm_sq = x * x + y * y
    if norm_sq <= arena_radius * arena_radius:
        return x, y
    scale = arena_radius / math.sqrt(norm_sq)
    return x * scale, y * scale


def detect_capture(world: WorldState, capture_radius: float) -> Optional[int]:
    """Index of the closest pursuer if it is within the capture radius.

    Ties on distance are broken by the lowest index.
    """
    ex, ey = world.evader.x, world.evader.y
    best_idx = None
    best_dsq = math.inf
    for i, a in enumerate(world.agents):
        dsq = (a.x - ex) ** 2 + (a.y - ey) ** 2
        if dsq < best_dsq:
            best_dsq = dsq
            best_idx = i
    if best_idx is not None and best_dsq <= capture_radius * capture_radius:
        return best_idx
    return None


def step_world(
    world: WorldState,
    actions: Sequence[tuple[float, float]],
    evader_cmd: tuple[float, float],
    cfg: SimConfig,
    evader_displacement: Optional[tuple[float, float]] = None,
    capture_radius: Optional[float] = None,
) -> WorldState:
    """Advance the whole world by one step (simultaneous-move semantics).

    Every pursuer is integrated with its ``(turn_rate, speed)`` action, the
    evader moves ``evader.speed`` along the unit direction ``evader_cmd``
    (or by ``evader_displacement`` exactly, when a motion policy supplies
    the precise step, e.g. arc-length travel along a fixed path). Everyone
    is clamped to the arena, then capture and timeout are checked.

    ``capture_radius`` overrides ``cfg.capture_radius`` so a training
    curriculum can widen the capture region without rewriting the config.

    Raises:
        RuntimeError: when stepping an episode that already ended.
        ValueError: when the action count does not match the pursuer count.
    """
    if not world.outcome.running:
        raise RuntimeError(f"cannot step a finished episode (outcome={world.outcome.status.value})")
    if len(actions) != world.n_pursuers:
        raise ValueError(f"expected {world.n_pursuers} actions, got {len(actions)}")

    agents = []
    for agent, (turn_cmd, speed_cmd) in zip(world.agents, actions):
        moved = integrate_unicycle(agent, turn_cmd, speed_cmd, cfg.max_turn_rate, cfg.pursuer_speed)
        cx, cy = clamp_to_arena(moved.x, moved.y, cfg.arena_radius)
        if cx != moved.x or cy != moved.y:
            moved = replace(moved, x=cx, y=cy)  # heading unchanged on clamp
        agents.append(moved)

    if evader_displacement is None:
        dx = world.evader.speed * evader_cmd[0]
        dy = world.evader.speed * evader_cmd[1]
    else:
        dx, dy = evader_displacement
    ex, ey = clamp_to_arena(world.evader.x + dx, world.evader.y + dy, cfg.arena_radius)
    evader = replace(world.evader, x=ex, y=ey)

    t = world.t + 1
    new_world = WorldState(agents=tuple(agents), evader=evader, t=t)

    radius = cfg.capture_radius if capture_radius is None else capture_radius
    captor = detect_capture(new_world, radius)
    if captor is not None:
        outcome = Outcome(Status.CAPTURED, captor=captor, step=t)
    elif t >= cfg.timeout_steps:
        outcome = Outcome(Status.TIMEOUT, step=t)
    else:
        outcome = RUNNING
    return replace(new_world, outcome=outcome)


def reset_world(cfg: SimConfig, rng: np.random.Generator) -> WorldState:
    """Sample the initial world: pursuers clustered near the center, evader
    in the outer annulus.

    Pursuers are uniform over the spawn disk with uniform headings; the
    evader is uniform (by area) over the annulus between the inner spawn
    radius and the arena boundary. The draw order is fixed (per pursuer:
    radius, angle, heading; then evader radius, angle), so one seed always
    produces one world.
    """
    cfg.validate()
    agents = []
    for _ in range(cfg.n_pursuers):
        r = cfg.pursuer_spawn_radius * math.sqrt(rng.uniform())
        theta = rng.uniform(-math.pi, math.pi)
        heading = rng.uniform(-math.pi, math.pi)
        agents.append(AgentState(x=r * math.cos(theta), y=r * math.sin(theta), heading=heading))

    r0 = cfg.evader_spawn_inner_radius
    r = math.sqrt(rng.uniform() * (cfg.arena_radius**2 - r0**2) + r0**2)
    theta = rng.uniform(-math.pi, math.pi)
    evader = EvaderState(x=r * math.cos(theta), y=r * math.sin(theta), speed=cfg.evader_speed)

    return WorldState(agents=tuple(agents), evader=evader)
