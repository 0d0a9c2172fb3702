"""Per-agent local observations: egocentric target and neighbor geometry.

Each pursuer observes its own heading and heading rate, the target's
relative state (distance, range rate, bearing, bearing rate), and one
(distance, bearing) pair per observed neighbor. Neighbors are listed in
sweep order: sorted by bearing mapped to [0, 2*pi), i.e. a counter-clockwise
sweep starting at the observer's own heading. Sorting by geometry instead of
by agent index makes the observation invariant to relabeling the (homogeneous)
pursuers. With n pursuers and all neighbors visible the flat feature vector
has 2n+4 entries.

Flat feature layout (index -> meaning), for k observed neighbors:

    0           observer heading (world frame)
    1           observer heading rate (previous step's applied turn)
    2, 3        target distance, target range rate
    4, 5        target bearing, target bearing rate
    6+2m, 7+2m  neighbor m distance, neighbor m bearing   (m = 0..k-1)

``normalize_observation`` maps every entry into [-1, 1] for network input;
the layout is identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .sim import AgentState, SimConfig, WorldState, wrap_angle

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, slots=True)
class RelativeState:
    """Geometry of one other entity as seen by an observer.

    Rates are finite differences against the previous step and are only
    tracked for the target; they are zero on the first step of an episode.
    """

    distance: float
    bearing: float            # radians in [-pi, pi), 0 = dead ahead
    distance_rate: float = 0.0
    bearing_rate: float = 0.0


@dataclass(frozen=True, slots=True)
class Observation:
    heading: float
    heading_rate: float
    target: RelativeState
    neighbors: tuple[tuple[float, float], ...]  # (distance, bearing) in sweep order

    def __len__(self) -> int:
        return 6 + 2 * len(self.neighbors)


def relative_state(
    observer: AgentState,
    other_position: tuple[float, float],
    prev: Optional[RelativeState] = None,
) -> RelativeState:
    """Distance and bearing of a point as seen from an agent's pose.

    The bearing is the angle from the observer's heading to the line of
    sight, wrapped to [-pi, pi). Coincident positions get bearing 0 by
    convention. With ``prev`` given, range rate and bearing rate are the
    one-step differences (bearing difference taken on the shortest arc).
    """
    dx = other_position[0] - observer.x
    dy = other_position[1] - observer.y
    distance = math.hypot(dx, dy)
    bearing = 0.0 if distance == 0.0 else wrap_angle(math.atan2(dy, dx) - observer.heading)
    if prev is None:
        return RelativeState(distance, bearing)
    return RelativeState(
        distance,
        bearing,
        distance_rate=distance - prev.distance,
        bearing_rate=wrap_angle(bearing - prev.bearing),
    )


def build_observation(
    world: WorldState,
    i: int,
    k: Optional[int] = None,
    prev_target: Optional[RelativeState] = None,
) -> Observation:
    """Observation of pursuer ``i``: target block, then neighbors in sweep order.

    ``k`` caps how many neighbors are observed; the k nearest by distance are
    selected (ties to the lower index), then ordered by bearing in [0, 2*pi)
    ascending with ties broken by smaller distance, then lower index. The
    default ``k = n - 1`` observes everyone.
    """
    n = world.n_pursuers
    if not 0 <= i < n:
        raise IndexError(f"agent index {i} out of range for {n} pursuers")
    if k is None:
        k = n - 1
    if k > n - 1:
        raise ValueError(f"neighbor cap {k} exceeds available neighbors {n - 1}")

    me = world.agents[i]
    target = relative_state(me, (world.evader.x, world.evader.y), prev_target)

    others = []
    for j in range(n):
        if j == i:
            continue
        a = world.agents[j]
        dx = a.x - me.x
        dy = a.y - me.y
        d = math.hypot(dx, dy)
        bearing = 0.0 if d == 0.0 else wrap_angle(math.atan2(dy, dx) - me.heading)
        others.append((d, bearing, j))

    if k < len(others):
        others.sort(key=lambda o: (o[0], o[2]))
        others = others[:k]
    others.sort(key=lambda o: ((o[1] + TWO_PI) % TWO_PI, o[0], o[2]))

    return Observation(
        heading=me.heading,
        heading_rate=me.turn_rate,
        target=target,
        neighbors=tuple((d, b) for d, b, _ in others),
    )


def normalize_observation(obs: Observation, cfg: SimConfig) -> np.ndarray:
    """Flatten an observation and scale every entry into [-1, 1].

    Distances are divided by the arena diameter, angles by pi, the range
    rate by the maximum closing speed (pursuer + evader speed) and the
    angular rates by the turn-rate limit; everything is clipped to [-1, 1]
    (only the angular rates can actually clip).
    """
    d_scale = 2.0 * cfg.arena_radius
    rate_scale = cfg.pursuer_speed + cfg.evader_speed
    t = obs.target
    feats = [
        obs.heading / math.pi,
        obs.heading_rate / cfg.max_turn_rate,
        t.distance / d_scale,
        t.distance_rate / rate_scale,
        t.bearing / math.pi,
        t.bearing_rate / cfg.max_turn_rate,
    ]
    for d, b in obs.neighbors:
        feats.append(d / d_scale)
        feats.append(b / math.pi)
    return np.clip(np.asarray(feats, dtype=np.float64), -1.0, 1.0)


def feature_length(n_pursuers: int, k: Optional[int] = None) -> int:
    """Length of the flat feature vector for ``n_pursuers`` with neighbor cap ``k``."""
    if k is None:
        k = n_pursuers - 1
    return 6 + 2 * min(k, n_pursuers - 1)
