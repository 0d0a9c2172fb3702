"""Evader motion policies: repulsive potential field, fixed loop paths, external control.

The repulsive evader sums inverse-square repulsions away from every pursuer
and from the nearest point of the arena wall, then moves at full speed along
the normalized resultant. The printed-sign variant (forces pointing toward
pursuers and wall) is selectable for comparison.

Fixed paths are closed curves built from line and circular-arc segments, so
arc-length travel along them is exact: advancing the phase by the evader
speed moves the evader exactly that far along the curve. Three stock paths
are provided: a circle, a figure-eight of two tangent circles, and an
equilateral triangle with rounded corners.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

from .sim import WorldState

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# path geometry


@dataclass(frozen=True, slots=True)
class LineSegment:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def length(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    def point_at(self, s: float) -> tuple[float, float]:
        f = s / self.length
        return self.x0 + f * (self.x1 - self.x0), self.y0 + f * (self.y1 - self.y0)


@dataclass(frozen=True, slots=True)
class ArcSegment:
    cx: float
    cy: float
    radius: float
    start_angle: float
    sweep: float  # signed; positive = counter-clockwise

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def point_at(self, s: float) -> tuple[float, float]:
        ang = self.start_angle + self.sweep * (s / self.length)
        return self.cx + self.radius * math.cos(ang), self.cy + self.radius * math.sin(ang)


@dataclass(frozen=True, slots=True)
class SegmentPath:
    """Closed curve as a chain of segments, parameterized by arc length."""

    segments: tuple
    path_id: str = ""

    @property
    def length(self) -> float:
        return sum(seg.length for seg in self.segments)

    def point_at(self, s: float) -> tuple[float, float]:
        s = s % self.length
        for seg in self.segments:
            if s <= seg.length:
                return seg.point_at(s)
            s -= seg.length
        return self.segments[-1].point_at(self.segments[-1].length)

    def sample_polyline(self, n_points: int = 256) -> list[tuple[float, float]]:
        """Evenly spaced points along the path, for rendering."""
        step = self.length / n_points
        return [self.point_at(i * step) for i in range(n_points + 1)]


def circle_path(radius: float) -> SegmentPath:
    return SegmentPath(
        segments=(ArcSegment(0.0, 0.0, radius, start_angle=0.0, sweep=TWO_PI),),
        path_id="circle",
    )


def figure_eight_path(half_width: float) -> SegmentPath:
    """Figure-eight from two tangent circles crossing at the origin.

    Lobe radius is half the half-width, so the curve spans [-half_width,
    half_width] in x. Both lobes pass the origin moving straight down, so
    the tangent is continuous while the curvature flips sign there.
    """
    c = half_width / 2.0
    right = ArcSegment(c, 0.0, c, start_angle=math.pi, sweep=TWO_PI)
    left = ArcSegment(-c, 0.0, c, start_angle=0.0, sweep=-TWO_PI)
    return SegmentPath(segments=(right, left), path_id="eight")


def rounded_triangle_path(vertex_radius: float, corner_radius: Optional[float] = None) -> SegmentPath:
    """Equilateral triangle inscribed at ``vertex_radius`` with rounded corners.

    Corner arcs are tangent to both adjacent edges; the default corner
    radius is a fifth of the vertex radius.
    """
    rc = vertex_radius / 5.0 if corner_radius is None else corner_radius
    if not 0 < rc < vertex_radius / 2.0:
        raise ValueError("corner radius must be in (0, vertex_radius / 2)")

    verts = [
        (vertex_radius * math.cos(a), vertex_radius * math.sin(a))
        for a in (math.pi / 2, math.pi / 2 + TWO_PI / 3, math.pi / 2 + 2 * TWO_PI / 3)
    ]
    trim = rc * math.sqrt(3.0)          # tangent-point distance from each vertex
    center_pull = 2.0 * rc              # arc center distance from vertex, along the bisector

    segments = []
    for k in range(3):
        vx, vy = verts[k]
        wx, wy = verts[(k + 1) % 3]
        ex, ey = wx - vx, wy - vy
        elen = math.hypot(ex, ey)
        ux, uy = ex / elen, ey / elen
        ax, ay = vx + trim * ux, vy + trim * uy       # leave corner k
        bx, by = wx - trim * ux, wy - trim * uy       # reach corner k+1
        segments.append(LineSegment(ax, ay, bx, by))

        # corner arc around vertex k+1 (bisector points at the centroid/origin)
        scale = 1.0 - center_pull / vertex_radius
        ccx, ccy = wx * scale, wy * scale
        start = math.atan2(by - ccy, bx - ccx)
        segments.append(ArcSegment(ccx, ccy, rc, start_angle=start, sweep=TWO_PI / 3))

    return SegmentPath(segments=tuple(segments), path_id="triangle")


def standard_paths(arena_radius: float) -> dict[str, SegmentPath]:
    """The three benchmark paths, scaled to an arena radius."""
    return {
        "circle": circle_path(0.70 * arena_radius),
        "eight": figure_eight_path(0.75 * arena_radius),
        "triangle": rounded_triangle_path(0.75 * arena_radius),
    }


PATH_IDS = ("circle", "eight", "triangle")


@dataclass(frozen=True, slots=True)
class FixedPath:
    """A path plus the evader's arc-length progress along it."""

    geometry: SegmentPath
    phase: float = 0.0

    def position(self) -> tuple[float, float]:
        return self.geometry.point_at(self.phase)


def fixed_path_step(path: FixedPath, speed: float) -> tuple[FixedPath, tuple[float, float]]:
    """Advance exactly ``speed`` of arc length; returns the new path state and position."""
    advanced = replace(path, phase=(path.phase + speed) % path.geometry.length)
    return advanced, advanced.position()


# --------------------------------------------------------------------------
# repulsive potential field


def repulsive_direction(
    world: WorldState,
    arena_radius: float,
    prev_direction: Optional[tuple[float, float]] = None,
    printed_signs: bool = False,
) -> tuple[float, float]:
    """Unit flee direction: inverse-square repulsion from pursuers and wall.

    Each pursuer contributes (evader - pursuer) / d^2 and the nearest wall
    point contributes (evader - wall_point) / d_w^2, i.e. forces that decay
    like 1/d and push away. ``printed_signs=True`` flips both contributions
    (attraction toward pursuers and wall) for comparison runs.

    Degenerate cases: with the evader exactly at the center the nearest
    wall point is taken along the previous motion direction; a perfectly
    cancelled force field falls back to the previous direction, or (1, 0)
    on the first step.
    """
    fallback = prev_direction if prev_direction is not None else (1.0, 0.0)
    ex, ey = world.evader.x, world.evader.y
    fx = fy = 0.0
    for a in world.agents:
        dx = ex - a.x
        dy = ey - a.y
        d = math.hypot(dx, dy)
        d = max(d, 1e-9)
        fx += dx / (d * d)
        fy += dy / (d * d)

    # wall term: nearest boundary point is radially outward from the evader
    e_norm = math.hypot(ex, ey)
    if e_norm > 0.0:
        ux, uy = ex / e_norm, ey / e_norm
    else:
        ux, uy = fallback
    d_wall = max(arena_radius - e_norm, 1e-9)
    fx -= ux / d_wall
    fy -= uy / d_wall

    if printed_signs:
        fx, fy = -fx, -fy

    norm = math.hypot(fx, fy)
    if norm == 0.0:
        return fallback
    return fx / norm, fy / norm


# --------------------------------------------------------------------------
# behavior state records (stored on EvaderState.behavior)


@dataclass(frozen=True, slots=True)
class RepulsivePolicy:
    arena_radius: float = 430.0
    prev_direction: Optional[tuple[float, float]] = None
    printed_signs: bool = False


@dataclass(frozen=True, slots=True)
class FixedPathPolicy:
    path: FixedPath


@dataclass(frozen=True, slots=True)
class ExternalPolicy:
    """Marker for an externally commanded evader (live human play)."""


def external_evader_step(cmd: tuple[float, float], speed: float) -> tuple[float, float]:
    """Displacement for an externally commanded evader.

    ``cmd`` must be a unit direction or zero (hover). Any other magnitude is
    normalized with a warning so a glitchy client cannot exceed the speed cap.
    """
    norm = math.hypot(cmd[0], cmd[1])
    if norm == 0.0:
        return 0.0, 0.0
    if abs(norm - 1.0) > 1e-9:
        warnings.warn(f"non-unit evader command (|cmd| = {norm:.6g}); normalizing")
    return speed * cmd[0] / norm, speed * cmd[1] / norm


def evader_step(
    world: WorldState,
    external_cmd: Optional[tuple[float, float]] = None,
) -> tuple[tuple[float, float], object]:
    """Displacement for this step plus the updated behavior state.

    Dispatches on the behavior record stored in ``world.evader.behavior``.
    External mode requires ``external_cmd`` (zero means hover).
    """
    behavior = world.evader.behavior
    speed = world.evader.speed

    if isinstance(behavior, FixedPathPolicy):
        advanced, (px, py) = fixed_path_step(behavior.path, speed)
        return (px - world.evader.x, py - world.evader.y), FixedPathPolicy(advanced)

    if isinstance(behavior, RepulsivePolicy):
        ux, uy = repulsive_direction(
            world,
            behavior.arena_radius,
            prev_direction=behavior.prev_direction,
            printed_signs=behavior.printed_signs,
        )
        return (speed * ux, speed * uy), replace(behavior, prev_direction=(ux, uy))

    if isinstance(behavior, ExternalPolicy):
        cmd = external_cmd if external_cmd is not None else (0.0, 0.0)
        return external_evader_step(cmd, speed), behavior

    raise TypeError(f"evader has no motion policy (behavior={behavior!r})")
