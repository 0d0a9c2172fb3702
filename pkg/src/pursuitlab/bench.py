"""Benchmark harness: seeded trials, sweeps, aggregate tables, trajectory export.

Every trial is fully determined by its seed; sweeps derive trial seeds as
``base_seed + value_index * 10**6 + trial_index`` so any row can be
reproduced in isolation. Aggregates follow the evaluation protocol: the
average steps-to-capture statistic is computed over successful trials only,
and is left empty when nothing was captured.

Trajectory logs are exported as JSON lines, one frame per world state,
using the same frame schema the live server streams:

    {"type": "frame", "v": 1, "t": 0, "agents": [{"x": ..., "y": ..., "psi": ...}],
     "evader": {"x": ..., "y": ...}, "d_cap": 30.0, "q": 1.2, "outcome": "running"}
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

from .env import Policy, PursuitEnv
from .rewards import RewardConfig, formation_score
from .sim import SimConfig, Status, WorldState

SWEEP_AXES = ("evader_speed_ratio", "n_pursuers", "arena_scale", "neighbor_cap")


@dataclass
class TrialReport:
    """Outcome and per-step traces of one episode."""

    seed: int
    captured: bool
    captor: Optional[int]
    steps: int
    q_trace: list[float] = field(default_factory=list)
    min_dist_trace: list[float] = field(default_factory=list)


def run_trial(
    policy: Policy,
    evader: str,
    cfg: SimConfig,
    seed: int,
    reward_cfg: Optional[RewardConfig] = None,
    neighbor_cap: Optional[int] = None,
    keep_worlds: bool = False,
) -> TrialReport | tuple[TrialReport, list[WorldState]]:
    """Simulate one full episode; deterministic given the seed.

    With ``keep_worlds`` the full world-state log (including the initial
    state) is returned alongside the report, for trajectory export.
    """
    env = PursuitEnv(
        cfg,
        reward_cfg,
        evader=evader,
        neighbor_cap=neighbor_cap,
        observe=policy.needs_observations,
    )
    feats = env.reset(seed=seed)
    policy.begin(env.world)
    worlds = [env.world] if keep_worlds else None
    q_trace: list[float] = []
    min_dist_trace: list[float] = []
    done = False
    info = {}
    while not done:
        feats, _, done, info = env.step(policy.act(env.world, feats))
        if info["q"] is not None:
            q_trace.append(info["q"])
        min_dist_trace.append(info["min_dist"])
        if keep_worlds:
            worlds.append(env.world)

    outcome = env.world.outcome
    report = TrialReport(
        seed=seed,
        captured=outcome.status is Status.CAPTURED,
        captor=outcome.captor,
        steps=env.world.t,
        q_trace=q_trace,
        min_dist_trace=min_dist_trace,
    )
    if keep_worlds:
        return report, worlds
    return report


@dataclass
class SweepSpec:
    """One benchmark sweep: an axis, its values, and the fixed trial setup.

    ``make_policy(value, cfg_for_value)`` builds the policy per sweep value
    (a TD3 sweep over pursuer counts needs one checkpoint per count; the
    classical chasers just reuse their parameters).
    """

    axis: str
    values: Sequence
    trials_per_value: int
    make_policy: Callable[[object, SimConfig], Policy]
    evader: str = "repulsive"
    cfg: SimConfig = field(default_factory=SimConfig)
    reward_cfg: Optional[RewardConfig] = None
    neighbor_cap: Optional[int] = None
    base_seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"unknown sweep axis {self.axis!r}; expected one of {SWEEP_AXES}")
        if self.trials_per_value < 1:
            raise ValueError("trials_per_value must be >= 1")
        if not self.values:
            raise ValueError("sweep needs at least one value")


def config_for_value(spec: SweepSpec, value) -> tuple[SimConfig, Optional[int]]:
    """SimConfig (and neighbor cap) for one sweep value.

    The arena-scale axis scales the arena radius and the evader spawn
    annulus but leaves the pursuer spawn disk alone, so pursuers start as
    clustered as they did at training scale.
    """
    cfg = spec.cfg
    if spec.axis == "evader_speed_ratio":
        return replace(cfg, evader_speed=float(value) * cfg.pursuer_speed), spec.neighbor_cap
    if spec.axis == "n_pursuers":
        return replace(cfg, n_pursuers=int(value)), spec.neighbor_cap
    if spec.axis == "arena_scale":
        s = float(value)
        return (
            replace(
                cfg,
                arena_radius=cfg.arena_radius * s,
                evader_spawn_inner_radius=cfg.evader_spawn_inner_radius * s,
            ),
            spec.neighbor_cap,
        )
    if spec.axis == "neighbor_cap":
        return cfg, int(value)
    raise ValueError(f"unknown sweep axis {spec.axis!r}")


@dataclass
class SweepRow:
    axis: str
    value: object
    trials: int
    captures: int
    success_rate: float
    avg_steps_on_success: Optional[float]
    stderr: float  # binomial standard error of the success rate


def _trial_task(args) -> TrialReport:
    policy, evader, cfg, seed, reward_cfg, neighbor_cap = args
    return run_trial(policy, evader, cfg, seed, reward_cfg, neighbor_cap)


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Run every (value, trial) pair and aggregate per value.

    Trials are independent; with ``workers > 1`` they run on a process pool
    and are merged back in seed order, so the result is identical to the
    serial run.
    """
    spec.validate()
    tasks = []
    for j, value in enumerate(spec.values):
        cfg_v, cap_v = config_for_value(spec, value)
        cfg_v.validate()
        policy = spec.make_policy(value, cfg_v)
        for k in range(spec.trials_per_value):
            seed = spec.base_seed + j * 10**6 + k
            tasks.append((policy, spec.evader, cfg_v, seed, spec.reward_cfg, cap_v))

    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            reports = list(pool.map(_trial_task, tasks, chunksize=8))
    else:
        reports = [_trial_task(t) for t in tasks]

    rows = []
    for j, value in enumerate(spec.values):
        batch = reports[j * spec.trials_per_value : (j + 1) * spec.trials_per_value]
        rows.append(aggregate(spec.axis, value, batch))
    return rows


def aggregate(axis: str, value, reports: Sequence[TrialReport]) -> SweepRow:
    n = len(reports)
    captures = sum(r.captured for r in reports)
    rate = captures / n
    steps = [r.steps for r in reports if r.captured]
    return SweepRow(
        axis=axis,
        value=value,
        trials=n,
        captures=captures,
        success_rate=rate,
        avg_steps_on_success=sum(steps) / len(steps) if steps else None,
        stderr=math.sqrt(rate * (1.0 - rate) / n),
    )


def write_sweep_csv(rows: Sequence[SweepRow], path) -> None:
    """CSV artifact: one row per sweep value; empty avg_steps when no captures."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["axis", "value", "trials", "captures", "success_rate", "avg_steps_on_success", "stderr"]
        )
        for r in rows:
            writer.writerow(
                [
                    r.axis,
                    r.value,
                    r.trials,
                    r.captures,
                    f"{r.success_rate:.6f}",
                    "" if r.avg_steps_on_success is None else f"{r.avg_steps_on_success:.4f}",
                    f"{r.stderr:.6f}",
                ]
            )


def write_sweep_json(rows: Sequence[SweepRow], path) -> None:
    payload = [
        {
            "axis": r.axis,
            "value": r.value,
            "trials": r.trials,
            "captures": r.captures,
            "success_rate": r.success_rate,
            "avg_steps_on_success": r.avg_steps_on_success,
            "stderr": r.stderr,
        }
        for r in rows
    ]
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


# --------------------------------------------------------------------------
# fixed-paths benchmark (three paths, reported per path and jointly)


def run_fixed_paths(
    make_policy: Callable[[SimConfig], Policy],
    cfg: SimConfig,
    trials_per_path: int,
    base_seed: int = 0,
    workers: int = 1,
) -> list[SweepRow]:
    """Benchmark against the three fixed evader paths.

    Returns one aggregate row per path plus a joint row over all trials
    (the protocol does not say which way to average, so both are reported).
    """
    paths = ("circle", "eight", "triangle")
    all_reports: list[TrialReport] = []
    rows: list[SweepRow] = []
    for j, path_id in enumerate(paths):
        policy = make_policy(cfg)
        tasks = [
            (policy, path_id, cfg, base_seed + j * 10**6 + k, None, None)
            for k in range(trials_per_path)
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(_trial_task, tasks, chunksize=8))
        else:
            reports = [_trial_task(t) for t in tasks]
        rows.append(aggregate("fixed_path", path_id, reports))
        all_reports.extend(reports)
    rows.append(aggregate("fixed_path", "all", all_reports))
    return rows


# --------------------------------------------------------------------------
# trajectory export


def world_frame(world: WorldState, capture_radius: float) -> dict:
    """One wire/replay frame from a world state."""
    q = formation_score(world) if world.n_pursuers >= 2 else None
    return {
        "type": "frame",
        "v": 1,
        "t": world.t,
        "agents": [{"x": a.x, "y": a.y, "psi": a.heading} for a in world.agents],
        "evader": {"x": world.evader.x, "y": world.evader.y},
        "d_cap": capture_radius,
        "q": q,
        "outcome": world.outcome.status.value,
    }


def replay_export(worlds: Sequence[WorldState], capture_radius: float, path) -> None:
    """Write a trajectory as JSON-lines frames (initial state included)."""
    with open(path, "w") as fh:
        for world in worlds:
            fh.write(json.dumps(world_frame(world, capture_radius)) + "\n")


def read_replay(path) -> list[dict]:
    frames = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                frames.append(json.loads(line))
    return frames
