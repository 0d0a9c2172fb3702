"""Benchmark harness: trial determinism, sweep aggregation, replay export."""

import math

import numpy as np
import pytest

from pursuitlab.baselines import ChaserPolicy, HeadingController, tune_gain
from pursuitlab.bench import (
    SweepRow,
    SweepSpec,
    aggregate,
    config_for_value,
    read_replay,
    replay_export,
    run_fixed_paths,
    run_sweep,
    run_trial,
    world_frame,
    write_sweep_csv,
    write_sweep_json,
)
from pursuitlab.rewards import formation_score
from pursuitlab.sim import SimConfig


def fast_cfg(**kw):
    defaults = dict(n_pursuers=2, timeout_steps=120)
    defaults.update(kw)
    return SimConfig(**defaults)


def pursuit_policy(cfg):
    return ChaserPolicy(model="pure_pursuit", speed=cfg.pursuer_speed)


def test_trivially_winnable_trial():
    # one pursuer vs a stationary evader must always end in capture
    cfg = fast_cfg(n_pursuers=1, evader_speed=0.0, timeout_steps=500)
    report = run_trial(pursuit_policy(cfg), "repulsive", cfg, seed=0)
    assert report.captured
    assert report.captor == 0
    assert report.steps <= 500
    assert report.q_trace == []  # undefined for a single pursuer


def test_single_slow_pursuer_vs_fast_evader_times_out():
    cfg = fast_cfg(n_pursuers=1, evader_speed=20.0, timeout_steps=300)
    captures = sum(
        run_trial(pursuit_policy(cfg), "repulsive", cfg, seed=s).captured for s in range(10)
    )
    assert captures <= 2  # overwhelmingly timeouts


def test_trial_determinism():
    cfg = fast_cfg()
    a = run_trial(pursuit_policy(cfg), "repulsive", cfg, seed=7)
    b = run_trial(pursuit_policy(cfg), "repulsive", cfg, seed=7)
    assert a == b


def test_trial_traces_well_formed():
    cfg = fast_cfg(n_pursuers=3)
    report = run_trial(pursuit_policy(cfg), "circle", cfg, seed=3)
    assert len(report.q_trace) == report.steps
    assert len(report.min_dist_trace) == report.steps
    assert all(0.0 <= q <= 2.0 for q in report.q_trace)
    assert all(d >= 0.0 for d in report.min_dist_trace)


def test_sweep_shapes_and_rates():
    cfg = fast_cfg(n_pursuers=2, timeout_steps=80)
    spec = SweepSpec(
        axis="evader_speed_ratio",
        values=[0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0],
        trials_per_value=5,
        make_policy=lambda value, c: pursuit_policy(c),
        cfg=cfg,
        base_seed=11,
    )
    rows = run_sweep(spec)
    assert len(rows) == 7
    for row in rows:
        assert row.trials == 5
        assert 0.0 <= row.success_rate <= 1.0
        if row.captures == 0:
            assert row.avg_steps_on_success is None


def test_sweep_bit_identical_across_reruns():
    cfg = fast_cfg(timeout_steps=60)
    mk = lambda: SweepSpec(
        axis="evader_speed_ratio",
        values=[1.0, 2.0],
        trials_per_value=4,
        make_policy=lambda value, c: pursuit_policy(c),
        cfg=cfg,
        base_seed=5,
    )
    assert run_sweep(mk()) == run_sweep(mk())


def test_sweep_worker_pool_matches_serial():
    cfg = fast_cfg(timeout_steps=60)
    mk = lambda workers: SweepSpec(
        axis="n_pursuers",
        values=[1, 3],
        trials_per_value=4,
        make_policy=lambda value, c: pursuit_policy(c),
        cfg=cfg,
        base_seed=9,
        workers=workers,
    )
    assert run_sweep(mk(1)) == run_sweep(mk(2))


def test_config_for_value_axes():
    cfg = fast_cfg()
    spec = SweepSpec(
        axis="evader_speed_ratio", values=[1.5], trials_per_value=1,
        make_policy=lambda v, c: pursuit_policy(c), cfg=cfg,
    )
    c, _ = config_for_value(spec, 1.5)
    assert c.evader_speed == 15.0

    spec.axis = "n_pursuers"
    c, _ = config_for_value(spec, 6)
    assert c.n_pursuers == 6

    spec.axis = "arena_scale"
    c, _ = config_for_value(spec, 2.0)
    assert c.arena_radius == 860.0
    assert c.evader_spawn_inner_radius == 600.0
    assert c.pursuer_spawn_radius == cfg.pursuer_spawn_radius  # deliberately unscaled

    spec.axis = "neighbor_cap"
    c, cap = config_for_value(spec, 4)
    assert cap == 4 and c == cfg


def test_sweep_validation():
    bad = SweepSpec(
        axis="gravity", values=[1], trials_per_value=1,
        make_policy=lambda v, c: pursuit_policy(c),
    )
    with pytest.raises(ValueError):
        bad.validate()
    bad = SweepSpec(
        axis="n_pursuers", values=[], trials_per_value=1,
        make_policy=lambda v, c: pursuit_policy(c),
    )
    with pytest.raises(ValueError):
        bad.validate()


def test_aggregate_permutation_invariant():
    cfg = fast_cfg(timeout_steps=60)
    reports = [run_trial(pursuit_policy(cfg), "repulsive", cfg, seed=s) for s in range(6)]
    fwd = aggregate("n_pursuers", 2, reports)
    rev = aggregate("n_pursuers", 2, list(reversed(reports)))
    assert fwd == rev


def test_success_rate_trend_over_evader_speed():
    # direction check with slack: success should not increase with speed
    cfg = fast_cfg(n_pursuers=2, timeout_steps=250)
    spec = SweepSpec(
        axis="evader_speed_ratio",
        values=[0.8, 1.4, 2.0],
        trials_per_value=30,
        make_policy=lambda value, c: pursuit_policy(c),
        cfg=cfg,
        base_seed=77,
    )
    rows = run_sweep(spec)
    rates = [r.success_rate for r in rows]
    assert rates[0] >= rates[-1] - 0.05
    slope = np.polyfit(range(len(rates)), rates, 1)[0]
    assert slope <= 0.02


def test_fixed_paths_report_joint_and_per_path():
    cfg = fast_cfg(n_pursuers=3, timeout_steps=100)
    rows = run_fixed_paths(pursuit_policy, cfg, trials_per_path=3, base_seed=1)
    values = [r.value for r in rows]
    assert values == ["circle", "eight", "triangle", "all"]
    assert rows[-1].trials == 9


def test_replay_round_trip(tmp_path):
    cfg = fast_cfg(n_pursuers=2, timeout_steps=50)
    report, worlds = run_trial(
        pursuit_policy(cfg), "repulsive", cfg, seed=13, keep_worlds=True
    )
    assert len(worlds) == report.steps + 1  # includes the initial state
    path = tmp_path / "trial.jsonl"
    replay_export(worlds, cfg.capture_radius, path)
    frames = read_replay(path)
    assert len(frames) == len(worlds)
    for frame, world in zip(frames, worlds):
        assert frame["t"] == world.t
        assert frame["v"] == 1
        for rec, agent in zip(frame["agents"], world.agents):
            assert rec["x"] == agent.x and rec["y"] == agent.y and rec["psi"] == agent.heading
        assert frame["evader"]["x"] == world.evader.x
        assert frame["outcome"] == world.outcome.status.value


def test_replay_q_matches_recomputation(tmp_path):
    cfg = fast_cfg(n_pursuers=3, timeout_steps=40)
    _, worlds = run_trial(pursuit_policy(cfg), "eight", cfg, seed=21, keep_worlds=True)
    path = tmp_path / "trial.jsonl"
    replay_export(worlds, cfg.capture_radius, path)
    for frame, world in zip(read_replay(path), worlds):
        assert frame["q"] == pytest.approx(formation_score(world), abs=1e-12)


def test_immediate_capture_exports_minimal_file(tmp_path):
    # capture on the very first step (the radius exceeds any possible spawn
    # separation): the file holds the spawn frame and one step
    cfg = fast_cfg(n_pursuers=1, evader_speed=0.0, timeout_steps=500, capture_radius=540.0)
    report, worlds = run_trial(
        pursuit_policy(cfg), "repulsive", cfg, seed=2, keep_worlds=True
    )
    assert report.steps == 1 and report.captured
    path = tmp_path / "short.jsonl"
    replay_export(worlds, cfg.capture_radius, path)
    assert len(read_replay(path)) == 2


def test_sweep_artifacts(tmp_path):
    rows = [
        SweepRow("n_pursuers", 2, 4, 2, 0.5, 120.0, 0.25),
        SweepRow("n_pursuers", 4, 4, 0, 0.0, None, 0.0),
    ]
    csv_path = tmp_path / "rows.csv"
    json_path = tmp_path / "rows.json"
    write_sweep_csv(rows, csv_path)
    write_sweep_json(rows, json_path)
    lines = csv_path.read_text().strip().splitlines()
    assert len(lines) == 3
    assert lines[2].split(",")[5] == ""  # avg steps empty when no captures
    import json as json_mod

    data = json_mod.loads(json_path.read_text())
    assert data[1]["avg_steps_on_success"] is None


def test_tune_gain_returns_best_and_report():
    cfg = fast_cfg(n_pursuers=2, evader_speed=8.0, timeout_steps=150)
    mk = lambda gain: ChaserPolicy(
        model="pure_pursuit",
        controller=HeadingController(gain=gain),
        speed=cfg.pursuer_speed,
    )
    best, report = tune_gain(mk, cfg, trials_per_gain=6, grid=(0.5, 2.0))
    assert set(report) == {0.5, 2.0}
    assert best in (0.5, 2.0)
    assert report[best] == max(report.values())


def test_tune_gain_single_point_grid():
    cfg = fast_cfg(n_pursuers=1, evader_speed=0.0, timeout_steps=200)
    mk = lambda gain: ChaserPolicy(
        model="pure_pursuit", controller=HeadingController(gain=gain), speed=10.0
    )
    best, report = tune_gain(mk, cfg, trials_per_gain=3, grid=(2.0,))
    assert best == 2.0 and len(report) == 1


def test_tune_gain_warns_when_nothing_captures():
    cfg = fast_cfg(n_pursuers=1, evader_speed=20.0, timeout_steps=30)
    mk = lambda gain: ChaserPolicy(
        model="pure_pursuit", controller=HeadingController(gain=gain), speed=10.0
    )
    with pytest.warns(UserWarning):
        best, report = tune_gain(mk, cfg, trials_per_gain=2, grid=(0.25, 0.5))
    assert best == 0.25  # smallest gain on an all-zero grid
    assert set(report.values()) == {0.0}
