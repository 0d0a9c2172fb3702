"""Command line: train, eval, sweep, tune-gain, replay-export, serve.

Every configuration key (see ``pursuitlab.config``) is also available as a
``--<key> value`` flag; flags override the ``--config`` file. Configuration
problems exit with status 2.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .baselines import ChaserPolicy, HeadingController, tune_gain
from .bench import (
    SweepSpec,
    run_fixed_paths,
    run_sweep,
    run_trial,
    replay_export,
    write_sweep_csv,
    write_sweep_json,
)
from .config import SCHEMA, ConfigError, RunConfig, load_run_config
from .env import Policy
from .nets import load_checkpoint
from .observe import feature_length
from .sim import SimConfig
from .td3 import TD3Policy, action_dim, train


def build_policy(run: RunConfig, sim_cfg: SimConfig, neighbor_cap=None) -> Policy:
    """Instantiate the configured pursuit policy for a given sim config."""
    cap = run.neighbor_cap_or_none() if neighbor_cap is None else neighbor_cap
    if run.policy == "td3":
        if not run.checkpoint:
            raise ConfigError("policy = td3 requires a 'checkpoint' path")
        path = Path(run.checkpoint.replace("{n}", str(sim_cfg.n_pursuers)))
        if not path.exists():
            raise ConfigError(f"checkpoint not found: {path}")
        nets, meta = load_checkpoint(path)
        if "actor" not in nets:
            raise ConfigError(f"checkpoint {path} has no actor network")
        actor = nets["actor"]
        expected_obs = feature_length(sim_cfg.n_pursuers, cap)
        if actor.sizes[0] != expected_obs:
            raise ConfigError(
                f"checkpoint {path} expects {actor.sizes[0]} features but this "
                f"configuration produces {expected_obs} "
                f"(n_pursuers={sim_cfg.n_pursuers}, neighbor_cap={cap})"
            )
        if actor.sizes[-1] != action_dim(sim_cfg):
            raise ConfigError(
                f"checkpoint {path} emits {actor.sizes[-1]} action values but "
                f"variable_speed={sim_cfg.variable_speed} needs {action_dim(sim_cfg)}"
            )
        return TD3Policy(actor, sim_cfg)

    controller = HeadingController(gain=run.gain, max_turn_rate=sim_cfg.max_turn_rate)
    return ChaserPolicy(
        model=run.policy,
        controller=controller,
        speed=sim_cfg.pursuer_speed,
        janosov=replace(run.janosov, speed=sim_cfg.pursuer_speed, arena_radius=sim_cfg.arena_radius),
        angelani=replace(run.angelani, speed=sim_cfg.pursuer_speed),
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="key = value configuration file")
    group = parser.add_argument_group("configuration overrides")
    for key in sorted(SCHEMA):
        group.add_argument(f"--{key}", metavar="V", dest=f"cfg_{key}", help=argparse.SUPPRESS)


def _load(args) -> RunConfig:
    overrides = {}
    for key in SCHEMA:
        value = getattr(args, f"cfg_{key}", None)
        if value is not None:
            overrides[key] = value
    return load_run_config(args.config, overrides)


def _print_rows(rows) -> None:
    print(f"{'axis':>18} {'value':>9} {'trials':>6} {'success':>8} {'avg_steps':>10} {'stderr':>7}")
    for r in rows:
        avg = "-" if r.avg_steps_on_success is None else f"{r.avg_steps_on_success:.1f}"
        print(
            f"{r.axis:>18} {str(r.value):>9} {r.trials:>6} {r.success_rate:>8.3f} "
            f"{avg:>10} {r.stderr:>7.3f}"
        )


def cmd_train(args) -> int:
    run = _load(args)
    if run.evader == "external":
        raise ConfigError("cannot train against an externally controlled evader")
    out_dir = Path(run.out_dir)
    result = train(
        run.sim,
        run.td3,
        reward_cfg=run.rewards,
        out_dir=out_dir,
        evader=run.evader,
        neighbor_cap=run.neighbor_cap_or_none(),
        log_every=1,
    )
    print(
        f"trained {result.steps_run} steps; best eval success {result.best_success:.2f} "
        f"at step {result.best_step}"
    )
    print(f"final checkpoint: {result.checkpoint_path}")
    print(f"learning curve:  {result.curve_path}")
    return 0


def cmd_eval(args) -> int:
    run = _load(args)
    out_dir = Path(run.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.paths:
        rows = run_fixed_paths(
            lambda cfg: build_policy(run, cfg),
            run.sim,
            trials_per_path=run.trials,
            base_seed=run.base_seed,
            workers=run.workers,
        )
    else:
        spec = SweepSpec(
            axis="n_pursuers",
            values=[run.sim.n_pursuers],
            trials_per_value=run.trials,
            make_policy=lambda value, cfg: build_policy(run, cfg),
            evader=run.evader,
            cfg=run.sim,
            reward_cfg=run.rewards,
            neighbor_cap=run.neighbor_cap_or_none(),
            base_seed=run.base_seed,
            workers=run.workers,
        )
        rows = run_sweep(spec)
    _print_rows(rows)
    write_sweep_csv(rows, out_dir / "eval.csv")
    write_sweep_json(rows, out_dir / "eval.json")
    print(f"wrote {out_dir / 'eval.csv'} and {out_dir / 'eval.json'}")
    return 0


def _parse_values(axis: str, raw: str):
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError("--values must list at least one value")
    if axis in ("n_pursuers", "neighbor_cap"):
        return [int(p) for p in parts]
    return [float(p) for p in parts]


def cmd_sweep(args) -> int:
    run = _load(args)
    values = _parse_values(args.axis, args.values)
    cap = run.neighbor_cap_or_none()

    def make_policy(value, cfg_v: SimConfig) -> Policy:
        value_cap = int(value) if args.axis == "neighbor_cap" else cap
        return build_policy(run, cfg_v, neighbor_cap=value_cap)

    spec = SweepSpec(
        axis=args.axis,
        values=values,
        trials_per_value=run.trials,
        make_policy=make_policy,
        evader=run.evader,
        cfg=run.sim,
        reward_cfg=run.rewards,
        neighbor_cap=cap,
        base_seed=run.base_seed,
        workers=run.workers,
    )
    rows = run_sweep(spec)
    _print_rows(rows)
    out_dir = Path(run.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, out_dir / f"sweep_{args.axis}.csv")
    write_sweep_json(rows, out_dir / f"sweep_{args.axis}.json")
    print(f"wrote {out_dir / f'sweep_{args.axis}.csv'}")
    return 0


def cmd_tune_gain(args) -> int:
    run = _load(args)
    if run.policy == "td3":
        raise ConfigError("gain tuning applies to the classical baselines, not td3")
    grid = tuple(float(p) for p in args.grid.split(",")) if args.grid else None

    def make(gain: float) -> Policy:
        return build_policy(replace(run, gain=gain), run.sim)

    kwargs = {"trials_per_gain": run.trials, "base_seed": run.base_seed}
    if grid:
        kwargs["grid"] = grid
    best, report = tune_gain(make, run.sim, **kwargs)
    for gain in sorted(report):
        marker = " <- best" if gain == best else ""
        print(f"K = {gain:<6g} capture rate {report[gain]:.3f}{marker}")
    out_dir = Path(run.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    import json

    (out_dir / "tune_gain.json").write_text(
        json.dumps({"best_gain": best, "capture_rate_by_gain": report}, indent=1)
    )
    print(f"best gain: {best} (report in {out_dir / 'tune_gain.json'})")
    return 0


def cmd_replay_export(args) -> int:
    run = _load(args)
    policy = build_policy(run, run.sim)
    seed = args.trial_seed if args.trial_seed is not None else run.base_seed
    report, worlds = run_trial(
        policy,
        run.evader,
        run.sim,
        seed=seed,
        reward_cfg=run.rewards,
        neighbor_cap=run.neighbor_cap_or_none(),
        keep_worlds=True,
    )
    out = Path(args.out) if args.out else Path(run.out_dir) / f"replay_seed{seed}.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    replay_export(worlds, run.sim.capture_radius, out)
    outcome = "captured" if report.captured else "timeout"
    print(f"trial seed {seed}: {outcome} after {report.steps} steps; wrote {out}")
    return 0


def cmd_serve(args) -> int:
    from .live import LiveSession, serve

    run = _load(args)
    policy = build_policy(run, run.sim)
    log_dir = Path(run.out_dir) / "episodes"
    session = LiveSession(
        policy,
        run.sim,
        run.rewards,
        base_seed=run.base_seed,
        tick_hz=run.tick_hz,
        log_dir=log_dir,
    )
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    if ui_dir is None:
        default_ui = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = default_ui if default_ui.is_dir() else None
    serve(session, host=args.host, port=args.port, ui_dir=ui_dir)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pursuitlab",
        description="Multi-agent pursuit-evasion: simulate, train, benchmark, play.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a TD3 policy for the configured pursuer count")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="run a batch of evaluation trials")
    _add_common(p)
    p.add_argument("--paths", action="store_true", help="use the three-path fixed benchmark")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="sweep one axis and emit CSV/JSON tables")
    _add_common(p)
    p.add_argument("--axis", required=True,
                   choices=("evader_speed_ratio", "n_pursuers", "arena_scale", "neighbor_cap"))
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tune-gain", help="grid-search the heading controller gain")
    _add_common(p)
    p.add_argument("--grid", default=None, help="comma-separated gains (default 0.25..8)")
    p.set_defaults(func=cmd_tune_gain)

    p = sub.add_parser("replay-export", help="simulate one trial and export its trajectory")
    _add_common(p)
    p.add_argument("--trial-seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output JSONL path")
    p.set_defaults(func=cmd_replay_export)

    p = sub.add_parser("serve", help="run the live human-evader server")
    _add_common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui-dir", default=None, help="static browser UI directory")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
