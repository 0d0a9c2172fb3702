"""Twin-delayed deterministic policy gradient, from scratch, with shared experience.

All pursuers are homogeneous and run the same actor; every step each agent
contributes its own (obs, action, reward, next_obs, done) transition to one
shared replay buffer, so n agents gather n transitions per world step.

The update rule is the standard twin-critic recipe: the bootstrap target is

    y = r + discount * (1 - done) * min(Q1'(s', a'), Q2'(s', a'))
    a' = clip(actor'(s') + clip(noise, +-target_noise_clip), -1, 1)

both critics regress to y every update; the actor ascends critic 1 and all
three target networks Polyak-average toward the online ones only every
``policy_delay``-th update. Capture ends an episode and bootstraps with 0;
running out of time does not count as environment death, so timeout
transitions are stored non-terminal (the standard time-limit correction).

The capture-radius curriculum makes early training easier: the radius decays
linearly from ``curriculum_start`` to the config's capture radius over the
first ``curriculum_fraction`` of training, then stays there. Evaluation
always uses the final radius.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .env import PursuitEnv
from .nets import Adam, DenseNetwork, save_checkpoint
from .rewards import RewardConfig
from .sim import SimConfig, WorldState


@dataclass
class TD3Config:
    """Algorithm and schedule knobs; defaults follow the common TD3 recipe."""

    hidden_sizes: tuple[int, ...] = (256, 256)
    batch_size: int = 256
    buffer_capacity: int = 1_000_000
    discount: float = 0.99
    soft_update_rate: float = 0.005
    policy_delay: int = 2
    explore_noise: float = 0.1
    target_noise: float = 0.2
    target_noise_clip: float = 0.5
    actor_lr: float = 3e-4
    critic_lr: float = 3e-4
    warmup_steps: int = 1_000
    updates_per_step: float = 1.0
    train_steps: int = 100_000
    eval_every: int = 25_000
    eval_trials: int = 100
    curriculum: bool = True
    curriculum_start: float = 100.0
    curriculum_fraction: float = 0.25
    early_stop_success: Optional[float] = None
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.discount < 1.0:
            raise ValueError("discount must be in (0, 1)")
        if not 0.0 < self.soft_update_rate <= 1.0:
            raise ValueError("soft_update_rate must be in (0, 1]")
        if self.policy_delay < 1 or self.batch_size < 1 or self.buffer_capacity < 1:
            raise ValueError("policy_delay, batch_size and buffer_capacity must be >= 1")


class ReplayBuffer:
    """Fixed-capacity ring of transitions shared by all agents."""

    def __init__(self, capacity: int, obs_dim: int, act_dim: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros((capacity, act_dim))
        self.rewards = np.zeros((capacity, 1))
        self.next_obs = np.zeros((capacity, obs_dim))
        self.done = np.zeros((capacity, 1))
        self.cursor = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def add(self, obs, action, reward, next_obs, done: bool) -> None:
        i = self.cursor
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.done[i] = 1.0 if done else 0.0
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        if self.size < batch_size:
            raise ValueError(f"buffer holds {self.size} transitions, need {batch_size}")
        idx = rng.integers(0, self.size, size=batch_size)
        return (
            self.obs[idx],
            self.actions[idx],
            self.rewards[idx],
            self.next_obs[idx],
            self.done[idx],
        )


@dataclass(frozen=True, slots=True)
class CurriculumSchedule:
    """Linear capture-radius decay, constant after the horizon."""

    start_radius: float
    final_radius: float
    horizon_steps: int

    def radius_at(self, env_steps: int) -> float:
        if env_steps <= 0:
            return self.start_radius
        if env_steps >= self.horizon_steps:
            return self.final_radius
        f = env_steps / self.horizon_steps
        return self.start_radius + f * (self.final_radius - self.start_radius)


def curriculum_step(schedule: CurriculumSchedule, env_steps: int) -> float:
    """Capture radius after ``env_steps`` of training."""
    return schedule.radius_at(env_steps)


class TD3Agent:
    """Actor, twin critics, their targets, and the update rule."""

    def __init__(self, obs_dim: int, act_dim: int, cfg: TD3Config, rng: np.random.Generator):
        cfg.validate()
        self.cfg = cfg
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        hidden = tuple(cfg.hidden_sizes)
        self.actor = DenseNetwork([obs_dim, *hidden, act_dim], output_activation="tanh", rng=rng)
        self.critic1 = DenseNetwork([obs_dim + act_dim, *hidden, 1], rng=rng)
        self.critic2 = DenseNetwork([obs_dim + act_dim, *hidden, 1], rng=rng)
        self.actor_target = self.actor.copy()
        self.critic1_target = self.critic1.copy()
        self.critic2_target = self.critic2.copy()
        self.actor_opt = Adam(self.actor.parameters(), lr=cfg.actor_lr)
        self.critic1_opt = Adam(self.critic1.parameters(), lr=cfg.critic_lr)
        self.critic2_opt = Adam(self.critic2.parameters(), lr=cfg.critic_lr)
        self.rng = rng
        self.updates_done = 0

    def act(self, features: np.ndarray, explore: bool) -> np.ndarray:
        """Normalized actions in [-1, 1]^A for a batch of feature rows."""
        a = self.actor.forward(np.atleast_2d(features))
        if explore:
            a = a + self.rng.normal(0.0, self.cfg.explore_noise, size=a.shape)
            np.clip(a, -1.0, 1.0, out=a)
        return a

    @staticmethod
    def _interleave(w_grads, b_grads):
        out = []
        for w, b in zip(w_grads, b_grads):
            out.append(w)
            out.append(b)
        return out

    def update(self, batch) -> dict:
        """One TD3 update on a sampled batch; returns loss diagnostics."""
        obs, actions, rewards, next_obs, done = batch
        cfg = self.cfg

        # clipped double-Q bootstrap with target-policy smoothing
        next_a = self.actor_target.forward(next_obs)
        noise = self.rng.normal(0.0, cfg.target_noise, size=next_a.shape)
        np.clip(noise, -cfg.target_noise_clip, cfg.target_noise_clip, out=noise)
        next_a = np.clip(next_a + noise, -1.0, 1.0)
        target_in = np.concatenate([next_obs, next_a], axis=1)
        q_next = np.minimum(
            self.critic1_target.forward(target_in),
            self.critic2_target.forward(target_in),
        )
        y = rewards + cfg.discount * (1.0 - done) * q_next
        if not np.all(np.isfinite(y)):
            raise RuntimeError(
                "training diverged: non-finite bootstrap target "
                f"(reward range [{rewards.min()}, {rewards.max()}], "
                f"q_next range [{q_next.min()}, {q_next.max()}])"
            )

        critic_in = np.concatenate([obs, actions], axis=1)
        critic_loss = 0.0
        mean_q = 0.0
        for critic, opt in ((self.critic1, self.critic1_opt), (self.critic2, self.critic2_opt)):
            q, acts = critic.forward_cached(critic_in)
            diff = q - y
            critic_loss += float(np.mean(diff**2))
            w_grads, b_grads, _ = critic.backward(acts, 2.0 * diff / diff.shape[0])
            opt.step(self._interleave(w_grads, b_grads))
            if critic is self.critic1:
                mean_q = float(np.mean(q))

        self.updates_done += 1
        actor_loss = math.nan
        if self.updates_done % cfg.policy_delay == 0:
            a, actor_acts = self.actor.forward_cached(obs)
            q_in = np.concatenate([obs, a], axis=1)
            q, critic_acts = self.critic1.forward_cached(q_in)
            actor_loss = -float(np.mean(q))
            grad_q = np.full_like(q, -1.0 / q.shape[0])
            _, _, grad_in = self.critic1.backward(critic_acts, grad_q)
            w_grads, b_grads, _ = self.actor.backward(actor_acts, grad_in[:, self.obs_dim:])
            self.actor_opt.step(self._interleave(w_grads, b_grads))

            tau = cfg.soft_update_rate
            self.actor_target.soft_update_from(self.actor, tau)
            self.critic1_target.soft_update_from(self.critic1, tau)
            self.critic2_target.soft_update_from(self.critic2, tau)

        diag = {"critic_loss": critic_loss / 2.0, "actor_loss": actor_loss, "mean_q": mean_q}
        if not math.isfinite(diag["critic_loss"]):
            raise RuntimeError(f"training diverged: non-finite critic loss ({diag})")
        return diag

    def policy_networks(self) -> dict[str, DenseNetwork]:
        return {"actor": self.actor}


def scale_actions(norm_actions: np.ndarray, cfg: SimConfig) -> list[tuple[float, float]]:
    """Map normalized [-1, 1] network outputs to (turn, speed) commands.

    The first output scales to the turn-rate limit; in variable-speed mode
    the second output maps affinely onto [0, pursuer_speed], otherwise the
    speed is pinned at ``pursuer_speed``.
    """
    norm_actions = np.atleast_2d(norm_actions)
    commands = []
    for row in norm_actions:
        turn = float(row[0]) * cfg.max_turn_rate
        if cfg.variable_speed and len(row) >= 2:
            speed = (float(row[1]) + 1.0) / 2.0 * cfg.pursuer_speed
        else:
            speed = cfg.pursuer_speed
        commands.append((turn, speed))
    return commands


def action_dim(cfg: SimConfig) -> int:
    return 2 if cfg.variable_speed else 1


class TD3Policy:
    """Deterministic policy adapter: features in, (turn, speed) commands out."""

    needs_observations = True

    def __init__(self, actor: DenseNetwork, sim_cfg: SimConfig):
        self.actor = actor
        self.cfg = sim_cfg

    def begin(self, world: WorldState) -> None:
        pass

    def act(self, world: WorldState, observations) -> list[tuple[float, float]]:
        feats = np.stack(observations)
        return scale_actions(self.actor.forward(feats), self.cfg)


def collect_step(
    env: PursuitEnv,
    agent: TD3Agent,
    feats: list[np.ndarray],
    buffer: Optional[ReplayBuffer],
    explore: bool = True,
    random_actions: bool = False,
) -> tuple[list[np.ndarray], np.ndarray, bool, dict]:
    """Advance one world step, pushing every agent's transition to the shared buffer.

    All agents act through the same policy (plus exploration noise when
    ``explore``); ``random_actions`` substitutes uniform actions for the
    warmup phase. Timeout transitions are stored non-terminal; only capture
    sets the done flag. Returns (next_feats, actions, done, info).
    """
    n = env.cfg.n_pursuers
    if random_actions:
        actions = agent.rng.uniform(-1.0, 1.0, size=(n, agent.act_dim))
    else:
        actions = agent.act(np.stack(feats), explore=explore)
    next_feats, rewards, done, info = env.step(scale_actions(actions, env.cfg))
    if buffer is not None:
        terminal = info["outcome"].captor is not None
        for i in range(n):
            buffer.add(feats[i], actions[i], rewards[i], next_feats[i], terminal)
    return next_feats, actions, done, info


@dataclass
class EvalResult:
    success_rate: float
    avg_steps: Optional[float]  # over successful trials only; None if none succeeded


def evaluate_policy(
    actor: DenseNetwork,
    sim_cfg: SimConfig,
    trials: int,
    base_seed: int,
    evader: str = "repulsive",
    neighbor_cap: Optional[int] = None,
) -> EvalResult:
    """Deterministic evaluation at the config's capture radius, no exploration."""
    policy = TD3Policy(actor, sim_cfg)
    env = PursuitEnv(sim_cfg, evader=evader, neighbor_cap=neighbor_cap)
    captures = 0
    steps_sum = 0
    for k in range(trials):
        feats = env.reset(seed=base_seed + k)
        done = False
        while not done:
            feats, _, done, info = env.step(policy.act(env.world, feats))
        if info["outcome"].captor is not None:
            captures += 1
            steps_sum += env.world.t
    rate = captures / trials
    return EvalResult(rate, steps_sum / captures if captures else None)


@dataclass
class TrainResult:
    curve: list[dict] = field(default_factory=list)
    best_success: float = 0.0
    best_step: int = 0
    steps_run: int = 0
    stopped_early: bool = False
    checkpoint_path: Optional[Path] = None
    best_checkpoint_path: Optional[Path] = None
    curve_path: Optional[Path] = None


def train(
    sim_cfg: SimConfig,
    td3_cfg: TD3Config,
    reward_cfg: Optional[RewardConfig] = None,
    out_dir: Optional[Path] = None,
    evader: str = "repulsive",
    neighbor_cap: Optional[int] = None,
    log_every: int = 0,
) -> TrainResult:
    """Train one policy for this pursuer count against the chosen evader.

    Fully deterministic for a given configuration: the seed fans out into
    separate streams for network init, environment resets, exploration, and
    batch sampling. Writes ``policy_final.ckpt``, ``policy_best.ckpt`` and
    ``curve.csv`` under ``out_dir`` when given.
    """
    reward_cfg = reward_cfg or RewardConfig()
    td3_cfg.validate()
    streams = np.random.SeedSequence(td3_cfg.seed).spawn(4)
    net_rng, env_rng, agent_rng, sample_rng = (np.random.default_rng(s) for s in streams)

    env = PursuitEnv(sim_cfg, reward_cfg, evader=evader, neighbor_cap=neighbor_cap, rng=env_rng)
    obs_dim = env.feature_dim
    act_dim = action_dim(sim_cfg)
    agent = TD3Agent(obs_dim, act_dim, td3_cfg, net_rng)
    agent.rng = agent_rng
    buffer = ReplayBuffer(td3_cfg.buffer_capacity, obs_dim, act_dim)
    schedule = CurriculumSchedule(
        start_radius=td3_cfg.curriculum_start,
        final_radius=sim_cfg.capture_radius,
        horizon_steps=max(1, int(td3_cfg.curriculum_fraction * td3_cfg.train_steps)),
    )

    out_dir = Path(out_dir) if out_dir is not None else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    result = TrainResult()
    curve_fh = curve_writer = None
    if out_dir is not None:
        result.curve_path = out_dir / "curve.csv"
        curve_fh = open(result.curve_path, "w", newline="")
        curve_writer = csv.writer(curve_fh)
        curve_writer.writerow(["step", "success_rate", "avg_steps", "mean_q", "critic_loss", "actor_loss"])

    meta = {
        "n_pursuers": sim_cfg.n_pursuers,
        "variable_speed": int(sim_cfg.variable_speed),
        "neighbor_cap": -1 if neighbor_cap is None else neighbor_cap,
        "obs_dim": obs_dim,
        "act_dim": act_dim,
        "seed": td3_cfg.seed,
    }

    def save(name: str) -> Optional[Path]:
        if out_dir is None:
            return None
        path = out_dir / name
        save_checkpoint(path, agent.policy_networks(), meta=meta)
        return path

    feats = env.reset()
    diag = {"critic_loss": math.nan, "actor_loss": math.nan, "mean_q": math.nan}
    update_debt = 0.0
    started = time.monotonic()

    for step in range(1, td3_cfg.train_steps + 1):
        if td3_cfg.curriculum:
            env.capture_radius = schedule.radius_at(step - 1)

        next_feats, _, done, _ = collect_step(
            env, agent, feats, buffer, explore=True, random_actions=step <= td3_cfg.warmup_steps
        )
        feats = env.reset() if done else next_feats

        if step > td3_cfg.warmup_steps and len(buffer) >= td3_cfg.batch_size:
            update_debt += td3_cfg.updates_per_step
            while update_debt >= 1.0:
                diag = agent.update(buffer.sample(td3_cfg.batch_size, sample_rng))
                update_debt -= 1.0

        if step % td3_cfg.eval_every == 0 or step == td3_cfg.train_steps:
            eval_seed = (td3_cfg.seed + 1) * 1_000_003 + step
            ev = evaluate_policy(
                agent.actor, sim_cfg, td3_cfg.eval_trials, eval_seed,
                evader=evader, neighbor_cap=neighbor_cap,
            )
            row = {
                "step": step,
                "success_rate": ev.success_rate,
                "avg_steps": ev.avg_steps,
                "mean_q": diag["mean_q"],
                "critic_loss": diag["critic_loss"],
                "actor_loss": diag["actor_loss"],
            }
            result.curve.append(row)
            if curve_writer is not None:
                curve_writer.writerow([
                    step, f"{ev.success_rate:.4f}",
                    "" if ev.avg_steps is None else f"{ev.avg_steps:.2f}",
                    f"{row['mean_q']:.4f}", f"{row['critic_loss']:.6f}", f"{row['actor_loss']:.6f}",
                ])
                curve_fh.flush()
            if log_every:
                elapsed = time.monotonic() - started
                print(f"[train seed={td3_cfg.seed}] step {step}: success {ev.success_rate:.2f} "
                      f"({elapsed:.0f}s)", flush=True)
            if ev.success_rate >= result.best_success:
                result.best_success = ev.success_rate
                result.best_step = step
                result.best_checkpoint_path = save("policy_best.ckpt") or result.best_checkpoint_path
            if td3_cfg.early_stop_success is not None and ev.success_rate >= td3_cfg.early_stop_success:
                result.stopped_early = True
                result.steps_run = step
                break
        result.steps_run = step

    result.checkpoint_path = save("policy_final.ckpt")
    if curve_fh is not None:
        curve_fh.close()
    return result
