"""Live human-evader mode: wall-clock ticker, JSON wire protocol, websocket server.

One session owns one episode at a time. A fixed-rate ticker advances the
world: the pursuers act through the configured policy, the evader moves
along the latest human direction command (latest-wins, at most one command
applied per step). Every applied command is logged, so an episode is fully
reproducible from (seed, command log).

Wire protocol (JSON, schema version 1):

  server -> client   {"type": "frame", "v": 1, "t": int,
                      "agents": [{"x", "y", "psi"}, ...],
                      "evader": {"x", "y"}, "d_cap": num, "q": num|null,
                      "outcome": "running" | "captured" | "timeout"}
  client -> server   {"type": "move", "dir": [x, y], "seq": int}
                     {"type": "pause"}            (toggles pause)
                     {"type": "reset", "seed": int}
  server acks        {"type": "ack", ...} or {"type": "error", "message": str}

Episodes auto-reset two seconds after capture or timeout.
"""

from __future__ import annotations

import asyncio
import json
import math
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .bench import world_frame
from .env import Policy, PursuitEnv
from .rewards import RewardConfig
from .sim import SimConfig

PROTOCOL_VERSION = 1


@dataclass
class CommandState:
    direction: tuple[float, float] = (0.0, 0.0)
    seq: int = -1


@dataclass
class EpisodeRecord:
    seed: int
    commands: list[tuple[float, float]] = field(default_factory=list)  # one per step
    outcome: Optional[str] = None


class LiveSession:
    """Session state machine; the network layer only calls ``handle_command``
    and ``tick``."""

    def __init__(
        self,
        policy: Policy,
        sim_cfg: SimConfig,
        reward_cfg: Optional[RewardConfig] = None,
        base_seed: int = 0,
        tick_hz: float = 20.0,
        log_dir: Optional[Path] = None,
    ):
        self.policy = policy
        self.cfg = sim_cfg
        self.tick_hz = tick_hz
        self.mode = "live"
        self.latest = CommandState()
        self.episode_index = 0
        self.base_seed = base_seed
        self.log_dir = Path(log_dir) if log_dir else None
        self._cooldown = 0
        self._auto_reset_ticks = max(1, int(2.0 * tick_hz))
        self.env = PursuitEnv(sim_cfg, reward_cfg, evader="external")
        self.records: list[EpisodeRecord] = []
        self.record: Optional[EpisodeRecord] = None
        self._feats = None
        self.reset(base_seed)

    def reset(self, seed: int) -> None:
        self._feats = self.env.reset(seed=seed)
        self.policy.begin(self.env.world)
        self.latest = CommandState()
        self._cooldown = 0
        self.record = EpisodeRecord(seed=seed)

    def handle_command(self, msg: dict) -> dict:
        """Apply one client message; returns the ack (or error) to send back."""
        try:
            kind = msg.get("type")
            if kind == "move":
                seq = int(msg["seq"])
                if seq <= self.latest.seq:
                    return {"type": "ack", "seq": seq, "stale": True}
                x, y = float(msg["dir"][0]), float(msg["dir"][1])
                norm = math.hypot(x, y)
                if norm > 0:
                    x, y = x / norm, y / norm
                self.latest = CommandState((x, y), seq)
                return {"type": "ack", "seq": seq, "stale": False}
            if kind == "pause":
                self.mode = "paused" if self.mode == "live" else "live"
                return {"type": "ack", "mode": self.mode}
            if kind == "reset":
                self.reset(int(msg.get("seed", self.base_seed)))
                return {"type": "ack", "reset": True, "seed": self.record.seed}
            return {"type": "error", "message": f"unknown message type {kind!r}"}
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            return {"type": "error", "message": f"malformed message: {exc}"}

    def tick(self) -> Optional[dict]:
        """Advance one step (in live mode) and return the frame to broadcast.

        While paused, returns None (no frame, state frozen). After an episode
        ends the final frame keeps being emitted during the cooldown, then
        the session resets with the next seed.
        """
        if self.mode != "live":
            return None

        world = self.env.world
        if not world.outcome.running:
            frame = world_frame(world, self.env.capture_radius)
            self._cooldown -= 1
            if self._cooldown <= 0:
                self._finish_episode(world.outcome.status.value)
                self.episode_index += 1
                self.reset(self.base_seed + self.episode_index)
            return frame

        cmd = self.latest.direction
        self.record.commands.append(cmd)
        self._feats, _, done, _ = self.env.step(
            self.policy.act(world, self._feats), external_cmd=cmd
        )
        if done:
            self._cooldown = self._auto_reset_ticks
        return world_frame(self.env.world, self.env.capture_radius)

    def _finish_episode(self, outcome: str) -> None:
        self.record.outcome = outcome
        self.records.append(self.record)
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            path = self.log_dir / f"episode_{len(self.records):04d}.json"
            path.write_text(json.dumps({
                "seed": self.record.seed,
                "outcome": outcome,
                "commands": self.record.commands,
            }))


def replay_episode(
    policy: Policy,
    sim_cfg: SimConfig,
    seed: int,
    commands: list[tuple[float, float]],
    reward_cfg: Optional[RewardConfig] = None,
):
    """Re-simulate an episode from its seed and command log.

    Returns the list of world states; bit-exact against the live run because
    both paths drive the same deterministic environment and policy.
    """
    env = PursuitEnv(sim_cfg, reward_cfg, evader="external")
    feats = env.reset(seed=seed)
    policy.begin(env.world)
    worlds = [env.world]
    for cmd in commands:
        feats, _, done, _ = env.step(policy.act(env.world, feats), external_cmd=tuple(cmd))
        worlds.append(env.world)
        if done:
            break
    return worlds


def create_app(session: LiveSession, ui_dir: Optional[Path] = None):
    """FastAPI app: /ws streams frames and accepts commands; optional static UI."""
    subscribers: set[asyncio.Queue] = set()

    async def ticker():
        period = 1.0 / session.tick_hz
        while True:
            frame = session.tick()
            if frame is not None:
                for queue in list(subscribers):
                    if queue.full():
                        try:
                            queue.get_nowait()  # drop the oldest frame
                        except asyncio.QueueEmpty:
                            pass
                    queue.put_nowait(frame)
            await asyncio.sleep(period)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(ticker())
        yield
        task.cancel()

    app = FastAPI(title="pursuitlab live", lifespan=lifespan)
    app.state.session = session

    @app.get("/health")
    async def health():
        return JSONResponse({"mode": session.mode, "episode": session.episode_index})

    @app.websocket("/ws")
    async def ws_endpoint(socket: WebSocket):
        await socket.accept()
        queue: asyncio.Queue = asyncio.Queue(maxsize=8)
        subscribers.add(queue)

        async def sender():
            while True:
                frame = await queue.get()
                await socket.send_json(frame)

        send_task = asyncio.create_task(sender())
        try:
            while True:
                msg = await socket.receive_json()
                await socket.send_json(session.handle_command(msg))
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            subscribers.discard(queue)

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def serve(session: LiveSession, host: str = "127.0.0.1", port: int = 8000,
          ui_dir: Optional[Path] = None) -> None:
    """Run the live server until interrupted."""
    import uvicorn

    uvicorn.run(create_app(session, ui_dir=ui_dir), host=host, port=port, log_level="info")
