"""pursuitlab: multi-agent pursuit-evasion simulation, learning, and benchmarking.

A deterministic 2D world where unicycle-constrained pursuers chase a faster
omnidirectional evader inside a circular arena, plus everything around it:
egocentric observations, formation-aware rewards, scripted evader behaviors,
classical chase baselines, a from-scratch TD3 trainer with shared experience
and a capture-radius curriculum, a seeded benchmark harness, and a live
server where a human plays the evader from the browser.
"""

from .baselines import (
    AngelaniParams,
    ChaserPolicy,
    HeadingController,
    JanosovParams,
    angelani_action,
    heading_to_omega,
    janosov_action,
    pure_pursuit_action,
    tune_gain,
)
from .bench import (
    SweepRow,
    SweepSpec,
    TrialReport,
    read_replay,
    replay_export,
    run_fixed_paths,
    run_sweep,
    run_trial,
    world_frame,
    write_sweep_csv,
    write_sweep_json,
)
from .config import ConfigError, RunConfig, load_run_config
from .env import Policy, PursuitEnv
from .evaders import (
    ExternalPolicy,
    FixedPath,
    FixedPathPolicy,
    RepulsivePolicy,
    SegmentPath,
    external_evader_step,
    fixed_path_step,
    repulsive_direction,
    standard_paths,
)
from .nets import Adam, DenseNetwork, load_checkpoint, save_checkpoint
from .observe import (
    Observation,
    RelativeState,
    build_observation,
    feature_length,
    normalize_observation,
    relative_state,
)
from .rewards import RewardConfig, formation_score, per_agent_rewards
from .sim import (
    AgentState,
    EvaderState,
    Outcome,
    SimConfig,
    Status,
    WorldState,
    clamp_to_arena,
    detect_capture,
    integrate_unicycle,
    reset_world,
    step_world,
    wrap_angle,
)
from .td3 import (
    CurriculumSchedule,
    EvalResult,
    ReplayBuffer,
    TD3Agent,
    TD3Config,
    TD3Policy,
    TrainResult,
    collect_step,
    curriculum_step,
    evaluate_policy,
    scale_actions,
    train,
)

__version__ = "0.1.0"
