"""Royal Game of Ur workbench: rules, MDP environment, tabular learners,
self-play training, persistence, and a live play service."""

from .agents import (
    LearnerConfig,
    QTable,
    Transition,
    epsilon_greedy,
    expected_sarsa_update,
    greedy_action,
    mc_update,
    q_learning_update,
    random_policy,
    state_value,
)
from .env import (
    EpisodeCapError,
    RewardSpec,
    StepResult,
    UrEnv,
    encode_state,
    normalize_state_key,
    reward_for,
    state_from_key,
)
from .rules import (
    GameState,
    IllegalMoveError,
    MoveEvents,
    RulesConfig,
    Seat,
    Square,
    Zone,
    action_for_piece,
    apply_move,
    initial_state,
    legal_actions,
    make_state,
    path_index,
    path_square,
    piece_for_action,
    roll_dice,
    square_zone,
    validate_state,
    winner,
)
from .storage import TableMeta, load_qtable, read_metrics, save_qtable, write_metrics
from .training import (
    TRACKED_STATE_KEY,
    EvalResult,
    MetricsPoint,
    ProbeResult,
    QValueBoundError,
    TrainConfig,
    TrainResult,
    evaluate,
    probe,
    train,
)

__version__ = "0.1.0"
