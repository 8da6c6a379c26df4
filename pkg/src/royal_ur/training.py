"""Self-play training for two independent learners, plus evaluation and probes.

Both seats learn simultaneously from their own transitions only; a seat's
transition spans from one of its decision points to its next one, with
the opponent's intervening ply folded into the environment dynamics. TD
learners update online, Monte Carlo learners once per episode.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

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
)
from .env import RewardSpec, UrEnv, encode_state
from .rules import GameState, RulesConfig, Seat, legal_actions, validate_state

# Loose analytic bound on any tabular value under the default rewards and
# gamma 0.9; a value outside it means a learner or engine bug.
Q_VALUE_BOUNDS = (-10.0, 1300.0)

# The frequently visited early-game position whose value is tracked while
# training: one piece each at (a,3)/(c,3), three in hand, roll of 1.
TRACKED_STATE_KEY = "((3, ((a,3),)), (3, ((c,3),)), 1)"


class QValueBoundError(RuntimeError):
    """A table value escaped the analytic bound during training."""


def _default_rules() -> RulesConfig:
    return RulesConfig(pieces_per_player=4, dice_count=2, reroll_on_max=False)


def _default_learners() -> tuple[LearnerConfig, LearnerConfig]:
    return (LearnerConfig(), LearnerConfig())


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 100_000
    rules: RulesConfig = field(default_factory=_default_rules)
    learners: tuple[LearnerConfig, LearnerConfig] = field(default_factory=_default_learners)
    rewards: RewardSpec = field(default_factory=RewardSpec)
    seed: int = 0
    tracked_state: str = TRACKED_STATE_KEY
    metrics_stride: int = 100

    def __post_init__(self) -> None:
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.metrics_stride < 1:
            raise ValueError("metrics_stride must be >= 1")


@dataclass(frozen=True, slots=True)
class MetricsPoint:
    """One recorded training sample.

    ``tracked_value`` is the tracked state's value in seat one's table as
    the episode starts (so the series opens at exactly 0); the ply count
    and cumulative win tallies are for/after the episode itself.
    """

    episode: int
    time_to_finish: int
    tracked_value: float
    wins_p1: int
    wins_p2: int


@dataclass
class TrainResult:
    tables: tuple[QTable, QTable]
    metrics: list[MetricsPoint]
    episodes: int


@dataclass(frozen=True, slots=True)
class EvalResult:
    games: int
    agent_wins: int
    opponent_wins: int
    mean_plies: float

    @property
    def win_rate(self) -> float:
        return self.agent_wins / self.games


@dataclass(frozen=True)
class ProbeResult:
    """Greedy choice and per-action value readout at one position."""

    action: int
    q_values: dict[int, float]
    state_key: str


TransitionHook = Callable[[Seat, Transition], None]


def _check_bounds(value: float) -> None:
    if not Q_VALUE_BOUNDS[0] <= value <= Q_VALUE_BOUNDS[1]:
        raise QValueBoundError(
            f"table value {value} left the expected range {Q_VALUE_BOUNDS}"
        )


def _run_episode(
    env: UrEnv,
    tables: tuple[QTable, QTable],
    cfg: TrainConfig,
    rng: random.Random,
    on_transition: TransitionHook | None,
) -> tuple[int, Seat]:
    learners = cfg.learners
    is_mc = tuple(lc.algorithm == "monte_carlo" for lc in learners)
    logs: tuple[list[Transition], list[Transition]] = ([], [])
    pending: list[tuple[str, int, float] | None] = [None, None]

    obs = env.reset()
    while True:
        seat = obs.to_move
        state_key = obs.state_key
        legal = obs.legal_actions
        held = pending[seat]
        if held is not None:
            t = Transition(held[0], held[1], held[2], state_key, legal)
            _deliver(tables[seat], t, learners[seat], is_mc[seat], logs[seat], seat, on_transition)
            pending[seat] = None
        action = epsilon_greedy(tables[seat], state_key, legal, learners[seat].epsilon, rng)
        obs = env.step(action)
        pending[seat] = (state_key, action, obs.reward)
        if obs.done:
            break

    for seat in (Seat.P1, Seat.P2):
        held = pending[seat]
        if held is not None:
            t = Transition(held[0], held[1], held[2], None, ())
            _deliver(tables[seat], t, learners[seat], is_mc[seat], logs[seat], seat, on_transition)
    for seat in (Seat.P1, Seat.P2):
        if is_mc[seat] and logs[seat]:
            for value in mc_update(tables[seat], logs[seat], learners[seat]):
                _check_bounds(value)
    assert obs.winner is not None
    return obs.ply, obs.winner


def _deliver(
    table: QTable,
    t: Transition,
    learner: LearnerConfig,
    mc: bool,
    log: list[Transition],
    seat: Seat,
    on_transition: TransitionHook | None,
) -> None:
    if on_transition is not None:
        on_transition(seat, t)
    if mc:
        log.append(t)
    elif learner.algorithm == "q_learning":
        _check_bounds(q_learning_update(table, t, learner))
    else:
        _check_bounds(expected_sarsa_update(table, t, learner))


def train(cfg: TrainConfig, on_transition: TransitionHook | None = None) -> TrainResult:
    """Run self-play episodes, updating one table per seat.

    Fully reproducible: a single seeded random stream drives the dice and
    both seats' exploration. ``on_transition`` (test instrumentation)
    observes every per-seat transition in order.
    """
    rng = random.Random(cfg.seed)
    env = UrEnv(cfg.rules, cfg.rewards, rng=rng)
    tables = (
        QTable(track_visits=cfg.learners[0].algorithm == "monte_carlo"),
        QTable(track_visits=cfg.learners[1].algorithm == "monte_carlo"),
    )
    metrics: list[MetricsPoint] = []
    wins = [0, 0]
    for episode in range(cfg.episodes):
        record = episode % cfg.metrics_stride == 0
        tracked = tables[0].state_value(cfg.tracked_state) if record else 0.0
        plies, who_won = _run_episode(env, tables, cfg, rng, on_transition)
        wins[who_won] += 1
        if record:
            metrics.append(MetricsPoint(episode, plies, tracked, wins[0], wins[1]))
    return TrainResult(tables=tables, metrics=metrics, episodes=cfg.episodes)


def evaluate(
    q: QTable,
    games: int,
    rules: RulesConfig,
    seed: int = 0,
    rewards: RewardSpec | None = None,
) -> EvalResult:
    """Play the table greedily against the uniform-random baseline.

    The trained agent alternates seats between games to cancel the
    first-mover advantage; there are no draws.
    """
    if games < 1:
        raise ValueError("games must be >= 1")
    rng = random.Random(seed)
    env = UrEnv(rules, rewards, rng=rng)
    agent_wins = 0
    total_plies = 0
    for game in range(games):
        agent_seat = Seat(game % 2)
        obs = env.reset()
        while not obs.done:
            if obs.to_move == agent_seat:
                action = greedy_action(q, obs.state_key, obs.legal_actions)
            else:
                action = random_policy(obs.legal_actions, rng)
            obs = env.step(action)
        total_plies += obs.ply
        if obs.winner == agent_seat:
            agent_wins += 1
    return EvalResult(
        games=games,
        agent_wins=agent_wins,
        opponent_wins=games - agent_wins,
        mean_plies=total_plies / games,
    )


def probe(q: QTable, state: GameState, rules: RulesConfig) -> ProbeResult:
    """Greedy action and the Q readout of every legal action at ``state``."""
    validate_state(state, rules)
    legal = legal_actions(state, rules)
    key = encode_state(state)
    readout = {action: q.get(key, action) for action in sorted(legal)}
    return ProbeResult(action=greedy_action(q, key, legal), q_values=readout, state_key=key)
