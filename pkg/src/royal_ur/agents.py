"""Tabular action-value learners and policies.

Q-learning, Expected Sarsa and on-policy first-visit Monte Carlo control
over a sparse Q-table, plus epsilon-greedy action selection and the
uniform-random baseline. Updates mutate the table in place and return the
value written, so callers can bound-check cheaply.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

ALGORITHMS = ("q_learning", "expected_sarsa", "monte_carlo")


@dataclass(frozen=True, slots=True)
class LearnerConfig:
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.1
    algorithm: str = "q_learning"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")


@dataclass(frozen=True, slots=True)
class Transition:
    """One decision-point-to-decision-point step for a single seat.

    ``next_state`` is None exactly when the episode ended for this seat;
    ``next_legal`` lists the actions available at ``next_state``.
    """

    state: str
    action: int
    reward: float
    next_state: str | None
    next_legal: tuple[int, ...] = ()


EpisodeLog = Sequence[Transition]


class QTable:
    """Sparse map (state key, action) -> value; absent entries read as 0.

    Visit counts exist only when ``track_visits`` is set (Monte Carlo
    tables); TD tables carry values alone.
    """

    __slots__ = ("entries", "visits")

    def __init__(self, track_visits: bool = False):
        self.entries: dict[str, dict[int, float]] = {}
        self.visits: dict[str, dict[int, int]] | None = {} if track_visits else None

    def get(self, state: str, action: int) -> float:
        row = self.entries.get(state)
        if row is None:
            return 0.0
        return row.get(action, 0.0)

    def set(self, state: str, action: int, value: float) -> None:
        self.entries.setdefault(state, {})[action] = value

    def state_value(self, state: str) -> float:
        """Greedy value of ``state``: max over stored actions, 0 when unseen."""
        row = self.entries.get(state)
        if not row:
            return 0.0
        return max(row.values())

    def visit_count(self, state: str, action: int) -> int:
        if self.visits is None:
            return 0
        row = self.visits.get(state)
        if row is None:
            return 0
        return row.get(action, 0)

    def __len__(self) -> int:
        return sum(len(row) for row in self.entries.values())

    def items(self) -> Iterator[tuple[str, int, float, int | None]]:
        """Yield (state, action, value, visit count or None), unordered."""
        for state, row in self.entries.items():
            for action, value in row.items():
                count = self.visit_count(state, action) if self.visits is not None else None
                yield state, action, value, count


def state_value(q: QTable, state: str) -> float:
    return q.state_value(state)


def greedy_action(q: QTable, state: str, legal: Iterable[int]) -> int:
    """Argmax of q(state, .) over ``legal``; ties go to the smallest action ID."""
    best = -1
    best_value = 0.0
    for action in sorted(legal):
        value = q.get(state, action)
        if best < 0 or value > best_value:
            best = action
            best_value = value
    if best < 0:
        raise ValueError("empty legal action set")
    return best


def epsilon_greedy(
    q: QTable, state: str, legal: Iterable[int], eps: float, rng: random.Random
) -> int:
    """Greedy with probability 1-eps, else uniform over all legal actions."""
    choices = sorted(legal)
    if not choices:
        raise ValueError("empty legal action set")
    if eps > 0.0 and rng.random() < eps:
        return choices[rng.randrange(len(choices))]
    return greedy_action(q, state, choices)


def random_policy(legal: Iterable[int], rng: random.Random) -> int:
    choices = sorted(legal)
    if not choices:
        raise ValueError("empty legal action set")
    return choices[rng.randrange(len(choices))]


def _max_next(q: QTable, state: str, legal: tuple[int, ...]) -> float:
    row = q.entries.get(state)
    if row is None:
        return 0.0
    best = None
    for action in legal:
        value = row.get(action, 0.0)
        if best is None or value > best:
            best = value
    return best if best is not None else 0.0


def q_learning_update(q: QTable, t: Transition, cfg: LearnerConfig) -> float:
    """Off-policy TD step toward r + gamma * max_a' Q(s', a')."""
    if t.next_state is None:
        target = t.reward
    else:
        target = t.reward + cfg.gamma * _max_next(q, t.next_state, t.next_legal)
    old = q.get(t.state, t.action)
    new = old + cfg.alpha * (target - old)
    q.set(t.state, t.action, new)
    return new


def expected_sarsa_update(q: QTable, t: Transition, cfg: LearnerConfig) -> float:
    """On-policy TD step toward the epsilon-greedy expectation at s'.

    With eps=0 the expectation collapses to the max and the update matches
    q_learning_update bit for bit.
    """
    if t.next_state is None:
        target = t.reward
    else:
        legal = t.next_legal
        row = q.entries.get(t.next_state)
        best = None
        total = 0.0
        for action in legal:
            value = row.get(action, 0.0) if row is not None else 0.0
            total += value
            if best is None or value > best:
                best = value
        if best is None:
            expectation = 0.0
        else:
            eps = cfg.epsilon
            expectation = (1.0 - eps) * best + (eps / len(legal)) * total
        target = t.reward + cfg.gamma * expectation
    old = q.get(t.state, t.action)
    new = old + cfg.alpha * (target - old)
    q.set(t.state, t.action, new)
    return new


def mc_update(q: QTable, episode: EpisodeLog, cfg: LearnerConfig) -> list[float]:
    """First-visit Monte Carlo control update from one complete episode.

    The discounted return of each first-visited (s, a) is folded into the
    table by incremental sample average; this needs a visit-tracking
    table. Returns the values written, one per first-visited pair.
    """
    if not episode or episode[-1].next_state is not None:
        raise ValueError("episode is incomplete: final transition is not terminal")
    if q.visits is None:
        raise ValueError("Monte Carlo updates need a visit-tracking QTable")

    returns: list[float] = [0.0] * len(episode)
    g = 0.0
    for i in range(len(episode) - 1, -1, -1):
        g = episode[i].reward + cfg.gamma * g
        returns[i] = g

    seen: set[tuple[str, int]] = set()
    written: list[float] = []
    for t, g in zip(episode, returns):
        key = (t.state, t.action)
        if key in seen:
            continue
        seen.add(key)
        visits_row = q.visits.setdefault(t.state, {})
        n = visits_row.get(t.action, 0) + 1
        visits_row[t.action] = n
        old = q.get(t.state, t.action)
        new = old + (g - old) / n
        q.set(t.state, t.action, new)
        written.append(new)
    return written
