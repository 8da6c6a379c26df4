"""Two-seat episodic MDP wrapped around the rules engine.

Provides the canonical text encoding of positions (the Q-table key), the
shaped reward function, and a reset/step environment. One environment
instance is a single-owner state machine; distinct instances are
independent.
"""

from __future__ import annotations

import random
import re
from ast import literal_eval
from dataclasses import dataclass

from .rules import (
    ROUTE_LEN,
    ROUTES,
    GameState,
    IllegalMoveError,
    MoveEvents,
    RulesConfig,
    Seat,
    Square,
    action_for_piece,
    apply_move,
    initial_state,
    legal_actions,
    make_state,
    path_index,
    piece_for_action,
    roll_dice,
)

__all__ = [
    "RewardSpec",
    "StepResult",
    "UrEnv",
    "EpisodeCapError",
    "encode_state",
    "parse_state_key",
    "normalize_state_key",
    "state_from_key",
    "action_for_piece",
    "piece_for_action",
    "reward_for",
]

# Coordinate text and piece ordering, precomputed per seat. On-board
# pieces are listed in square order (row, then column), which matches the
# canonical key layout regardless of route direction.
_SQUARE_TEXT: dict[Seat, tuple[str, ...]] = {
    s: ("",) + tuple(f"({sq.row},{sq.col})" for sq in ROUTES[s]) for s in Seat
}


def _square_ranks(seat: Seat) -> tuple[int, ...]:
    by_square = sorted(range(1, ROUTE_LEN + 1), key=lambda i: ROUTES[seat][i - 1])
    ranks = [0] * (ROUTE_LEN + 1)
    for rank, idx in enumerate(by_square, start=1):
        ranks[idx] = rank
    return tuple(ranks)


_SQUARE_RANK: dict[Seat, tuple[int, ...]] = {s: _square_ranks(s) for s in Seat}


@dataclass(frozen=True, slots=True)
class RewardSpec:
    """Shaped per-move rewards; defaults are the workbench standard."""

    capture: float = 10.0
    war_rosette_landing: float = 20.0
    war_plain_landing: float = -1.0
    win: float = 100.0
    lose: float = 0.0
    default: float = 0.0


def reward_for(events: MoveEvents, spec: RewardSpec = RewardSpec()) -> float:
    """Sum the reward components triggered by one move's events."""
    r = spec.default
    if events.captured_opponent:
        r += spec.capture
    if events.landed_war_rosette:
        r += spec.war_rosette_landing
    elif events.landed_war_nonrosette:
        r += spec.war_plain_landing
    if events.game_won:
        r += spec.win
    return r


def encode_state(state: GameState) -> str:
    """Canonical key: ((hand1, coords1), (hand2, coords2), dice).

    Coordinates are listed per seat in board order; permuting piece
    identities cannot change the key. The exact byte layout is part of
    the persistence format, e.g. ``((2, ((a,3),(a,4))), (3, ((c,3),)), 1)``.
    """
    if state.dice is None:
        raise ValueError("cannot encode a state before the dice are rolled")
    parts = []
    for seat in (Seat.P1, Seat.P2):
        board = state.on_board[seat]
        if not board:
            coords = "()"
        else:
            rank = _SQUARE_RANK[seat]
            text = _SQUARE_TEXT[seat]
            inner = ",".join(text[i] for i in sorted(board, key=rank.__getitem__))
            coords = f"({inner},)" if len(board) == 1 else f"({inner})"
        parts.append(f"({state.in_hand[seat]}, {coords})")
    return f"({parts[0]}, {parts[1]}, {state.dice})"


_BARE_ROW = re.compile(r"([('\s,])([abc])(?=\s*,)")


def parse_state_key(text: str) -> tuple[tuple[int, tuple], tuple[int, tuple], int]:
    """Parse a state key, tolerating quoted rows and loose whitespace."""
    quoted = _BARE_ROW.sub(r"\1'\2'", text.strip())
    try:
        value = literal_eval(quoted)
        (h1, c1), (h2, c2), dice = value
        groups = []
        for h, coords in ((h1, c1), (h2, c2)):
            if len(coords) == 2 and isinstance(coords[0], str):
                coords = (coords,)  # single pair written without trailing comma
            pairs = tuple((str(r), int(c)) for r, c in coords)
            groups.append((int(h), pairs))
        return groups[0], groups[1], int(dice)
    except (ValueError, SyntaxError, TypeError) as exc:
        raise ValueError(f"not a state key: {text!r}") from exc


def normalize_state_key(text: str) -> str:
    """Re-render any accepted key spelling in the canonical byte layout."""
    (h1, c1), (h2, c2), dice = parse_state_key(text)
    parts = []
    for h, coords in ((h1, c1), (h2, c2)):
        if not coords:
            body = "()"
        else:
            inner = ",".join(f"({r},{c})" for r, c in coords)
            body = f"({inner},)" if len(coords) == 1 else f"({inner})"
        parts.append(f"({h}, {body})")
    return f"({parts[0]}, {parts[1]}, {dice})"


def state_from_key(text: str, to_move: Seat, config: RulesConfig) -> GameState:
    """Rebuild a GameState from a key; borne-off counts are inferred."""
    (h1, c1), (h2, c2), dice = parse_state_key(text)
    boards = []
    hands = (h1, h2)
    for seat, coords in zip(Seat, (c1, c2)):
        boards.append([path_index(seat, Square(r, c)) for r, c in coords])
    borne = tuple(
        config.pieces_per_player - hands[s] - len(boards[s]) for s in (0, 1)
    )
    if min(borne) < 0:
        raise ValueError(f"key {text!r} holds more than {config.pieces_per_player} pieces")
    return make_state(to_move, dice, hands, (boards[0], boards[1]), borne)


@dataclass(frozen=True, slots=True)
class StepResult:
    """Observation at a decision point plus the reward for the move just taken.

    ``reward`` is credited to the seat that made the move (0.0 on reset).
    At the terminal step there is no next decision point: ``state_key`` is
    None and ``legal_actions`` is empty.
    """

    state_key: str | None
    legal_actions: tuple[int, ...]
    to_move: Seat
    reward: float
    done: bool
    winner: Seat | None
    events: MoveEvents
    ply: int


class EpisodeCapError(RuntimeError):
    """An episode exceeded the hard ply cap (a rules-engine bug guard)."""


class UrEnv:
    """Gym-style reset/step environment over the Ur rules.

    Dice are rolled internally for whichever seat moves next; the caller
    supplies one action per decision point. Rewards follow ``rewards`` and
    go to the mover.
    """

    def __init__(
        self,
        rules: RulesConfig | None = None,
        rewards: RewardSpec | None = None,
        seed: int | None = None,
        rng: random.Random | None = None,
        ply_cap: int = 100_000,
    ):
        self.rules = rules if rules is not None else RulesConfig()
        self.rewards = rewards if rewards is not None else RewardSpec()
        self.ply_cap = ply_cap
        self._rng = rng if rng is not None else random.Random(seed)
        self._state: GameState | None = None
        self._legal: frozenset[int] = frozenset()
        self._done = True
        self._winner: Seat | None = None
        self._ply = 0

    @property
    def state(self) -> GameState:
        if self._state is None:
            raise RuntimeError("environment not reset")
        return self._state

    @property
    def done(self) -> bool:
        return self._done

    @property
    def winner(self) -> Seat | None:
        return self._winner

    @property
    def legal(self) -> tuple[int, ...]:
        """Sorted legal actions at the current decision point."""
        return tuple(sorted(self._legal))

    @property
    def ply(self) -> int:
        return self._ply

    def reset(self, seed: int | None = None) -> StepResult:
        if seed is not None:
            self._rng = random.Random(seed)
        state = initial_state(self.rules)
        state = replace_dice(state, roll_dice(self._rng, self.rules))
        self._state = state
        self._legal = legal_actions(state, self.rules)
        self._done = False
        self._winner = None
        self._ply = 0
        return StepResult(
            state_key=encode_state(state),
            legal_actions=tuple(sorted(self._legal)),
            to_move=state.to_move,
            reward=0.0,
            done=False,
            winner=None,
            events=MoveEvents(),
            ply=0,
        )

    def step(self, action: int) -> StepResult:
        if self._done or self._state is None:
            raise RuntimeError("episode is over; call reset()")
        if action not in self._legal:
            raise IllegalMoveError(
                "not-advertised",
                f"action {action} not in legal set {sorted(self._legal)}",
            )
        mover = self._state.to_move
        new_state, events = apply_move(self._state, action, self.rules)
        reward = reward_for(events, self.rewards)
        self._ply += 1

        if events.game_won:
            self._state = new_state
            self._legal = frozenset()
            self._done = True
            self._winner = mover
            return StepResult(
                state_key=None,
                legal_actions=(),
                to_move=new_state.to_move,
                reward=reward,
                done=True,
                winner=mover,
                events=events,
                ply=self._ply,
            )

        if self._ply >= self.ply_cap:
            raise EpisodeCapError(f"episode exceeded {self.ply_cap} plies")
        new_state = replace_dice(new_state, roll_dice(self._rng, self.rules))
        self._state = new_state
        self._legal = legal_actions(new_state, self.rules)
        return StepResult(
            state_key=encode_state(new_state),
            legal_actions=tuple(sorted(self._legal)),
            to_move=new_state.to_move,
            reward=reward,
            done=False,
            winner=None,
            events=events,
            ply=self._ply,
        )


def replace_dice(state: GameState, dice: int) -> GameState:
    return GameState(
        to_move=state.to_move,
        dice=dice,
        in_hand=state.in_hand,
        on_board=state.on_board,
        borne_off=state.borne_off,
    )
