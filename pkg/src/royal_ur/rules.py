"""Rules engine for the Royal Game of Ur.

Board geometry, per-seat routes, dice, legal-move generation, move
application (capture, rosette displacement, bear-off) and terminal
detection. Everything here is deterministic; the only randomness is the
``random.Random`` instance handed to :func:`roll_dice`.

Geometry. The 20 squares form three rows: ``a`` and ``c`` are the seats'
private lanes (columns 1-4 and 7-8), ``b`` is the shared war zone
(columns 1-8). Each seat's route is 14 squares long: down its own lane
(col 4 -> 1), across the war zone (b1 -> b8), then back up its own lane
(col 8 -> 7) and off the board. Route progress is tracked as a path
index: 0 = in hand, 1-14 = on board, 15 = borne off. Both seats traverse
the war zone in the same direction, so a shared square is simply an
equal path index in 5..12. Rosettes sit at route indices 4, 8 and 14;
the one at index 8, square (b,4), is the single safe square inside the
war zone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from typing import Iterable, NamedTuple

HAND = 0
BORNE_OFF = 15
ROUTE_LEN = 14
WAR_ROSETTE_INDEX = 8
WAR_INDICES = range(5, 13)

NULL_ACTION = 0
START_POOL_ACTIONS = (21, 22)
FINISHED_POOL_ACTIONS = (23, 24)


class Seat(IntEnum):
    """One of the two players; usable as a 0/1 index."""

    P1 = 0
    P2 = 1

    @property
    def other(self) -> "Seat":
        return _OTHER_SEAT[self]

    def __str__(self) -> str:
        return self.name


_OTHER_SEAT = (Seat.P2, Seat.P1)


class Square(NamedTuple):
    row: str
    col: int

    def __str__(self) -> str:
        return f"{self.row}{self.col}"


class Zone(Enum):
    SAFE_PRIVATE = "safe_private"
    WAR_PLAIN = "war_plain"
    WAR_ROSETTE = "war_rosette"
    PRIVATE_ROSETTE = "private_rosette"


_PRIVATE_COLS = (1, 2, 3, 4, 7, 8)
_PRIVATE_ROW = {Seat.P1: "a", Seat.P2: "c"}

BOARD_SQUARES: tuple[Square, ...] = tuple(
    [Square("a", c) for c in _PRIVATE_COLS]
    + [Square("b", c) for c in range(1, 9)]
    + [Square("c", c) for c in _PRIVATE_COLS]
)


def _route(seat: Seat) -> tuple[Square, ...]:
    row = _PRIVATE_ROW[seat]
    lane_in = [Square(row, c) for c in (4, 3, 2, 1)]
    war = [Square("b", c) for c in range(1, 9)]
    lane_out = [Square(row, c) for c in (8, 7)]
    return tuple(lane_in + war + lane_out)


ROUTES: dict[Seat, tuple[Square, ...]] = {s: _route(s) for s in Seat}
ROSETTE_INDICES = frozenset({4, 8, 14})
ROSETTE_SQUARES = frozenset(
    ROUTES[s][i - 1] for s in Seat for i in ROSETTE_INDICES
)

# Board-position IDs: war zone b1..b8 -> 1..8, then row a -> 9..14 and
# row c -> 15..20 in column order, start pools 21/22, finished pools 23/24.
SQUARE_ACTION_IDS: dict[Square, int] = {Square("b", c): c for c in range(1, 9)}
SQUARE_ACTION_IDS.update(
    {Square("a", c): 8 + i for i, c in enumerate(_PRIVATE_COLS, start=1)}
)
SQUARE_ACTION_IDS.update(
    {Square("c", c): 14 + i for i, c in enumerate(_PRIVATE_COLS, start=1)}
)
ACTION_SQUARES: dict[int, Square] = {v: k for k, v in SQUARE_ACTION_IDS.items()}

_PATH_INDEX: dict[Seat, dict[Square, int]] = {
    s: {sq: i for i, sq in enumerate(ROUTES[s], start=1)} for s in Seat
}
# idx 0..14 -> action ID, per seat (idx 0 is the start pool).
_PIECE_ACTIONS: dict[Seat, tuple[int, ...]] = {
    s: (START_POOL_ACTIONS[s],) + tuple(SQUARE_ACTION_IDS[sq] for sq in ROUTES[s])
    for s in Seat
}


@dataclass(frozen=True, slots=True)
class RulesConfig:
    """Game parameters. Defaults are the classical seven-piece game."""

    pieces_per_player: int = 7
    dice_count: int = 4
    reroll_on_max: bool = True

    def __post_init__(self) -> None:
        if not 1 <= self.pieces_per_player <= 7:
            raise ValueError(f"pieces_per_player must be 1..7, got {self.pieces_per_player}")
        if self.dice_count not in (2, 4):
            raise ValueError(f"dice_count must be 2 or 4, got {self.dice_count}")


@dataclass(frozen=True, slots=True)
class GameState:
    """Full position: hands, on-board path indices, borne-off counts.

    ``on_board`` holds one sorted tuple of path indices per seat; ``dice``
    is None until the mover has rolled. Instances are immutable; moves
    produce new states.
    """

    to_move: Seat
    dice: int | None
    in_hand: tuple[int, int]
    on_board: tuple[tuple[int, ...], tuple[int, ...]]
    borne_off: tuple[int, int]


@dataclass(frozen=True, slots=True)
class MoveEvents:
    """What applying one move did, for reward shaping and UIs."""

    captured_opponent: bool = False
    landed_war_rosette: bool = False
    landed_war_nonrosette: bool = False
    borne_off: bool = False
    displaced_by_rosette: bool = False
    game_won: bool = False


class IllegalMoveError(ValueError):
    """Raised when a move cannot be applied; ``reason`` is a stable code."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


def path_square(seat: Seat, idx: int) -> Square:
    """Square at route position ``idx`` (1..14) for ``seat``."""
    if not 1 <= idx <= ROUTE_LEN:
        raise ValueError(f"path index must be 1..{ROUTE_LEN}, got {idx}")
    return ROUTES[seat][idx - 1]


def path_index(seat: Seat, square: Square) -> int:
    """Route position of ``square`` on ``seat``'s route (inverse of path_square)."""
    try:
        return _PATH_INDEX[seat][square]
    except KeyError:
        raise ValueError(f"{square} is not on {seat}'s route") from None


def square_zone(square: Square) -> Zone:
    if square not in SQUARE_ACTION_IDS:
        raise ValueError(f"not a board square: {square}")
    if square.row == "b":
        return Zone.WAR_ROSETTE if square in ROSETTE_SQUARES else Zone.WAR_PLAIN
    return Zone.PRIVATE_ROSETTE if square in ROSETTE_SQUARES else Zone.SAFE_PRIVATE


def action_for_piece(seat: Seat, path_idx: int) -> int:
    """Board-position ID naming the piece of ``seat`` at ``path_idx`` (0 = pool)."""
    if not 0 <= path_idx <= ROUTE_LEN:
        raise ValueError(f"no action for path index {path_idx}")
    return _PIECE_ACTIONS[seat][path_idx]


def piece_for_action(seat: Seat, action: int) -> int:
    """Path index of ``seat``'s piece named by ``action`` (decoder of action_for_piece)."""
    if action == START_POOL_ACTIONS[seat]:
        return HAND
    square = ACTION_SQUARES.get(action)
    if square is None:
        raise ValueError(f"action {action} does not name a movable position for {seat}")
    return path_index(seat, square)


def roll_dice(rng: random.Random, config: RulesConfig) -> int:
    """Count of marked corners over ``dice_count`` fair binary dice."""
    return rng.getrandbits(config.dice_count).bit_count()


def initial_state(config: RulesConfig) -> GameState:
    n = config.pieces_per_player
    return GameState(Seat.P1, None, (n, n), ((), ()), (0, 0))


def make_state(
    to_move: Seat,
    dice: int | None,
    in_hand: tuple[int, int],
    on_board: tuple[Iterable[int], Iterable[int]],
    borne_off: tuple[int, int] = (0, 0),
) -> GameState:
    """Build a GameState, sorting the board tuples."""
    boards = (tuple(sorted(on_board[0])), tuple(sorted(on_board[1])))
    return GameState(to_move, dice, tuple(in_hand), boards, tuple(borne_off))


def validate_state(state: GameState, config: RulesConfig) -> None:
    """Reject states that break the position invariants."""
    if state.dice is not None and not 0 <= state.dice <= config.dice_count:
        raise ValueError(f"dice value {state.dice} impossible with {config.dice_count} dice")
    overlap = set(state.on_board[0]) & set(state.on_board[1]) & set(WAR_INDICES)
    if overlap:
        raise ValueError(f"both seats occupy shared war square(s) at index {sorted(overlap)}")
    for seat in Seat:
        board = state.on_board[seat]
        if len(set(board)) != len(board):
            raise ValueError(f"{seat} has two pieces on one square")
        if any(not 1 <= i <= ROUTE_LEN for i in board):
            raise ValueError(f"{seat} has a piece off the route: {board}")
        if state.in_hand[seat] < 0 or state.borne_off[seat] < 0:
            raise ValueError(f"{seat} has negative piece counts")
        total = state.in_hand[seat] + len(board) + state.borne_off[seat]
        if total != config.pieces_per_player:
            raise ValueError(
                f"{seat} has {total} pieces, expected {config.pieces_per_player}"
            )


def _move_allowed(mine: tuple[int, ...], theirs: tuple[int, ...], src: int, dice: int) -> bool:
    dest = src + dice
    if dest > BORNE_OFF:
        return False  # must bear off by exact throw
    if dest == BORNE_OFF:
        return True
    if dest in mine:
        return False
    if dest == WAR_ROSETTE_INDEX and dest in theirs:
        # Occupant is safe; the mover is pushed one square further.
        nxt = dest + 1
        return nxt == BORNE_OFF or nxt not in mine
    return True


def legal_actions(state: GameState, config: RulesConfig) -> frozenset[int]:
    """Board-position IDs the mover may advance, or {0} when only a pass is legal."""
    if state.dice is None:
        raise IllegalMoveError("unrolled-dice", "dice must be rolled before moving")
    dice = state.dice
    if dice == 0:
        return frozenset((NULL_ACTION,))
    me = state.to_move
    mine = state.on_board[me]
    theirs = state.on_board[_OTHER_SEAT[me]]
    actions = []
    if state.in_hand[me] > 0 and _move_allowed(mine, theirs, HAND, dice):
        actions.append(START_POOL_ACTIONS[me])
    piece_actions = _PIECE_ACTIONS[me]
    for src in mine:
        if _move_allowed(mine, theirs, src, dice):
            actions.append(piece_actions[src])
    if not actions:
        return frozenset((NULL_ACTION,))
    return frozenset(actions)


def apply_move(state: GameState, action: int, config: RulesConfig) -> tuple[GameState, MoveEvents]:
    """Advance the piece named by ``action`` by the rolled dice value.

    Returns the successor state (dice unrolled, turn passed unless the
    four-dice max-roll re-roll applies) and the events the move produced.
    Illegal actions raise :class:`IllegalMoveError` with a reason code.
    """
    if state.dice is None:
        raise IllegalMoveError("unrolled-dice", "dice must be rolled before moving")
    me = state.to_move
    opp = _OTHER_SEAT[me]
    dice = state.dice
    reroll = config.reroll_on_max and dice == 4
    next_mover = me if reroll else opp

    if action == NULL_ACTION:
        if dice != 0 and legal_actions(state, config) != frozenset((NULL_ACTION,)):
            raise IllegalMoveError("null-not-allowed", "a forward move is available")
        return replace(state, to_move=next_mover, dice=None), MoveEvents()

    if dice == 0:
        raise IllegalMoveError("zero-roll", "a roll of 0 only allows the null move")
    try:
        src = piece_for_action(me, action)
    except ValueError as exc:
        raise IllegalMoveError("not-movers-piece", str(exc)) from None
    if src == HAND:
        if state.in_hand[me] == 0:
            raise IllegalMoveError("not-movers-piece", f"{me} has no piece in hand")
    elif src not in state.on_board[me]:
        raise IllegalMoveError(
            "not-movers-piece", f"{me} has no piece at {path_square(me, src)}"
        )

    dest = src + dice
    if dest > BORNE_OFF:
        raise IllegalMoveError(
            "overshoot", f"piece at index {src} needs an exact throw of {BORNE_OFF - src}"
        )

    mine = list(state.on_board[me])
    if src != HAND:
        mine.remove(src)
    theirs = list(state.on_board[opp])
    in_hand = list(state.in_hand)
    borne_off = list(state.borne_off)
    if src == HAND:
        in_hand[me] -= 1

    captured = False
    rosette = False
    war_plain = False
    displaced = False
    bear_off = False

    if dest == BORNE_OFF:
        bear_off = True
    else:
        if dest in mine:
            raise IllegalMoveError(
                "occupied-by-self", f"own piece already on {path_square(me, dest)}"
            )
        final = dest
        if dest == WAR_ROSETTE_INDEX and dest in theirs:
            final = dest + 1
            displaced = True
            if final == BORNE_OFF:
                bear_off = True
            elif final in mine:
                raise IllegalMoveError(
                    "displacement-blocked",
                    f"own piece on {path_square(me, final)} blocks the rosette displacement",
                )
        if not bear_off:
            if final in WAR_INDICES and final in theirs:
                theirs.remove(final)
                in_hand[opp] += 1
                captured = True
            if final in WAR_INDICES:
                if final == WAR_ROSETTE_INDEX:
                    rosette = True
                else:
                    war_plain = True
            mine.append(final)

    won = False
    if bear_off:
        borne_off[me] += 1
        won = borne_off[me] == config.pieces_per_player

    events = MoveEvents(
        captured_opponent=captured,
        landed_war_rosette=rosette,
        landed_war_nonrosette=war_plain,
        borne_off=bear_off,
        displaced_by_rosette=displaced,
        game_won=won,
    )
    boards = [state.on_board[0], state.on_board[1]]
    boards[me] = tuple(sorted(mine))
    boards[opp] = tuple(theirs)
    new_state = GameState(
        to_move=next_mover,
        dice=None,
        in_hand=(in_hand[0], in_hand[1]),
        on_board=(boards[0], boards[1]),
        borne_off=(borne_off[0], borne_off[1]),
    )
    return new_state, events


def winner(state: GameState, config: RulesConfig) -> Seat | None:
    for seat in Seat:
        if state.borne_off[seat] == config.pieces_per_player:
            return seat
    return None
