from __future__ import annotations

import pytest

from royal_ur import GameState, RulesConfig, initial_state


@pytest.fixture
def cfg4() -> RulesConfig:
    return RulesConfig(pieces_per_player=4, dice_count=2, reroll_on_max=False)


@pytest.fixture
def cfg1() -> RulesConfig:
    return RulesConfig(pieces_per_player=1, dice_count=2, reroll_on_max=False)


def rolled(state: GameState, dice: int) -> GameState:
    """Copy of ``state`` with the dice set."""
    return GameState(
        to_move=state.to_move,
        dice=dice,
        in_hand=state.in_hand,
        on_board=state.on_board,
        borne_off=state.borne_off,
    )


def enumerate_reachable(config: RulesConfig, dice_values=(0, 1, 2)):
    """Breadth-first set of every reachable rolled state (terminal excluded)."""
    from royal_ur import apply_move, legal_actions

    start = initial_state(config)
    frontier = [rolled(start, d) for d in dice_values]
    seen = set(frontier)
    while frontier:
        state = frontier.pop()
        for action in legal_actions(state, config):
            nxt, events = apply_move(state, action, config)
            if events.game_won:
                continue
            for d in dice_values:
                candidate = rolled(nxt, d)
                if candidate not in seen:
                    seen.add(candidate)
                    frontier.append(candidate)
    return seen
