"""Command-line entry points: train, eval, probe, play, serve, report.

Run configuration comes from flags, optionally seeded by a JSON config
file (flags win). Exit codes: 0 success, 2 usage error, 3 I/O error,
4 invariant breach.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from .agents import LearnerConfig, QTable, greedy_action
from .env import EpisodeCapError, UrEnv, encode_state, normalize_state_key
from .rules import (
    NULL_ACTION,
    START_POOL_ACTIONS,
    GameState,
    IllegalMoveError,
    RulesConfig,
    Seat,
    Square,
    Zone,
    make_state,
    path_index,
    path_square,
    piece_for_action,
    square_zone,
)
from .storage import StorageError, TableMeta, load_qtable, save_qtable, write_metrics
from .training import (
    TRACKED_STATE_KEY,
    QValueBoundError,
    TrainConfig,
    evaluate,
    probe,
    train,
)

ALGO_NAMES = {"q": "q_learning", "esarsa": "expected_sarsa", "mc": "monte_carlo"}

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INVARIANT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="royal-ur", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="self-play training run")
    p_train.add_argument("--config", help="JSON file with defaults for the flags below")
    p_train.add_argument("--algo", choices=sorted(ALGO_NAMES))
    p_train.add_argument("--episodes", type=int)
    p_train.add_argument("--pieces", type=int)
    p_train.add_argument("--dice", type=int, choices=(2, 4))
    p_train.add_argument("--reroll-on-max", action="store_true", default=None)
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--alpha", type=float)
    p_train.add_argument("--gamma", type=float)
    p_train.add_argument("--epsilon", type=float)
    p_train.add_argument("--stride", type=int, help="record metrics every N episodes")
    p_train.add_argument("--tracked-state", help="state key whose value is recorded")
    p_train.add_argument("--out", help="output directory")

    p_eval = sub.add_parser("eval", help="play a trained table against the random baseline")
    p_eval.add_argument("--table", required=True)
    p_eval.add_argument("--games", type=int, default=100)
    p_eval.add_argument("--seed", type=int, default=0)

    p_probe = sub.add_parser("probe", help="greedy action and Q readout at a position")
    p_probe.add_argument("--table", required=True)
    p_probe.add_argument(
        "--position",
        required=True,
        help="position JSON (or @file), e.g. "
        '\'{"toMove":"P1","dice":1,"hand":{"P1":3,"P2":3},"board":{"P1":["b8"],"P2":["b5"]}}\'',
    )

    p_play = sub.add_parser("play", help="interactive terminal game against the agent")
    p_play.add_argument("--table", required=True)
    p_play.add_argument("--seat", choices=("P1", "P2"), default="P1", help="human seat")
    p_play.add_argument("--seed", type=int)

    p_serve = sub.add_parser("serve", help="HTTP play service")
    p_serve.add_argument("--table", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    p_report = sub.add_parser("report", help="render figures from a metrics CSV")
    p_report.add_argument("--metrics", required=True)
    p_report.add_argument("--out", help="figure directory (default: beside the CSV)")

    return parser


TRAIN_DEFAULTS = {
    "algo": "q",
    "episodes": 100_000,
    "pieces": 4,
    "dice": 2,
    "reroll_on_max": False,
    "seed": 0,
    "alpha": 0.1,
    "gamma": 0.9,
    "epsilon": 0.1,
    "stride": 100,
    "tracked_state": TRACKED_STATE_KEY,
    "out": "runs/latest",
}


def _merged_train_options(args: argparse.Namespace) -> dict:
    merged = dict(TRAIN_DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            try:
                file_opts = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{args.config}: not valid JSON: {exc}") from exc
        unknown = set(file_opts) - set(TRAIN_DEFAULTS)
        if unknown:
            raise ValueError(f"{args.config}: unknown config keys {sorted(unknown)}")
        merged.update(file_opts)
    for key in TRAIN_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _cmd_train(args: argparse.Namespace) -> int:
    opts = _merged_train_options(args)
    if opts["algo"] not in ALGO_NAMES:
        raise ValueError(f"unknown algorithm {opts['algo']!r}; pick one of {sorted(ALGO_NAMES)}")
    algorithm = ALGO_NAMES[opts["algo"]]
    rules = RulesConfig(opts["pieces"], opts["dice"], bool(opts["reroll_on_max"]))
    learner = LearnerConfig(
        alpha=opts["alpha"], gamma=opts["gamma"], epsilon=opts["epsilon"], algorithm=algorithm
    )
    cfg = TrainConfig(
        episodes=opts["episodes"],
        rules=rules,
        learners=(learner, learner),
        seed=opts["seed"],
        tracked_state=normalize_state_key(opts["tracked_state"]),
        metrics_stride=opts["stride"],
    )
    out_dir = Path(opts["out"])
    print(f"training {algorithm} for {cfg.episodes} episodes "
          f"(pieces={rules.pieces_per_player}, dice={rules.dice_count}, seed={cfg.seed})")
    result = train(cfg)
    meta_common = dict(
        algorithm=algorithm,
        alpha=learner.alpha,
        gamma=learner.gamma,
        epsilon=learner.epsilon,
        pieces_per_player=rules.pieces_per_player,
        dice_count=rules.dice_count,
        reroll_on_max=rules.reroll_on_max,
        seed=cfg.seed,
        episodes=cfg.episodes,
    )
    for seat in Seat:
        path = out_dir / f"qtable_{seat.name.lower()}.tsv"
        save_qtable(result.tables[seat], TableMeta(seat=seat.name, **meta_common), path)
        print(f"wrote {path} ({len(result.tables[seat])} entries)")
    metrics_path = out_dir / "metrics.csv"
    write_metrics(result.metrics, metrics_path)
    print(f"wrote {metrics_path} ({len(result.metrics)} points)")
    last = result.metrics[-1]
    print(f"final point: episode={last.episode} time_to_finish={last.time_to_finish} "
          f"tracked_value={last.tracked_value:.3f} wins P1/P2={last.wins_p1}/{last.wins_p2}")
    print(f"render figures with: royal-ur report --metrics {metrics_path}")
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    q, meta = load_qtable(args.table)
    result = evaluate(q, args.games, meta.rules(), seed=args.seed)
    print(f"table: {args.table} ({meta.algorithm}, {meta.episodes} episodes)")
    print(f"games: {result.games}")
    print(f"agent wins: {result.agent_wins}")
    print(f"opponent wins: {result.opponent_wins}")
    print(f"win rate: {result.win_rate:.3f}")
    print(f"mean plies: {result.mean_plies:.1f}")
    return EXIT_OK


def _position_from_json(text: str, rules: RulesConfig) -> GameState:
    if text.startswith("@"):
        text = Path(text[1:]).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"--position is not valid JSON: {exc}") from exc
    try:
        to_move = Seat[payload.get("toMove", "P1")]
    except KeyError:
        raise ValueError("toMove must be P1 or P2") from None
    dice = payload.get("dice")
    if not isinstance(dice, int):
        raise ValueError("position needs an integer 'dice'")
    hands = payload.get("hand", {})
    boards_raw = payload.get("board", {})
    borne = payload.get("borneOff", {})
    boards = []
    for seat in Seat:
        squares = boards_raw.get(seat.name, [])
        indices = []
        for name in squares:
            if len(name) < 2 or name[0] not in "abc":
                raise ValueError(f"bad square name {name!r} (expected e.g. 'b4')")
            square = Square(name[0], int(name[1:]))
            indices.append(path_index(seat, square))
        boards.append(indices)
    state = make_state(
        to_move,
        dice,
        (int(hands.get("P1", 0)), int(hands.get("P2", 0))),
        (boards[0], boards[1]),
        (int(borne.get("P1", 0)), int(borne.get("P2", 0))),
    )
    return state


def describe_action(seat: Seat, action: int) -> str:
    if action == NULL_ACTION:
        return "pass (no legal move)"
    if action == START_POOL_ACTIONS[seat]:
        return "enter a new piece"
    idx = piece_for_action(seat, action)
    return f"move piece at {path_square(seat, idx)}"


def _cmd_probe(args: argparse.Namespace) -> int:
    q, meta = load_qtable(args.table)
    rules = meta.rules()
    state = _position_from_json(args.position, rules)
    result = probe(q, state, rules)
    print(f"state: {result.state_key}")
    print(f"greedy action: {result.action} ({describe_action(state.to_move, result.action)})")
    for action, value in result.q_values.items():
        marker = "*" if action == result.action else " "
        print(f" {marker} {action:>2}  {value:+.4f}  {describe_action(state.to_move, action)}")
    return EXIT_OK


def format_board(state: GameState) -> str:
    """ASCII board; rosettes are starred, 1/2 mark the seats' pieces."""
    occupied: dict[Square, str] = {}
    for seat in Seat:
        for idx in state.on_board[seat]:
            occupied[path_square(seat, idx)] = "1" if seat == Seat.P1 else "2"
    lines = ["    " + "  ".join(str(c) for c in range(1, 9))]
    for row in ("a", "b", "c"):
        cells = []
        for col in range(1, 9):
            square = Square(row, col)
            try:
                zone = square_zone(square)
            except ValueError:
                cells.append(" ")
                continue
            if square in occupied:
                cells.append(occupied[square])
            elif zone in (Zone.WAR_ROSETTE, Zone.PRIVATE_ROSETTE):
                cells.append("*")
            else:
                cells.append(".")
        lines.append(f" {row}  " + "  ".join(cells))
    return "\n".join(lines)


def play_game(
    q: QTable,
    meta: TableMeta,
    human_seat: Seat,
    seed: int | None = None,
    input_fn: Callable[[str], str] = input,
    print_fn: Callable[[str], None] = print,
) -> Seat:
    """Terminal game loop; returns the winning seat."""
    env = UrEnv(meta.rules(), seed=seed)
    env.reset()
    agent_seat = human_seat.other
    print_fn(f"You are {human_seat.name}; the agent ({meta.algorithm or 'table'}) is {agent_seat.name}.")
    while not env.done:
        state = env.state
        mover = state.to_move
        if mover == human_seat:
            print_fn("")
            print_fn(format_board(state))
            print_fn(
                f"hands P1/P2: {state.in_hand[0]}/{state.in_hand[1]}   "
                f"borne off: {state.borne_off[0]}/{state.borne_off[1]}"
            )
            print_fn(f"you rolled {state.dice}; legal actions:")
            legal = env.legal
            for action in legal:
                print_fn(f"  {action:>2}  {describe_action(mover, action)}")
            while True:
                raw = input_fn("action id> ").strip()
                try:
                    choice = int(raw)
                except ValueError:
                    print_fn(f"enter one of {list(legal)}")
                    continue
                if choice not in legal:
                    print_fn(f"enter one of {list(legal)}")
                    continue
                break
            result = env.step(choice)
            _announce(result.events, "you", print_fn)
        else:
            action = greedy_action(q, encode_state(state), env.legal)
            result = env.step(action)
            print_fn(f"agent rolled {state.dice}: {describe_action(mover, action)}")
            _announce(result.events, "agent", print_fn)
    assert env.winner is not None
    print_fn("")
    print_fn(format_board(env.state))
    if env.winner == human_seat:
        print_fn("you win!")
    else:
        print_fn("the agent wins.")
    return env.winner


def _announce(events, who: str, print_fn: Callable[[str], None]) -> None:
    if events.captured_opponent:
        print_fn(f"  {who} captured a piece!")
    if events.displaced_by_rosette:
        print_fn(f"  {who} bounced off the guarded rosette")
    if events.landed_war_rosette:
        print_fn(f"  {who} claimed the war-zone rosette")
    if events.borne_off:
        print_fn(f"  {who} bore a piece off")


def _cmd_play(args: argparse.Namespace) -> int:
    q, meta = load_qtable(args.table)
    play_game(q, meta, Seat[args.seat], seed=args.seed)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    q, meta = load_qtable(args.table)
    app = create_app(q, meta)
    print(f"serving table {args.table} ({len(q)} entries) on http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    from .reports import report_from_csv

    written = report_from_csv(args.metrics, args.out)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "probe": _cmd_probe,
    "play": _cmd_play,
    "serve": _cmd_serve,
    "report": _cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (EpisodeCapError, QValueBoundError) as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (StorageError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, IllegalMoveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
