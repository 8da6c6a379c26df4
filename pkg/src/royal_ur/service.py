"""Session-oriented HTTP API for playing a human against a loaded table.

The server owns the rules; clients only ever submit action IDs it
advertised. Sessions live in memory and are evicted after an idle
timeout. Requests for one session are serialized; the table is read-only.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .agents import QTable, greedy_action
from .env import UrEnv, encode_state
from .rules import MoveEvents, RulesConfig, Seat, path_square
from .storage import TableMeta

DEFAULT_SESSION_TTL = 3600.0


class CreateGameRequest(BaseModel):
    humanSeat: str = "P1"
    seed: int | None = None
    pieces: int | None = None
    dice: int | None = None
    rerollOnMax: bool | None = None


class MoveRequest(BaseModel):
    action: int


@dataclass
class MoveRecord:
    seat: Seat
    dice: int
    action: int
    events: MoveEvents


@dataclass
class Session:
    id: str
    env: UrEnv
    human_seat: Seat
    history: list[MoveRecord] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = field(default_factory=time.monotonic)


def _events_json(events: MoveEvents) -> dict:
    return {
        "capturedOpponent": events.captured_opponent,
        "landedWarRosette": events.landed_war_rosette,
        "landedWarNonrosette": events.landed_war_nonrosette,
        "borneOff": events.borne_off,
        "displacedByRosette": events.displaced_by_rosette,
        "gameWon": events.game_won,
    }


def _error(status: int, code: str, message: str, legal: list[int] | None = None) -> JSONResponse:
    body: dict = {"error": code, "message": message}
    if legal is not None:
        body["legalActions"] = legal
    return JSONResponse(status_code=status, content=body)


def create_app(
    table: QTable,
    meta: TableMeta,
    session_ttl: float = DEFAULT_SESSION_TTL,
) -> FastAPI:
    app = FastAPI(title="royal-ur game service")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def evict_idle() -> None:
        cutoff = time.monotonic() - session_ttl
        with registry_lock:
            stale = [sid for sid, s in sessions.items() if s.last_access < cutoff]
            for sid in stale:
                del sessions[sid]

    def get_session(sid: str) -> Session | None:
        evict_idle()
        with registry_lock:
            session = sessions.get(sid)
            if session is not None:
                session.last_access = time.monotonic()
            return session

    def state_view(session: Session) -> dict:
        env = session.env
        st = env.state
        board = []
        for seat in Seat:
            for idx in st.on_board[seat]:
                sq = path_square(seat, idx)
                board.append({"row": sq.row, "col": sq.col, "seat": seat.name})
        board.sort(key=lambda cell: (cell["row"], cell["col"]))
        win = env.winner
        return {
            "id": session.id,
            "toMove": st.to_move.name,
            "humanSeat": session.human_seat.name,
            "dice": st.dice,
            "legalActions": list(env.legal),
            "board": board,
            "hands": {"P1": st.in_hand[0], "P2": st.in_hand[1]},
            "borneOff": {"P1": st.borne_off[0], "P2": st.borne_off[1]},
            "winner": win.name if win is not None else None,
            "history": [
                {
                    "seat": rec.seat.name,
                    "dice": rec.dice,
                    "action": rec.action,
                    "events": _events_json(rec.events),
                }
                for rec in session.history
            ],
        }

    def play_agent_plies(session: Session) -> None:
        env = session.env
        agent_seat = session.human_seat.other
        while not env.done and env.state.to_move == agent_seat:
            dice = env.state.dice
            action = greedy_action(table, encode_state(env.state), env.legal)
            result = env.step(action)
            session.history.append(MoveRecord(agent_seat, dice, action, result.events))

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        return _error(400, "invalid_request", str(exc))

    @app.get("/api/meta")
    def get_meta() -> dict:
        return {
            "algorithm": meta.algorithm,
            "alpha": meta.alpha,
            "gamma": meta.gamma,
            "epsilon": meta.epsilon,
            "pieces": meta.pieces_per_player,
            "dice": meta.dice_count,
            "rerollOnMax": meta.reroll_on_max,
            "seed": meta.seed,
            "episodes": meta.episodes,
            "seat": meta.seat,
            "entries": len(table),
        }

    @app.post("/api/games")
    def create_game(options: CreateGameRequest):
        if options.humanSeat not in ("P1", "P2"):
            return _error(400, "invalid_request", f"humanSeat must be P1 or P2, got {options.humanSeat!r}")
        try:
            rules = RulesConfig(
                pieces_per_player=options.pieces if options.pieces is not None else meta.pieces_per_player,
                dice_count=options.dice if options.dice is not None else meta.dice_count,
                reroll_on_max=options.rerollOnMax if options.rerollOnMax is not None else meta.reroll_on_max,
            )
        except ValueError as exc:
            return _error(400, "invalid_request", str(exc))
        human = Seat[options.humanSeat]
        env = UrEnv(rules, seed=options.seed)
        env.reset()
        session = Session(id=uuid.uuid4().hex, env=env, human_seat=human)
        with session.lock:
            play_agent_plies(session)
            view = state_view(session)
        with registry_lock:
            sessions[session.id] = session
        evict_idle()
        return view

    @app.get("/api/games/{sid}")
    def get_game(sid: str):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid!r}")
        with session.lock:
            return state_view(session)

    @app.post("/api/games/{sid}/moves")
    def submit_move(sid: str, move: MoveRequest):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid!r}")
        with session.lock:
            env = session.env
            if env.done:
                return _error(400, "game_over", "the game is finished", [])
            if env.state.to_move != session.human_seat:
                return _error(400, "not_your_turn", "waiting on the agent")
            legal = list(env.legal)
            if move.action not in legal:
                return _error(
                    400,
                    "illegal_action",
                    f"action {move.action} is not currently legal",
                    legal,
                )
            dice = env.state.dice
            result = env.step(move.action)
            session.history.append(
                MoveRecord(session.human_seat, dice, move.action, result.events)
            )
            play_agent_plies(session)
            return state_view(session)

    return app
