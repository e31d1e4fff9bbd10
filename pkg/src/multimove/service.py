"""Local engine service for the browser UI.

A small JSON request/response protocol over localhost HTTP: the client POSTs
one message object to /api and gets one reply.  All board payloads are XFen,
all moves long-algebraic MoveText; rules live exclusively server-side.  The
message schema (protocol version 1) is documented in docs/protocol.md and
mirrored by the PROTOCOL_SCHEMAS dict below for validation in tests.

Messages: new_game, get_state, submit_move, bot_turn, list_strategies,
replay_record.  No authentication: this is a localhost tool.
"""

from __future__ import annotations

import json
import os
import random
import threading
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Dict, List, Optional

from .board import BLACK, WHITE, Move, TurnConfig, initial_position, move_text
from .budget import Budget
from .game import GameRecord
from .notation import (ParseError, parse_move_token, parse_record,
                       serialize_record, serialize_xfen)
from .solver import PROVEN_WIN, solve_forced_win
from .strategies import (OffBookError, ScriptContext, results_table,
                         strategy_for)

PROTOCOL_VERSION = 1
DEFAULT_BOT_SECONDS = 5.0

_COLOR_NAMES = {WHITE: "white", BLACK: "black"}


class ServiceError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


@dataclass
class Session:
    sid: str
    record: GameRecord
    human_side: int
    bot_policy: str           # requested: lemma | solver | random
    bot_active: str           # policy actually in use
    bot_fallback: bool
    bot_note: str
    seed: int = 0
    # Human plies of the turn in progress; records only hold complete turns.
    pending: List[Move] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    ctx: ScriptContext = field(default_factory=ScriptContext)

    def effective_position(self):
        pos = self.record.final_position()
        for mv in self.pending:
            pos.make(mv.packed())
        return pos

    def state_payload(self) -> dict:
        pos = self.effective_position()
        winner = pos.winner
        return {
            "session": self.sid,
            "xfen": serialize_xfen(pos),
            "side_to_move": _COLOR_NAMES[pos.side_to_move],
            "moves_remaining": pos.moves_remaining,
            "legal_moves": [move_text(m) for m in pos.gen_moves_sorted()],
            "winner": None if winner is None else _COLOR_NAMES[winner],
            "status": "active" if winner is None else "won",
            "human_side": _COLOR_NAMES[self.human_side],
            "history": serialize_record(self.record),
            "pending": [m.text for m in self.pending],
            "bot": {"requested": self.bot_policy, "active": self.bot_active,
                    "fallback": self.bot_fallback, "note": self.bot_note},
        }


class EngineService:
    """Transport-independent message handler (unit tests drive it directly)."""

    def __init__(self, bot_seconds: float = DEFAULT_BOT_SECONDS):
        self.sessions: Dict[str, Session] = {}
        self._lock = threading.Lock()
        self.bot_seconds = bot_seconds

    # -- message dispatch ---------------------------------------------------

    def handle(self, message: dict) -> dict:
        try:
            if not isinstance(message, dict) or "type" not in message:
                raise ServiceError("bad-message", "message needs a 'type' field")
            mtype = message["type"]
            handler = {
                "new_game": self._new_game,
                "get_state": self._get_state,
                "submit_move": self._submit_move,
                "bot_turn": self._bot_turn,
                "list_strategies": self._list_strategies,
                "replay_record": self._replay_record,
            }.get(mtype)
            if handler is None:
                raise ServiceError("bad-message", f"unknown message type {mtype!r}")
            payload = handler(message)
            payload.update({"ok": True, "protocol": PROTOCOL_VERSION, "type": mtype})
            return payload
        except ServiceError as exc:
            return {"ok": False, "protocol": PROTOCOL_VERSION,
                    "error": {"code": exc.code, "message": exc.message}}

    def _session(self, message: dict) -> Session:
        sid = message.get("session")
        with self._lock:
            session = self.sessions.get(sid)
        if session is None:
            raise ServiceError("not-found", f"unknown session {sid!r}")
        return session

    # -- handlers --------------------------------------------------------------

    def _new_game(self, message: dict) -> dict:
        try:
            wi = int(message["white_per_turn"])
            bj = int(message["black_per_turn"])
            config = TurnConfig(wi, bj)
        except (KeyError, TypeError, ValueError) as exc:
            raise ServiceError("invalid-config", f"bad turn config: {exc}") from None
        human = message.get("human_side", "white")
        if human not in ("white", "black"):
            raise ServiceError("invalid-config", f"bad human_side {human!r}")
        human_side = WHITE if human == "white" else BLACK
        policy = message.get("bot_policy", "lemma")
        if policy not in ("lemma", "solver", "random"):
            raise ServiceError("invalid-config", f"bad bot_policy {policy!r}")

        active, fallback, note = policy, False, ""
        if policy == "lemma":
            script = strategy_for(config)
            if script is None:
                active, fallback = "random", True
                note = (f"({wi},{bj}) is an open cell: no scripted strategy "
                        "exists; the bot plays random legal moves")
            elif script.side == human_side:
                active, fallback = "random", True
                note = (f"the scripted strategy for ({wi},{bj}) plays "
                        f"{_COLOR_NAMES[script.side]}, which you chose; the "
                        "bot plays random legal moves")
            else:
                active = script.id
        sid = uuid.uuid4().hex[:12]
        session = Session(sid=sid, record=GameRecord(initial_position(config)),
                          human_side=human_side, bot_policy=policy,
                          bot_active=active, bot_fallback=fallback,
                          bot_note=note, seed=int(message.get("seed", 0)))
        with self._lock:
            self.sessions[sid] = session
        return {"state": session.state_payload()}

    def _get_state(self, message: dict) -> dict:
        session = self._session(message)
        with session.lock:
            return {"state": session.state_payload()}

    def _submit_move(self, message: dict) -> dict:
        session = self._session(message)
        token = message.get("move", "")
        with session.lock:
            pos = session.effective_position()
            if pos.winner is not None:
                raise ServiceError("game-over", "the game is already decided")
            if pos.side_to_move != session.human_side:
                raise ServiceError("off-turn", "it is not your turn")
            try:
                mv = parse_move_token(str(token), pos)
            except ParseError as exc:
                raise ServiceError("bad-move", exc.reason) from None
            reason = pos.illegal_reason(mv.packed())
            if reason is not None:
                raise ServiceError("illegal-move", reason)
            pos.make(mv.packed())
            session.pending.append(mv)
            if pos.winner is not None or pos.side_to_move != session.human_side:
                session.record.push_turn(session.human_side, session.pending)
                session.pending = []
            payload = {"state": session.state_payload()}
            if pos.winner is not None:
                payload["event"] = "king-captured"
            return payload

    def _bot_turn(self, message: dict) -> dict:
        session = self._session(message)
        with session.lock:
            record = session.record
            if session.pending:
                raise ServiceError("off-turn", "finish your turn first")
            pos = record.current_position
            if pos.winner is not None:
                raise ServiceError("game-over", "the game is already decided")
            bot_side = session.human_side ^ 1
            if pos.side_to_move != bot_side:
                raise ServiceError("off-turn", "it is not the bot's turn")
            moves, used, fallback, note = self._bot_moves(session, bot_side)
            if not moves:
                raise ServiceError("frozen", "neither side can move")
            record.push_turn(bot_side, moves)
            payload = {"moves": [m.text for m in moves],
                       "policy_used": used, "fallback": fallback,
                       "note": note, "state": session.state_payload()}
            if record.current_position.winner is not None:
                payload["event"] = "king-captured"
            return payload

    def _bot_moves(self, session: Session, bot_side: int):
        record = session.record
        if session.bot_policy == "lemma" and not session.bot_fallback:
            script = strategy_for(record.config)
            try:
                return (script.decide(record, session.ctx), script.id, False,
                        session.bot_note)
            except OffBookError as exc:
                note = f"scripted strategy off book ({exc.reason}); random fallback"
                return (self._random_turn(session), "random", True, note)
        if session.bot_policy == "solver":
            pos = record.final_position()
            res = solve_forced_win(None, pos, bot_side, 2,
                                   budget=Budget(max_seconds=self.bot_seconds))
            if res.status == PROVEN_WIN and res.strategy_tree.turn:
                return (list(res.strategy_tree.turn), "solver", False,
                        f"forced win proven within {res.depth_bound} turns")
            note = (f"solver result {res.status} within {self.bot_seconds}s "
                    "cap; random fallback")
            return (self._random_turn(session), "random", True, note)
        return (self._random_turn(session), "random", session.bot_fallback,
                session.bot_note or "random policy")

    def _random_turn(self, session: Session) -> List[Move]:
        rng = random.Random(session.seed * 1000003 + len(session.record.turns))
        work = session.record.final_position()
        color = work.side_to_move
        out: List[Move] = []
        while work.winner is None and work.side_to_move == color:
            moves = work.gen_moves_sorted()
            if not moves:
                break
            m = rng.choice(moves)
            out.append(Move.from_packed(m))
            work.make(m)
        return out

    def _list_strategies(self, _message: dict) -> dict:
        return {"table": results_table()}

    def _replay_record(self, message: dict) -> dict:
        text = message.get("record", "")
        try:
            record = parse_record(str(text))
        except ParseError as exc:
            raise ServiceError("bad-record", str(exc)) from None
        steps = []
        positions = [record.initial.copy()]
        pos = record.initial.copy()
        for color, moves in record.turns:
            for mv in moves:
                pos.make(mv.packed())
                steps.append({"side": _COLOR_NAMES[color], "move": mv.text,
                              "xfen": serialize_xfen(pos)})
        winner = pos.winner
        return {"initial_xfen": serialize_xfen(record.initial),
                "steps": steps,
                "winner": None if winner is None else _COLOR_NAMES[winner]}


# ---------------------------------------------------------------------------
# HTTP plumbing


def make_handler(service: EngineService, ui_dir: Optional[str]):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send_json(self, payload: dict, status: int = 200) -> None:
            body = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "POST, GET, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()

        def do_POST(self):
            if self.path.rstrip("/") != "/api":
                self._send_json({"ok": False, "protocol": PROTOCOL_VERSION,
                                 "error": {"code": "not-found",
                                           "message": "POST /api only"}}, 404)
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                message = json.loads(self.rfile.read(length) or b"{}")
            except (ValueError, json.JSONDecodeError):
                self._send_json({"ok": False, "protocol": PROTOCOL_VERSION,
                                 "error": {"code": "bad-json",
                                           "message": "request body is not JSON"}},
                                400)
                return
            self._send_json(service.handle(message))

        def do_GET(self):
            if self.path == "/api/health":
                self._send_json({"ok": True, "protocol": PROTOCOL_VERSION,
                                 "type": "health"})
                return
            if ui_dir:
                self._serve_static()
                return
            self._send_json({"ok": False, "protocol": PROTOCOL_VERSION,
                             "error": {"code": "not-found",
                                       "message": "no UI directory configured"}},
                            404)

        def _serve_static(self):
            rel = self.path.lstrip("/") or "index.html"
            rel = os.path.normpath(rel)
            if rel.startswith(".."):
                self.send_error(403)
                return
            path = os.path.join(ui_dir, rel)
            if os.path.isdir(path):
                path = os.path.join(path, "index.html")
            if not os.path.isfile(path):
                self.send_error(404)
                return
            ctype = {"html": "text/html", "js": "text/javascript",
                     "css": "text/css", "json": "application/json",
                     "svg": "image/svg+xml"}.get(path.rsplit(".", 1)[-1],
                                                 "application/octet-stream")
            with open(path, "rb") as fh:
                body = fh.read()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def run_server(host: str = "127.0.0.1", port: int = 8642,
               ui_dir: Optional[str] = None,
               bot_seconds: float = DEFAULT_BOT_SECONDS) -> None:
    service = EngineService(bot_seconds=bot_seconds)
    server = ThreadingHTTPServer((host, port), make_handler(service, ui_dir))
    where = f"http://{host}:{port}/"
    print(f"multimove engine service on {where}"
          + (f" (UI from {ui_dir})" if ui_dir else " (API only)"))
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("\nshutting down")
    finally:
        server.server_close()


# ---------------------------------------------------------------------------
# Response schemas (JSON Schema fragments; used by tests and documented in
# docs/protocol.md)

_STATE_SCHEMA = {
    "type": "object",
    "required": ["session", "xfen", "side_to_move", "moves_remaining",
                 "legal_moves", "winner", "status", "human_side", "history",
                 "pending", "bot"],
    "properties": {
        "session": {"type": "string"},
        "xfen": {"type": "string"},
        "side_to_move": {"enum": ["white", "black"]},
        "moves_remaining": {"type": "integer", "minimum": 0},
        "legal_moves": {"type": "array", "items": {"type": "string"}},
        "winner": {"enum": ["white", "black", None]},
        "status": {"enum": ["active", "won"]},
        "human_side": {"enum": ["white", "black"]},
        "history": {"type": "string"},
        "pending": {"type": "array", "items": {"type": "string"}},
        "bot": {
            "type": "object",
            "required": ["requested", "active", "fallback", "note"],
            "properties": {"requested": {"type": "string"},
                           "active": {"type": "string"},
                           "fallback": {"type": "boolean"},
                           "note": {"type": "string"}},
        },
    },
}

_BASE_OK = {"ok": {"const": True}, "protocol": {"const": PROTOCOL_VERSION},
            "type": {"type": "string"}}

PROTOCOL_SCHEMAS = {
    "error": {
        "type": "object",
        "required": ["ok", "protocol", "error"],
        "properties": {
            "ok": {"const": False},
            "protocol": {"const": PROTOCOL_VERSION},
            "error": {"type": "object", "required": ["code", "message"],
                      "properties": {"code": {"type": "string"},
                                     "message": {"type": "string"}}},
        },
    },
    "new_game": {
        "type": "object", "required": ["ok", "protocol", "type", "state"],
        "properties": {**_BASE_OK, "state": _STATE_SCHEMA},
    },
    "get_state": {
        "type": "object", "required": ["ok", "protocol", "type", "state"],
        "properties": {**_BASE_OK, "state": _STATE_SCHEMA},
    },
    "submit_move": {
        "type": "object", "required": ["ok", "protocol", "type", "state"],
        "properties": {**_BASE_OK, "state": _STATE_SCHEMA,
                       "event": {"const": "king-captured"}},
    },
    "bot_turn": {
        "type": "object",
        "required": ["ok", "protocol", "type", "state", "moves",
                     "policy_used", "fallback", "note"],
        "properties": {**_BASE_OK, "state": _STATE_SCHEMA,
                       "moves": {"type": "array", "items": {"type": "string"}},
                       "policy_used": {"type": "string"},
                       "fallback": {"type": "boolean"},
                       "note": {"type": "string"},
                       "event": {"const": "king-captured"}},
    },
    "list_strategies": {
        "type": "object", "required": ["ok", "protocol", "type", "table"],
        "properties": {**_BASE_OK, "table": {
            "type": "array", "minItems": 25, "maxItems": 25,
            "items": {"type": "object",
                      "required": ["white_per_turn", "black_per_turn",
                                   "winner", "strategy"],
                      "properties": {"white_per_turn": {"type": "string"},
                                     "black_per_turn": {"type": "string"},
                                     "winner": {"enum": ["white", "black", None]},
                                     "strategy": {"type": ["string", "null"]}}},
        }},
    },
    "replay_record": {
        "type": "object",
        "required": ["ok", "protocol", "type", "initial_xfen", "steps",
                     "winner"],
        "properties": {**_BASE_OK, "initial_xfen": {"type": "string"},
                       "winner": {"enum": ["white", "black", None]},
                       "steps": {"type": "array", "items": {
                           "type": "object",
                           "required": ["side", "move", "xfen"],
                           "properties": {"side": {"enum": ["white", "black"]},
                                          "move": {"type": "string"},
                                          "xfen": {"type": "string"}}}}},
    },
}
