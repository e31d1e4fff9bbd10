"""Parsing and serialization: extended FEN, long-algebraic moves, records.

Extended FEN (XFen) is standard FEN plus three trailing fields:

    <board> <side> <castling> <ep> <halfmove> <fullmove> <moves-left> <white-per-turn> <black-per-turn>

Field 7 is the mover's remaining moves in the current turn, fields 8/9 the
per-turn allowances.  Fields 5 and 6 (halfmove clock, fullmove number) are
carried for standard-FEN tool compatibility but are semantically inert: the
core has no draw rules.  A tenth literal token ``ep-loose`` selects the loose
en-passant freshness rule (absent means strict).

Move text is long algebraic: ``<from><to>[promotion letter]``; castling is the
two-square king move (``e1g1`` etc.).

The record format is line oriented:

    multimove-record v1
    xfen: <initial position>
    W: b1a3 a3b5
    B: d7d5

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

from typing import List, Tuple

from .board import (BLACK, CR_BK, CR_BQ, CR_WK, CR_WQ, WHITE,
                    LETTER_KINDS, Move, Piece, Position, RulesError, Square,
                    TurnConfig, code_color, code_kind, KIND_LETTERS,
                    MAX_MOVES_PER_TURN, SQUARE_NAMES, _resolve_packed)
from .game import GameRecord, RecordError

RECORD_MAGIC = "multimove-record v1"

_PIECE_CHARS = {"P": (WHITE, 1), "N": (WHITE, 2), "B": (WHITE, 3),
                "R": (WHITE, 4), "Q": (WHITE, 5), "K": (WHITE, 6),
                "p": (BLACK, 1), "n": (BLACK, 2), "b": (BLACK, 3),
                "r": (BLACK, 4), "q": (BLACK, 5), "k": (BLACK, 6)}


class ParseError(ValueError):
    """Parse failure with the byte offset of the offending token."""

    def __init__(self, offset: int, reason: str):
        self.offset = offset
        self.reason = reason
        super().__init__(f"offset {offset}: {reason}")


# ---------------------------------------------------------------------------
# XFen


def serialize_xfen(position: Position) -> str:
    rows = []
    for r in range(7, -1, -1):
        row = ""
        run = 0
        for f in range(8):
            code = position.piece_at[r * 8 + f]
            if not code:
                run += 1
                continue
            if run:
                row += str(run)
                run = 0
            ch = KIND_LETTERS[code_kind(code)]
            row += ch.upper() if code_color(code) == WHITE else ch
        if run:
            row += str(run)
        rows.append(row)
    board = "/".join(rows)
    side = "w" if position.side_to_move == WHITE else "b"
    castle = ""
    for bit, ch in ((CR_WK, "K"), (CR_WQ, "Q"), (CR_BK, "k"), (CR_BQ, "q")):
        if position.castling & bit:
            castle += ch
    castle = castle or "-"
    ep = SQUARE_NAMES[position.ep_target] if position.ep_target != -1 else "-"
    cfg = position.config
    text = (f"{board} {side} {castle} {ep} 0 1 {position.moves_remaining} "
            f"{cfg.white_moves_per_turn} {cfg.black_moves_per_turn}")
    if cfg.ep_rule == "loose":
        text += " ep-loose"
    return text


def _fields_with_offsets(text: str) -> List[Tuple[int, str]]:
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        out.append((i, text[i:j]))
        i = j
    return out


def parse_xfen(text: str) -> Position:
    """Parse XFen text into a validated Position.

    Raises ParseError (with byte offset) on malformed input; never crashes on
    arbitrary strings.
    """
    if not isinstance(text, str):
        raise ParseError(0, "not a string")
    fields = _fields_with_offsets(text)
    if len(fields) < 9:
        raise ParseError(len(text), f"expected 9+ fields, got {len(fields)}")
    if len(fields) > 10:
        raise ParseError(fields[10][0], "trailing data after fields")
    ep_rule = "strict"
    if len(fields) == 10:
        off, tok = fields[9]
        if tok != "ep-loose":
            raise ParseError(off, f"unknown variant token {tok!r}")
        ep_rule = "loose"

    ints = []
    for idx in (4, 5, 6, 7, 8):
        off, tok = fields[idx]
        if not tok.isdigit():
            raise ParseError(off, f"field {idx + 1} must be a non-negative integer")
        ints.append(int(tok))
    _half, _full, moves_left, per_white, per_black = ints
    off_w = fields[7][0]
    if not (1 <= per_white <= MAX_MOVES_PER_TURN):
        raise ParseError(off_w, f"white per-turn allowance out of range: {per_white}")
    if not (1 <= per_black <= MAX_MOVES_PER_TURN):
        raise ParseError(fields[8][0], f"black per-turn allowance out of range: {per_black}")
    config = TurnConfig(per_white, per_black, ep_rule)

    board_off, board = fields[0]
    rows = board.split("/")
    if len(rows) != 8:
        raise ParseError(board_off, f"board needs 8 ranks, got {len(rows)}")
    pieces = {}
    cursor = board_off
    for ri, row in enumerate(rows):
        rank = 7 - ri
        file = 0
        for ch in row:
            if ch.isdigit():
                if ch == "0":
                    raise ParseError(cursor, "zero-length run in board")
                file += int(ch)
            elif ch in _PIECE_CHARS:
                if file > 7:
                    raise ParseError(cursor, f"rank {rank + 1} overflows")
                color, kind = _PIECE_CHARS[ch]
                pieces[Square(file, rank)] = Piece(color, kind)
                file += 1
            else:
                raise ParseError(cursor, f"bad board character {ch!r}")
            cursor += 1
        if file != 8:
            raise ParseError(cursor, f"rank {rank + 1} has {file} files")
        cursor += 1  # the slash

    side_off, side_tok = fields[1]
    if side_tok == "w":
        side = WHITE
    elif side_tok == "b":
        side = BLACK
    else:
        raise ParseError(side_off, f"side must be w or b, got {side_tok!r}")

    castle_off, castle_tok = fields[2]
    castling = 0
    if castle_tok != "-":
        for ch in castle_tok:
            bit = {"K": CR_WK, "Q": CR_WQ, "k": CR_BK, "q": CR_BQ}.get(ch)
            if bit is None or castling & bit:
                raise ParseError(castle_off, f"bad castling field {castle_tok!r}")
            castling |= bit

    ep_off, ep_tok = fields[3]
    ep_sq = None
    if ep_tok != "-":
        try:
            ep_sq = Square.from_name(ep_tok)
        except ValueError:
            raise ParseError(ep_off, f"bad en-passant square {ep_tok!r}") from None

    try:
        pos = Position.from_pieces(pieces, side, moves_left, config,
                                   castling=castling, ep_target=ep_sq)
    except (RulesError, ValueError) as exc:
        raise ParseError(board_off, str(exc)) from None
    return pos


# ---------------------------------------------------------------------------
# Moves


def parse_move_token(token: str, position: Position) -> Move:
    """Resolve one long-algebraic token against a position."""
    t = token.strip()
    if not (4 <= len(t) <= 5):
        raise ParseError(0, f"bad move token {t!r}")
    try:
        frm = Square.from_name(t[0:2])
        to = Square.from_name(t[2:4])
    except ValueError:
        raise ParseError(0, f"bad move token {t!r}") from None
    promo = None
    if len(t) == 5:
        promo = LETTER_KINDS.get(t[4])
        if promo is None or promo in (1, 6):
            raise ParseError(4, f"bad promotion letter {t[4]!r}")
    if frm == to:
        raise ParseError(0, f"null move {t!r}")
    mv = Move(frm, to, promo)
    packed = _resolve_packed(position, mv)
    return Move.from_packed(packed)


def parse_moves(text: str, position: Position) -> List[Move]:
    """Parse a whitespace-separated move sequence, validating each token
    against the evolving position.  Illegal token k is reported as k."""
    pos = position.copy()
    out = []
    for k, token in enumerate(text.split()):
        try:
            mv = parse_move_token(token, pos)
        except ParseError as exc:
            raise ParseError(k, f"token {k} ({token!r}): {exc.reason}") from None
        reason = pos.illegal_reason(mv.packed())
        if reason is not None:
            raise ParseError(k, f"token {k} ({token!r}) illegal: {reason}")
        pos.make(mv.packed())
        out.append(mv)
    return out


# ---------------------------------------------------------------------------
# Records


def serialize_record(record: GameRecord) -> str:
    lines = [RECORD_MAGIC, f"xfen: {serialize_xfen(record.initial)}"]
    for color, moves in record.turns:
        tag = "W" if color == WHITE else "B"
        lines.append(f"{tag}: " + " ".join(mv.text for mv in moves))
    return "\n".join(lines) + "\n"


def parse_record(text: str) -> GameRecord:
    """Parse and replay a record; replay failure at turn t is reported with t."""
    if not isinstance(text, str):
        raise ParseError(0, "not a string")
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != RECORD_MAGIC:
        raise ParseError(0, f"missing header {RECORD_MAGIC!r}")
    if len(lines) < 2 or not lines[1].startswith("xfen:"):
        raise ParseError(0, "missing xfen: line")
    initial = parse_xfen(lines[1][len("xfen:"):].strip())
    record = GameRecord(initial)
    for t, line in enumerate(lines[2:]):
        if ":" not in line:
            raise ParseError(t, f"turn {t}: missing ':'")
        tag, _, rest = line.partition(":")
        tag = tag.strip()
        if tag not in ("W", "B"):
            raise ParseError(t, f"turn {t}: bad side tag {tag!r}")
        color = WHITE if tag == "W" else BLACK
        try:
            moves = parse_moves(rest, record.current_position)
        except ParseError as exc:
            raise ParseError(t, f"turn {t}: {exc.reason}") from None
        try:
            record.push_turn(color, moves)
        except RecordError as exc:
            raise ParseError(t, f"turn {t}: {exc}") from None
    return record
