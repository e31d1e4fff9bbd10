"""Game records: replayable transcripts of multimove games.

A record is the initial position plus an ordered list of turns, each turn a
(color, move sequence) pair.  Replaying the turns must reproduce a legal
game; a turn may be shorter than the side's allowance only because the game
ended (king captured) or the rest of the turn was forfeited for lack of
legal moves.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .board import Move, Position, TurnConfig, move_text


class RecordError(ValueError):
    """Replay failure; carries the offending turn index."""

    def __init__(self, turn_index: int, message: str):
        self.turn_index = turn_index
        super().__init__(f"turn {turn_index}: {message}")


class GameRecord:
    """Transcript with an incrementally maintained current position.

    push_turn/pop_turn are cheap (make/unmake underneath), which lets the
    verifier walk game trees on a single record instance.
    """

    __slots__ = ("config", "initial", "turns", "_cur", "_tokens")

    def __init__(self, initial: Position):
        self.config: TurnConfig = initial.config
        self.initial = initial.copy()
        self.turns: List[Tuple[int, Tuple[Move, ...]]] = []
        self._cur = initial.copy()
        self._tokens: List[list] = []

    # -- read access ---------------------------------------------------------

    @property
    def current_position(self) -> Position:
        """The position after all recorded turns.  Treat as read-only; use
        final_position() for a private copy."""
        return self._cur

    def final_position(self) -> Position:
        return self._cur.copy()

    def turn_count(self, color: Optional[int] = None) -> int:
        if color is None:
            return len(self.turns)
        return sum(1 for c, _ in self.turns if c == color)

    def copy(self) -> "GameRecord":
        rec = GameRecord(self.initial)
        for color, moves in self.turns:
            rec.push_turn(color, moves)
        return rec

    # -- mutation -------------------------------------------------------------

    def push_turn(self, color: int, moves: Sequence[Move]) -> None:
        """Append one full turn, validating legality move by move."""
        idx = len(self.turns)
        pos = self._cur
        if pos.winner is not None:
            raise RecordError(idx, "turn after a terminal position")
        if pos.side_to_move != color:
            raise RecordError(idx, f"{'WB'[color]} to play out of turn")
        if not moves:
            raise RecordError(idx, "empty turn")
        allowance = pos.config.allowance(color)
        tokens = []
        ended = False
        try:
            for k, mv in enumerate(moves):
                if ended:
                    raise RecordError(idx, f"move {k} after the turn ended")
                m = _packed_checked(pos, mv, idx, k)
                tokens.append(pos.make(m))
                # A turn is over on a win, on passing the move, or on a
                # skip-back (opponent stuck, allowance freshly reset).
                ended = (pos.winner is not None or pos.side_to_move != color
                         or pos.moves_remaining == allowance)
            if not ended:
                raise RecordError(idx, "incomplete turn")
        except RecordError:
            for tok in reversed(tokens):
                pos.unmake(tok)
            raise
        self.turns.append((color, tuple(moves)))
        self._tokens.append(tokens)

    def push_turn_trusted(self, color: int, packed: Sequence[int]) -> None:
        """Fast append of a generator-produced turn (no legality re-check)."""
        pos = self._cur
        tokens = [pos.make(m) for m in packed]
        self.turns.append((color, tuple(Move.from_packed(m) for m in packed)))
        self._tokens.append(tokens)

    def pop_turn(self) -> Tuple[int, Tuple[Move, ...]]:
        color, moves = self.turns.pop()
        for tok in reversed(self._tokens.pop()):
            self._cur.unmake(tok)
        return color, moves

    # -- helpers ----------------------------------------------------------------

    def replay_positions(self) -> List[Position]:
        """Positions before each turn plus the final one."""
        pos = self.initial.copy()
        out = [pos.copy()]
        for idx, (color, moves) in enumerate(self.turns):
            for k, mv in enumerate(moves):
                pos.make(_packed_checked(pos, mv, idx, k))
            out.append(pos.copy())
        return out

    def __repr__(self) -> str:
        return f"<GameRecord {len(self.turns)} turns, {self._cur!r}>"


def _packed_checked(pos: Position, mv: Move, turn_idx: int, move_idx: int) -> int:
    from .board import _resolve_packed
    m = _resolve_packed(pos, mv)
    reason = pos.illegal_reason(m)
    if reason is not None:
        raise RecordError(turn_idx,
                          f"move {move_idx} ({move_text(m)}) illegal: {reason}")
    return m


def record_from_turns(initial: Position,
                      turns: Sequence[Tuple[int, Sequence[Move]]]) -> GameRecord:
    rec = GameRecord(initial)
    for color, moves in turns:
        rec.push_turn(color, moves)
    return rec
