"""Full-turn enumeration with within-turn transposition pruning.

A turn is every way the side to move can spend its allowance (cut short by a
win or forfeit).  Outcomes are deduplicated by resulting state: move orders
that commute collapse to one entry, keyed by the first sequence in canonical
order.  The raw (order-sensitive) sequence count is recovered exactly by
dynamic programming over the pruned graph.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .board import Position, WHITE, Z_EP, Z_MR, Z_SIDE
from .budget import Budget


class TurnOutcomes:
    __slots__ = ("outcomes", "raw_sequences")

    def __init__(self, outcomes, raw_sequences):
        self.outcomes: List[Tuple[Tuple[int, ...], Position]] = outcomes
        self.raw_sequences: int = raw_sequences


def skipped_turn(pos: Position) -> Optional[Position]:
    """The position after a stuck side forfeits its whole turn, or None if
    the opponent is stuck too (frozen game)."""
    other = pos.side_to_move ^ 1
    out = pos.copy()
    out.side_to_move = other
    out.moves_remaining = pos.config.allowance(other)
    out.zkey ^= Z_SIDE ^ Z_MR[pos.moves_remaining] ^ Z_MR[out.moves_remaining]
    if out.ep_target != -1 and pos.config.ep_rule == "loose":
        pusher = WHITE if (out.ep_target >> 3) == 2 else 1
        if other == pusher:
            out.zkey ^= Z_EP[out.ep_target]
            out.ep_target = -1
    if not out.has_any_move():
        return None
    return out


def turn_outcomes(pos: Position, budget: Optional[Budget] = None) -> TurnOutcomes:
    """All distinct results of the side-to-move's full turn, canonical order.

    Each outcome is (move sequence, resulting position).  Raises on terminal
    input.  An empty outcome list means the game is frozen (neither side can
    move).
    """
    if pos.winner is not None:
        raise ValueError("terminal position")
    color = pos.side_to_move
    if not pos.has_any_move():
        skipped = skipped_turn(pos)
        return TurnOutcomes([((), skipped)] if skipped else [], 1 if skipped else 0)

    outcomes: List[Tuple[Tuple[int, ...], Position]] = []
    seen_final: set = set()
    memo_raw: Dict[int, int] = {}
    work = pos.copy()
    seq: List[int] = []

    def rec() -> int:
        if work.winner is not None or work.side_to_move != color:
            z = work.zkey
            if z not in seen_final:
                seen_final.add(z)
                outcomes.append((tuple(seq), work.copy()))
            return 1
        z = work.zkey
        cached = memo_raw.get(z)
        if cached is not None:
            return cached
        if budget is not None:
            budget.charge()
        moves = work.gen_moves_sorted()
        if not moves:
            # Frozen: neither side can move (make() already tried passing).
            if z not in seen_final:
                seen_final.add(z)
                outcomes.append((tuple(seq), work.copy()))
            return 1
        total = 0
        for m in moves:
            tok = work.make(m)
            seq.append(m)
            total += rec()
            seq.pop()
            work.unmake(tok)
        memo_raw[z] = total
        return total

    raw = rec()
    return TurnOutcomes(outcomes, raw)
