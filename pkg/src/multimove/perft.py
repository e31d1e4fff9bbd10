"""Ply-counting enumeration for move-generator auditing.

Counts single plies (not turns) under variant semantics, so results stay
comparable across (i,j) pairs; terminal positions contribute no subtree.
Note the counts diverge from published standard-chess perft tables as soon
as check rules would bite (ply 4 onward from the start).
"""

from __future__ import annotations

from typing import Dict

from .board import Position, move_text


def perft(pos: Position, depth: int) -> int:
    if depth == 0:
        return 1
    moves = pos.gen_moves()
    if depth == 1:
        return len(moves)
    total = 0
    for m in moves:
        tok = pos.make(m)
        total += perft(pos, depth - 1)
        pos.unmake(tok)
    return total


def perft_divide(pos: Position, depth: int) -> Dict[str, int]:
    """Per-root-move subtree counts (canonical order)."""
    out: Dict[str, int] = {}
    for m in pos.gen_moves_sorted():
        tok = pos.make(m)
        out[move_text(m)] = perft(pos, depth - 1) if depth > 1 else 1
        pos.unmake(tok)
    return out
