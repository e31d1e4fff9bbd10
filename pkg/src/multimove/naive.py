"""Independent reference move generator.

A deliberately plain mailbox implementation kept free of the bitboard
machinery in board.py so the two generators can cross-check each other.
Everything here walks the 8x8 array with direction vectors.
"""

from __future__ import annotations

from typing import Set

from .board import (BLACK, WHITE, KING, KNIGHT, PAWN, BISHOP, ROOK, QUEEN,
                    MK_CAPTURE, MK_CASTLE_K, MK_CASTLE_Q, MK_DOUBLE, MK_EP,
                    MK_QUIET, CR_WK, CR_WQ, CR_BK, CR_BQ,
                    Position, code_color, code_kind, pack_move)

_KNIGHT_STEPS = ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))
_KING_STEPS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
_ROOK_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))
_BISHOP_DIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_PROMOS = (KNIGHT, BISHOP, ROOK, QUEEN)


def naive_moves(pos: Position) -> Set[int]:
    """All legal moves for the side to move, as a set of packed ints."""
    if pos.winner is not None:
        return set()
    side = pos.side_to_move
    board = pos.piece_at
    out: Set[int] = set()

    def color_at(sq):
        c = board[sq]
        return None if not c else code_color(c)

    for sq in range(64):
        code = board[sq]
        if not code or code_color(code) != side:
            continue
        kind = code_kind(code)
        r, f = divmod(sq, 8)

        if kind == PAWN:
            fwd = 1 if side == WHITE else -1
            home = 1 if side == WHITE else 6
            last = 7 if side == WHITE else 0
            one = sq + 8 * fwd
            if board[one] == 0:
                if (one >> 3) == last:
                    for pk in _PROMOS:
                        out.add(pack_move(sq, one, pk))
                else:
                    out.add(pack_move(sq, one))
                two = sq + 16 * fwd
                if r == home and board[two] == 0:
                    out.add(pack_move(sq, two, 0, MK_DOUBLE))
            for df in (-1, 1):
                nf = f + df
                if not 0 <= nf <= 7:
                    continue
                t = (r + fwd) * 8 + nf
                if color_at(t) == (side ^ 1):
                    if (t >> 3) == last:
                        for pk in _PROMOS:
                            out.add(pack_move(sq, t, pk, MK_CAPTURE))
                    else:
                        out.add(pack_move(sq, t, 0, MK_CAPTURE))
                elif t == pos.ep_target and board[t] == 0 and _ep_alive(pos):
                    out.add(pack_move(sq, t, 0, MK_EP))

        elif kind == KNIGHT:
            for dr, df in _KNIGHT_STEPS:
                nr, nf = r + dr, f + df
                if 0 <= nr <= 7 and 0 <= nf <= 7:
                    t = nr * 8 + nf
                    tc = color_at(t)
                    if tc != side:
                        out.add(pack_move(sq, t, 0,
                                          MK_QUIET if tc is None else MK_CAPTURE))

        elif kind == KING:
            for dr, df in _KING_STEPS:
                nr, nf = r + dr, f + df
                if 0 <= nr <= 7 and 0 <= nf <= 7:
                    t = nr * 8 + nf
                    tc = color_at(t)
                    if tc != side:
                        out.add(pack_move(sq, t, 0,
                                          MK_QUIET if tc is None else MK_CAPTURE))

        else:
            dirs = _ROOK_DIRS if kind == ROOK else _BISHOP_DIRS if kind == BISHOP \
                else _ROOK_DIRS + _BISHOP_DIRS
            for dr, df in dirs:
                nr, nf = r + dr, f + df
                while 0 <= nr <= 7 and 0 <= nf <= 7:
                    t = nr * 8 + nf
                    tc = color_at(t)
                    if tc is None:
                        out.add(pack_move(sq, t))
                    else:
                        if tc != side:
                            out.add(pack_move(sq, t, 0, MK_CAPTURE))
                        break
                    nr, nf = nr + dr, nf + df

    # Castling: rights intact and the gap empty.  No attack conditions in
    # this variant.
    if side == WHITE:
        if pos.castling & CR_WK and board[5] == 0 and board[6] == 0:
            out.add(pack_move(4, 6, 0, MK_CASTLE_K))
        if pos.castling & CR_WQ and board[1] == 0 and board[2] == 0 and board[3] == 0:
            out.add(pack_move(4, 2, 0, MK_CASTLE_Q))
    else:
        if pos.castling & CR_BK and board[61] == 0 and board[62] == 0:
            out.add(pack_move(60, 62, 0, MK_CASTLE_K))
        if pos.castling & CR_BQ and board[57] == 0 and board[58] == 0 and board[59] == 0:
            out.add(pack_move(60, 58, 0, MK_CASTLE_Q))
    return out


def _ep_alive(pos: Position) -> bool:
    t = pos.ep_target
    if t == -1:
        return False
    rank = t >> 3
    pusher = WHITE if rank == 2 else BLACK
    if pos.side_to_move == pusher:
        return False
    behind = t + 8 if rank == 2 else t - 8
    code = pos.piece_at[behind]
    return bool(code) and code_kind(code) == PAWN and code_color(code) == pusher


def naive_perft(pos: Position, depth: int) -> int:
    """Ply-counting oracle on the naive generator (variant semantics)."""
    if depth == 0:
        return 1
    total = 0
    work = pos.copy()
    for m in naive_moves(work):
        tok = work.make(m)
        total += naive_perft(work, depth - 1)
        work.unmake(tok)
    return total
