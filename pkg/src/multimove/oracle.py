"""Goal-directed reachability: "capture the king within k own moves".

The oracle answers a single-agent question: with the opponent frozen, can the
side to move capture the enemy king in at most k consecutive moves?  Because
the opponent never replies, the target square is fixed for the whole search,
which enables admissible distance pruning:

  * every piece kind gets an optimistic move-count to the target computed on
    an empty board (a true lower bound: removing blockers never lengthens a
    path, and a promoted pawn is bounded by pushes-to-promote plus one);
  * a move is expanded only if afterwards some piece could still reach the
    target in the remaining budget.

Moves are tried in (optimistic-total, canonical) order, so the witness
returned for a given position and budget is deterministic.  A transposition
memo per query caches refuted states by remaining budget.

The same single-agent machinery powers reach_squares_within, the per-piece
"where can it stand within k moves" query.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .board import (BISHOP, KING, KNIGHT, PAWN, QUEEN, ROOK, WHITE,
                    Move, Position, Square, code_color, code_kind,
                    move_sort_key, _bits)

INF = 255


def _knight_distance_table() -> List[int]:
    """BFS knight distance between all square pairs, flat 64*64."""
    table = [INF] * (64 * 64)
    for src in range(64):
        base = src * 64
        table[base + src] = 0
        frontier = deque([src])
        while frontier:
            sq = frontier.popleft()
            d = table[base + sq]
            r, f = divmod(sq, 8)
            for dr, df in ((1, 2), (2, 1), (2, -1), (1, -2),
                           (-1, -2), (-2, -1), (-2, 1), (-1, 2)):
                nr, nf = r + dr, f + df
                if 0 <= nr < 8 and 0 <= nf < 8:
                    t = nr * 8 + nf
                    if table[base + t] == INF:
                        table[base + t] = d + 1
                        frontier.append(t)
    return table


KNIGHT_DIST = _knight_distance_table()


def optimistic_distance(kind: int, color: int, sq: int, target: int) -> int:
    """Empty-board lower bound on this piece's moves to capture on target."""
    if sq == target:
        return 0
    r, f = sq >> 3, sq & 7
    tr, tf = target >> 3, target & 7
    if kind == KNIGHT:
        return KNIGHT_DIST[sq * 64 + target]
    if kind == KING:
        return max(abs(tr - r), abs(tf - f))
    if kind == ROOK:
        return 1 if r == tr or f == tf else 2
    if kind == BISHOP:
        if ((r + f) & 1) != ((tr + tf) & 1):
            return INF
        return 1 if abs(tr - r) == abs(tf - f) else 2
    if kind == QUEEN:
        return 1 if (r == tr or f == tf or abs(tr - r) == abs(tf - f)) else 2
    # Pawn: either capture diagonally on the way forward, or promote first.
    fwd = 1 if color == WHITE else -1
    home = 1 if color == WHITE else 6
    dr = (tr - r) * fwd
    geo = INF
    if dr >= 1 and abs(tf - f) <= dr and abs(tf - f) >= 1:
        geo = dr - (1 if r == home and dr >= 2 else 0)
    elif dr >= 2 and tf == f:
        # Straight ahead still needs a sidestep pair of captures.
        geo = dr - (1 if r == home and dr >= 3 else 0)
    promo_rank = 7 if color == WHITE else 0
    pushes = abs(promo_rank - r) - (1 if r == home else 0)
    return min(geo, pushes + 1)


@dataclass
class SearchStats:
    """Counters shared across oracle and solver calls."""

    nodes: int = 0
    oracle_calls: int = 0
    oracle_nodes: int = 0
    table_hits: int = 0

    def merged(self, other: "SearchStats") -> "SearchStats":
        return SearchStats(self.nodes + other.nodes,
                           self.oracle_calls + other.oracle_calls,
                           self.oracle_nodes + other.oracle_nodes,
                           self.table_hits + other.table_hits)

    def as_dict(self) -> Dict[str, int]:
        return {"nodes": self.nodes, "oracle_calls": self.oracle_calls,
                "oracle_nodes": self.oracle_nodes, "table_hits": self.table_hits}


@dataclass(frozen=True)
class CaptureWitness:
    """A move sequence (single side, opponent frozen) ending in king capture."""

    moves: Tuple[Move, ...]

    def __len__(self) -> int:
        return len(self.moves)

    @property
    def texts(self) -> List[str]:
        return [m.text for m in self.moves]


class OracleCache:
    """Optional cross-call cache, exact on (state, side, budget)."""

    __slots__ = ("yes", "fail_at")

    def __init__(self):
        self.yes: Dict[Tuple[int, int, int], Tuple[int, ...]] = {}
        self.fail_at: Dict[Tuple[int, int], int] = {}


def can_capture_king_within(position: Position, k: int, *,
                            stats: Optional[SearchStats] = None,
                            cache: Optional[OracleCache] = None
                            ) -> Optional[CaptureWitness]:
    """Witness iff the side to move can capture the enemy king within k of
    its own consecutive moves (the opponent stands still).  Exhaustive up to
    k; the witness is the first found in (optimistic-total, canonical) order.
    """
    seq = capture_search(position, k, stats=stats, cache=cache)
    if seq is None:
        return None
    return CaptureWitness(tuple(Move.from_packed(m) for m in seq))


def capture_search(position: Position, k: int, *,
                   stats: Optional[SearchStats] = None,
                   cache: Optional[OracleCache] = None
                   ) -> Optional[Tuple[int, ...]]:
    """Packed-move core of can_capture_king_within."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if position.winner is not None:
        raise ValueError("terminal position")
    side = position.side_to_move
    target = position.king_square(side ^ 1)
    if target < 0:
        raise ValueError("enemy king absent")
    if stats is not None:
        stats.oracle_calls += 1

    ckey = (position.zkey, side, k)
    if cache is not None:
        hit = cache.yes.get(ckey)
        if hit is not None:
            if stats is not None:
                stats.table_hits += 1
            return hit
        failed = cache.fail_at.get((position.zkey, side), 0)
        if failed >= k:
            if stats is not None:
                stats.table_hits += 1
            return None

    work = position.copy()
    base = 7 if side else 1
    kind_codes = ((PAWN, base), (KNIGHT, base + 1), (BISHOP, base + 2),
                  (ROOK, base + 3), (QUEEN, base + 4), (KING, base + 5))
    piece_dist = [0] * 64
    fail: Dict[int, int] = {}
    seq: List[int] = []
    counter = [0]
    dist = optimistic_distance
    ksort = move_sort_key

    def dfs(budget: int) -> bool:
        counter[0] += 1
        caps = work.king_capture_moves()
        if caps:
            seq.append(caps[0])
            return True
        if budget == 1:
            return False
        best1, best1_sq, best2 = INF, -1, INF
        for kind, code in kind_codes:
            bb = work.bb[code]
            for sq in _bits(bb):
                d = dist(kind, side, sq, target)
                piece_dist[sq] = d
                if d < best1:
                    best2 = best1
                    best1, best1_sq = d, sq
                elif d < best2:
                    best2 = d
        if best1 > budget:
            return False
        scored = []
        for m in work.gen_moves():
            frm = m & 63
            to = (m >> 6) & 63
            promo = (m >> 12) & 7
            kind = promo if promo else code_kind(work.piece_at[frm])
            d_self = dist(kind, side, to, target)
            d_other = best2 if frm == best1_sq else best1
            if 1 + (d_self if d_self < d_other else d_other) > budget:
                continue
            scored.append(((d_self << 24) | ksort(m, target), m))
        scored.sort()
        for _, m in scored:
            tok = work.make_sa(m)
            z = work.zkey
            if fail.get(z, 0) >= budget - 1:
                work.unmake_sa(tok)
                continue
            seq.append(m)
            if dfs(budget - 1):
                work.unmake_sa(tok)
                return True
            seq.pop()
            work.unmake_sa(tok)
            prev = fail.get(z, 0)
            if budget - 1 > prev:
                fail[z] = budget - 1
        return False

    found = dfs(k)
    if stats is not None:
        stats.oracle_nodes += counter[0]
    result = tuple(seq) if found else None  # seq is built root-first
    if cache is not None:
        if result is not None:
            cache.yes[ckey] = result
        else:
            prev = cache.fail_at.get((position.zkey, side), 0)
            if k > prev:
                cache.fail_at[(position.zkey, side)] = k
    return result


def reach_squares_within(position: Position, piece_square: Square, k: int
                         ) -> Set[Square]:
    """Squares one piece can stand on within k of its own consecutive moves.

    Captures are allowed (the board updates as victims disappear), own pieces
    block, the opponent never moves, and capturing the enemy king ends the
    line.  A promoting pawn keeps its identity as the promoted piece.
    Analytical query: the side to move and turn clock are ignored.
    """
    sq0 = piece_square.index
    code = position.piece_at[sq0]
    if not code:
        raise ValueError(f"no piece on {piece_square}")
    if k < 0:
        raise ValueError("k must be >= 0")
    color = code_color(code)
    work = position.copy()
    work.side_to_move = color
    work.winner = None
    ek_code = 12 if color == WHITE else 6  # the enemy king's piece code
    reached: Set[int] = set()
    seen: Dict[int, int] = {}

    def dfs(sq: int, budget: int) -> None:
        if budget == 0:
            return
        key = work.zkey
        if seen.get(key, -1) >= budget:
            return
        seen[key] = budget
        for m in work.gen_moves():
            if (m & 63) != sq:
                continue
            to = (m >> 6) & 63
            reached.add(to)
            if work.piece_at[to] == ek_code:
                continue  # king captured: the line ends here
            tok = work.make_sa(m)
            dfs(to, budget - 1)
            work.unmake_sa(tok)

    dfs(sq0, k)
    return {Square.from_index(s) for s in reached}


def knight_reach_oracle(start: int, k: int) -> Set[int]:
    """Plain BFS knight reachability on an empty board (test oracle)."""
    out = {start} if k >= 0 else set()
    frontier = {start}
    for _ in range(k):
        nxt = set()
        for sq in frontier:
            r, f = divmod(sq, 8)
            for dr, df in ((1, 2), (2, 1), (2, -1), (1, -2),
                           (-1, -2), (-2, -1), (-2, 1), (-1, 2)):
                nr, nf = r + dr, f + df
                if 0 <= nr < 8 and 0 <= nf < 8:
                    nxt.add(nr * 8 + nf)
        frontier = nxt - out | frontier
        out |= nxt
    return out
