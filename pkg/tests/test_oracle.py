"""Capture oracle: paper-fact reproduction, completeness, admissibility."""

import random

import pytest

from multimove.board import (BISHOP, BLACK, KING, KNIGHT, PAWN, QUEEN, ROOK,
                             WHITE, Move, Piece, Position, Square, TurnConfig,
                             initial_position, piece_code)
from multimove.naive import naive_moves
from multimove.notation import parse_moves, parse_xfen
from multimove.oracle import (SearchStats, can_capture_king_within,
                              capture_search, knight_reach_oracle,
                              optimistic_distance, reach_squares_within)

from conftest import random_playout_positions


class TestCanCaptureKing:
    def test_no_kill_within_three_from_start(self):
        pos = initial_position(TurnConfig(4, 1))
        assert can_capture_king_within(pos, 3) is None

    def test_knight_rush_witness_at_four(self):
        pos = initial_position(TurnConfig(4, 1))
        w = can_capture_king_within(pos, 4)
        assert w is not None
        assert w.texts == ["b1a3", "a3b5", "b5c7", "c7e8"]

    def test_witness_after_battery_opening(self):
        # After the Nc3/e3/Qf3 setup a kill within three exists; the knight's
        # d5-c7-e8 route is one such witness (the oracle may find a shorter
        # queen route since the opponent is frozen).
        pos = initial_position(TurnConfig(3, 2))
        for tok in "b1c3 e2e3 d1f3".split():
            mv = parse_moves(tok, pos)[0]
            pos.make(mv.packed())
        pos.side_to_move = WHITE  # analytical: ignore that it is Black's turn
        pos.moves_remaining = 3
        pos._rehash()
        w = can_capture_king_within(pos, 3)
        assert w is not None and len(w.moves) <= 3
        assert w.texts[-1].endswith("e8")
        # The knight route claimed for this setup replays legally.
        work = pos.copy()
        for tok in ("c3d5", "d5c7"):
            mv = parse_moves(tok, work)[0]
            assert work.illegal_reason(mv.packed()) is None
            work.make_sa(mv.packed())
        final = parse_moves("c7e8", work)[0]
        assert work.illegal_reason(final.packed()) is None

    def test_terminal_position_is_an_error(self):
        pos = parse_xfen("rnbq1bnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQ - 0 1 0 1 1")
        with pytest.raises(ValueError):
            can_capture_king_within(pos, 2)

    def test_witnesses_replay_to_a_win(self):
        # Soundness: replay each witness single-agent and check the capture.
        for pos in random_playout_positions(150, seed=77, max_plies=30):
            seq = capture_search(pos, 2)
            if seq is None:
                continue
            work = pos.copy()
            king = work.king_square(work.side_to_move ^ 1)
            for m in seq[:-1]:
                assert work.illegal_reason(m) is None
                work.make_sa(m)
            last = seq[-1]
            assert (last >> 6) & 63 == king
            assert work.illegal_reason(last) is None

    def test_completeness_vs_bruteforce_small_k(self, random_positions_500):
        # k <= 2: unpruned enumeration over the naive generator must agree
        # exactly on existence.
        def brute(pos, k):
            king = pos.king_square(pos.side_to_move ^ 1)
            def rec(work, budget):
                for m in naive_moves(work):
                    if (m >> 6) & 63 == king:
                        return True
                if budget == 1:
                    return False
                for m in naive_moves(work):
                    tok = work.make_sa(m)
                    hit = rec(work, budget - 1)
                    work.unmake_sa(tok)
                    if hit:
                        return True
                return False
            return rec(pos.copy(), k)

        for pos in random_positions_500:
            for k in (1, 2):
                assert (capture_search(pos, k) is not None) == brute(pos, k), \
                    (k, pos.board_text())


class TestPruningAdmissibility:
    KIND_NAMES = {PAWN: "pawn", KNIGHT: "knight", BISHOP: "bishop",
                  ROOK: "rook", QUEEN: "queen", KING: "king"}

    def _true_min_moves(self, kind, color, sq, target, cap=6):
        """Independent BFS: piece alone vs enemy king on an empty board."""
        def steps(k, s, c):
            r, f = divmod(s, 8)
            if k == KNIGHT:
                d = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1),
                     (-2, 1), (-1, 2)]
            elif k == KING:
                d = [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if a or b]
            elif k == ROOK:
                return [(k, nr * 8 + nf) for dr, df in ((1, 0), (-1, 0), (0, 1), (0, -1))
                        for nr, nf in _ray(r, f, dr, df)]
            elif k == BISHOP:
                return [(k, nr * 8 + nf) for dr, df in ((1, 1), (1, -1), (-1, 1), (-1, -1))
                        for nr, nf in _ray(r, f, dr, df)]
            elif k == QUEEN:
                return [(k, nr * 8 + nf) for dr, df in
                        ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))
                        for nr, nf in _ray(r, f, dr, df)]
            else:  # pawn: pushes, double push, capture only onto the target,
                   # promotion to queen at the last rank
                fwd = 1 if c == WHITE else -1
                home = 1 if c == WHITE else 6
                last = 7 if c == WHITE else 0
                out = []
                nr = r + fwd
                if 0 <= nr <= 7:
                    nk = QUEEN if nr == last else k
                    one = nr * 8 + f
                    if one != target:  # pushes cannot capture; king blocks
                        out.append((nk, one))
                        two = (r + 2 * fwd) * 8 + f
                        if r == home and two != target:
                            out.append((k, two))
                    for df in (-1, 1):
                        nf = f + df
                        if 0 <= nf <= 7 and nr * 8 + nf == target:
                            out.append((QUEEN if nr == last else k, nr * 8 + nf))
                return out
            out = []
            for dr, df in d:
                nr, nf = r + dr, f + df
                if 0 <= nr <= 7 and 0 <= nf <= 7:
                    out.append((k, nr * 8 + nf))
            return out

        def _ray(r, f, dr, df):
            nr, nf = r + dr, f + df
            while 0 <= nr <= 7 and 0 <= nf <= 7:
                yield nr, nf
                if nr * 8 + nf == target:
                    return  # cannot slide past the king
                nr, nf = nr + dr, nf + df

        frontier = {(kind, sq)}
        seen = set(frontier)
        for depth in range(1, cap + 1):
            nxt = set()
            for k, s in frontier:
                for state in steps(k, s, color):
                    if state[1] == target:
                        return depth
                    if state[1] != target and state not in seen:
                        seen.add(state)
                        nxt.add(state)
            frontier = nxt
        return None

    @pytest.mark.parametrize("kind", [PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING])
    def test_bound_never_exceeds_true_distance(self, kind):
        rng = random.Random(kind)
        for _ in range(200):
            sq, target = rng.sample(range(64), 2)
            if kind == PAWN and (sq >> 3) in (0, 7):
                continue
            for color in (WHITE, BLACK):
                true = self._true_min_moves(kind, color, sq, target)
                bound = optimistic_distance(kind, color, sq, target)
                if true is not None:
                    assert bound <= true, (self.KIND_NAMES[kind], color, sq, target)


class TestReachSquares:
    def test_knight_blocked_by_own_pawns_at_start(self):
        pos = initial_position(TurnConfig(2, 1))
        r = {str(s) for s in reach_squares_within(pos, Square.from_name("b1"), 1)}
        assert r == {"a3", "c3"}

    def test_knight_four_moves_spans_to_e8(self):
        pos = parse_xfen("4k3/8/8/8/8/8/8/1N5K w - - 0 1 1 1 1")
        r = {str(s) for s in reach_squares_within(pos, Square.from_name("b1"), 4)}
        assert "e8" in r

    def test_matches_bfs_on_open_board(self):
        pos = parse_xfen("k7/8/8/8/8/8/8/N6K w - - 0 1 1 1 1")
        for k in range(5):
            got = {s.index for s in reach_squares_within(pos, Square.from_name("a1"), k)}
            bfs = knight_reach_oracle(0, k)
            bfs = {s for s in bfs if s != 7} - {0}  # own king square blocked
            got.discard(0)
            # paths through h1 are impossible anyway for a knight from a1 in
            # four moves without standing there; compare directly
            assert got == {s for s in bfs if s != 0}

    def test_empty_square_is_an_error(self):
        pos = initial_position(TurnConfig(1, 1))
        with pytest.raises(ValueError):
            reach_squares_within(pos, Square.from_name("d4"), 2)

    def test_knight_box_coverage_after_double_knight_opening(self):
        # Both knights out and the rook pawn nudged: their 3-move reach
        # covers the whole c1-g3 box.
        pos = initial_position(TurnConfig(1, 3))
        for tok in "h2h3 b8c6 g8f6 a7a6".split():
            pos.make(parse_moves(tok, pos)[0].packed())
        box = {Square(f, r) for f in range(2, 7) for r in range(3)}
        reach = (reach_squares_within(pos, Square.from_name("c6"), 3)
                 | reach_squares_within(pos, Square.from_name("f6"), 3))
        missing = box - reach
        assert not missing, sorted(str(s) for s in missing)
