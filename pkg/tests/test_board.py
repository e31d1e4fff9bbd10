"""Core rules: geometry, variant semantics, apply/undo, invariants."""

import random

import pytest

from multimove.board import (BLACK, WHITE, BP, WK, WP, WR,
                             IllegalMoveError, Move, Piece, Position,
                             RulesError, Square, TurnConfig, apply_move,
                             apply_move_with_token, attacked_squares,
                             initial_position, legal_moves, mirror_move,
                             mirrored, undo_move, winner_of, MK_CASTLE_K,
                             MK_EP)
from multimove.notation import parse_moves, parse_xfen, serialize_xfen

from conftest import random_playout_positions


def xfen(text):
    return parse_xfen(text)


class TestInitialPosition:
    def test_white_to_move_with_full_allowance(self):
        pos = initial_position(TurnConfig(2, 1))
        assert pos.side_to_move == WHITE
        assert pos.moves_remaining == 2

    def test_matches_standard_start_for_1_1(self):
        pos = initial_position(TurnConfig(1, 1))
        assert serialize_xfen(pos).startswith(
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1")

    @pytest.mark.parametrize("wi,bj", [(1, 1), (2, 1), (3, 3), (7, 2)])
    def test_thirty_two_pieces(self, wi, bj):
        pos = initial_position(TurnConfig(wi, bj))
        pieces = pos.piece_map()
        assert len(pieces) == 32
        assert sum(1 for p in pieces.values() if p.color == WHITE) == 16

    def test_no_winner_full_rights(self):
        pos = initial_position(TurnConfig(3, 2))
        assert pos.winner is None and pos.castling == 0xF
        assert pos.ep_target == -1


class TestLegalMoves:
    def test_twenty_at_start(self):
        pos = initial_position(TurnConfig(2, 1))
        assert len(legal_moves(pos)) == 20

    def test_terminal_position_has_no_moves(self):
        pos = xfen("rnbq1bnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQ - 0 1 0 1 1")
        assert pos.winner == WHITE
        assert legal_moves(pos) == []

    def test_moving_into_attack_is_legal(self):
        # There is no check in this variant: the king may step onto an
        # attacked square (divergence witness vs standard chess).
        pos = xfen("4r2k/8/8/8/8/8/8/4K3 w - - 0 1 1 1 1")
        assert "e1e2" in [m.text for m in legal_moves(pos)]

    def test_canonical_ordering_classes(self):
        # King captures first, then captures, then quiet moves.
        pos = xfen("4k3/8/8/3p4/4K3/8/8/7R w - - 0 1 1 1 1")
        texts = [m.text for m in legal_moves(pos)]
        assert texts[0] == "e4d5"  # the only capture
        assert all("x" not in t for t in texts)  # plain long algebraic

    def test_king_capture_sorts_first(self):
        # Rook e7 and knight d6 both attack the king on e8.
        pos = xfen("4k3/4R3/3N4/8/8/8/8/4K3 w - - 0 1 1 1 1")
        texts = [m.text for m in legal_moves(pos)]
        assert texts[0] == "d6e8" and texts[1] == "e7e8"

    def test_no_friendly_captures_or_blocked_sliders(self, random_positions_500):
        for pos in random_positions_500[:200]:
            own = pos.occ[pos.side_to_move]
            for m in pos.gen_moves():
                assert not (own >> ((m >> 6) & 63)) & 1


class TestApplyMove:
    def test_knight_development_keeps_turn(self):
        pos = initial_position(TurnConfig(2, 1))
        mv = parse_moves("b1a3", pos)[0]
        nxt = apply_move(pos, mv)
        assert nxt.side_to_move == WHITE and nxt.moves_remaining == 1
        assert nxt.piece_at[Square.from_name("a3").index] != 0

    def test_turn_flip_resets_allowance(self):
        pos = initial_position(TurnConfig(2, 3))
        pos = apply_move(pos, parse_moves("b1a3", pos)[0])
        pos = apply_move(pos, parse_moves("a3b5", pos)[0])
        assert pos.side_to_move == BLACK and pos.moves_remaining == 3

    def test_king_capture_ends_game_mid_turn(self):
        pos = initial_position(TurnConfig(5, 1))
        for tok in "b1a3 a3b5 b5c7 c7e8".split():
            pos = apply_move(pos, parse_moves(tok, pos)[0])
        assert pos.winner == WHITE
        assert pos.moves_remaining == 0
        assert legal_moves(pos) == []
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(pos, Move(Square.from_name("e7"), Square.from_name("e5")))
        assert exc.value.reason == "terminal-position"

    @pytest.mark.parametrize("move,reason", [
        ("e2e5", "bad-geometry"),
        ("d1d3", "blocked-path"),
        ("a1a2", "friendly-capture"),
        ("e7e6", "wrong-side"),
        ("d4d5", "empty-origin"),
    ])
    def test_rejection_reasons(self, move, reason):
        pos = initial_position(TurnConfig(1, 1))
        mv = Move(Square.from_name(move[:2]), Square.from_name(move[2:]))
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(pos, mv)
        assert exc.value.reason == reason

    def test_promotion_required_and_piece_moves_again(self):
        pos = xfen("3k4/6P1/8/8/8/8/8/3K4 w - - 0 1 2 2 1")
        with pytest.raises(IllegalMoveError) as exc:
            apply_move(pos, Move(Square.from_name("g7"), Square.from_name("g8")))
        assert exc.value.reason == "bad-promotion"
        pos = apply_move(pos, parse_moves("g7g8q", pos)[0])
        assert pos.moves_remaining == 1
        pos = apply_move(pos, parse_moves("g8d8", pos)[0])
        assert pos.winner == WHITE

    def test_castling_ignores_attacks_and_check(self):
        pos = xfen("4k3/8/8/8/8/8/5r2/4K2R w K - 0 1 1 1 1")
        mv = [m for m in legal_moves(pos) if m.kind == MK_CASTLE_K][0]
        nxt = apply_move(pos, mv)
        assert nxt.piece_at[Square.from_name("g1").index] == WK
        assert nxt.piece_at[Square.from_name("f1").index] == WR

    def test_castling_rights_cleared_by_rook_capture(self):
        pos = xfen("4k3/8/8/8/8/8/6p1/4K2R b K - 0 1 1 1 1")
        nxt = apply_move(pos, parse_moves("g2h1q", pos)[0])
        assert nxt.castling == 0


class TestEnPassant:
    def test_strict_window_is_one_move(self):
        pos = xfen("4k3/8/8/8/3p4/8/4P3/4K3 w - - 0 1 1 1 1")
        pos = apply_move(pos, parse_moves("e2e4", pos)[0])
        eps = [m for m in legal_moves(pos) if m.kind == MK_EP]
        assert [m.text for m in eps] == ["d4e3"]
        after = apply_move(pos, eps[0])
        assert after.piece_at[Square.from_name("e3").index] == BP
        assert after.piece_at[Square.from_name("e4").index] == 0

    def test_strict_expires_on_pushers_own_next_move(self):
        pos = xfen("4k3/8/8/8/3p4/8/4P3/4K3 w - - 0 1 2 2 1")
        pos = apply_move(pos, parse_moves("e2e4", pos)[0])
        assert pos.ep_target != -1
        pos = apply_move(pos, parse_moves("e1d1", pos)[0])
        assert pos.ep_target == -1
        assert not [m for m in legal_moves(pos) if m.kind == MK_EP]

    def test_loose_window_spans_opponent_turn(self):
        pos = xfen("4k3/8/8/8/3p4/8/4P3/4K3 w - - 0 1 2 2 2 ep-loose")
        pos = apply_move(pos, parse_moves("e2e4", pos)[0])
        pos = apply_move(pos, parse_moves("e1d1", pos)[0])
        assert pos.ep_target != -1
        pos = apply_move(pos, parse_moves("e8d8", pos)[0])
        assert [m.text for m in legal_moves(pos) if m.kind == MK_EP] == ["d4e3"]
        pos = apply_move(pos, parse_moves("d8c8", pos)[0])
        assert pos.ep_target == -1  # unused window closes with the turn

    def test_loose_window_dies_with_captured_pawn(self):
        pos = xfen("4k3/8/8/8/3p4/2N5/4P3/4K3 w - - 0 1 2 2 2 ep-loose")
        pos = apply_move(pos, parse_moves("e2e4", pos)[0])
        pos = apply_move(pos, parse_moves("e1d1", pos)[0])
        pos = apply_move(pos, parse_moves("d4c3", pos)[0])  # pawn leaves
        assert not [m for m in legal_moves(pos) if m.kind == MK_EP]


class TestTurnAccounting:
    @pytest.mark.parametrize("wi,bj", [(1, 1), (2, 1), (3, 2), (4, 3)])
    def test_full_turn_applies_allowance_then_flips(self, wi, bj):
        rng = random.Random(wi * 10 + bj)
        pos = initial_position(TurnConfig(wi, bj))
        for _turn in range(6):
            side = pos.side_to_move
            allowance = pos.config.allowance(side)
            applied = 0
            while pos.winner is None and pos.side_to_move == side:
                m = rng.choice(pos.gen_moves())
                pos.make(m)
                applied += 1
            if pos.winner is not None:
                assert applied <= allowance
                break
            assert applied == allowance
            assert pos.moves_remaining == pos.config.allowance(pos.side_to_move)

    def test_forfeit_passes_turn_when_stuck(self):
        pos = xfen("7k/8/8/8/p1p5/PpPp4/RP1P4/KN6 b - - 0 1 1 1 1")
        nxt = apply_move(pos, parse_moves("h8g8", pos)[0])
        assert nxt.side_to_move == BLACK and nxt.winner is None


class TestApplyUndoRoundtrip:
    def test_simple_and_capture_and_promotion(self):
        pos = initial_position(TurnConfig(2, 1))
        mv = parse_moves("b1a3", pos)[0]
        nxt, tok = apply_move_with_token(pos, mv)
        assert undo_move(nxt, mv, tok) == pos

    def test_token_mismatch_rejected(self):
        pos = initial_position(TurnConfig(2, 1))
        mv, other = parse_moves("b1a3 d2d4", pos)[0], parse_moves("d2d4", pos)[0]
        nxt, tok = apply_move_with_token(pos, mv)
        with pytest.raises(ValueError):
            undo_move(nxt, other, tok)
        with pytest.raises(ValueError):
            undo_move(pos, mv, tok)  # wrong position (pre-move state)

    def test_thousand_random_positions(self, random_positions_1000):
        # Every legal move from every sampled position round-trips exactly.
        rng = random.Random(99)
        for pos in random_positions_1000:
            moves = pos.gen_moves()
            sample = moves if len(moves) <= 6 else rng.sample(moves, 6)
            for m in sample:
                before = pos.copy()
                tok = pos.make(m)
                pos.unmake(tok)
                assert pos == before and pos.zkey == before.zkey

    def test_full_apply_undo_identity_on_every_move(self, random_positions_500):
        for pos in random_positions_500[:120]:
            for mv in legal_moves(pos):
                nxt, tok = apply_move_with_token(pos, mv)
                back = undo_move(nxt, mv, tok)
                assert back == pos and back.zkey == pos.zkey


class TestAttacksAndWinner:
    def test_lone_knight_attacks_eight(self):
        pos = xfen("7k/8/8/8/3N4/8/8/7K w - - 0 1 1 1 1")
        att = {str(s) for s in attacked_squares(pos, WHITE)}
        assert {"b3", "b5", "c2", "c6", "e2", "e6", "f3", "f5"} <= att

    def test_initial_white_attacks_exactly_rank_three(self):
        pos = initial_position(TurnConfig(1, 1))
        got = {str(s) for s in attacked_squares(pos, WHITE)}
        assert got == {f + "3" for f in "abcdefgh"}

    def test_e5_safe_after_every_quiet_flank_first_move(self):
        # The knight outpost square stays unattacked after any a/b/c/g/h-pawn
        # or b1-knight first move.
        firsts = ["a2a3", "a2a4", "b2b3", "b2b4", "c2c3", "c2c4",
                  "g2g3", "g2g4", "h2h3", "h2h4", "b1a3", "b1c3"]
        e5 = Square.from_name("e5")
        for tok in firsts:
            pos = initial_position(TurnConfig(1, 2))
            pos = apply_move(pos, parse_moves(tok, pos)[0])
            assert e5 not in attacked_squares(pos, WHITE), tok

    def test_winner_of(self):
        assert winner_of(initial_position(TurnConfig(1, 1))) is None
        pos = xfen("rnbq1bnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQ - 0 1 0 1 1")
        assert winner_of(pos) == WHITE
        both_gone = Position(TurnConfig(1, 1))
        with pytest.raises(RulesError):
            winner_of(both_gone)


class TestMirrorSymmetry:
    def test_moves_and_attacks_map_through_the_mirror(self):
        for pos in random_playout_positions(120, seed=5, max_plies=50):
            mir = mirrored(pos)
            got = {m.text for m in legal_moves(mir)}
            expect = {mirror_move(m).text for m in legal_moves(pos)}
            assert got == expect
            att = {(s.file, 7 - s.rank) for s in attacked_squares(pos, WHITE)}
            att_m = {(s.file, s.rank) for s in attacked_squares(mir, BLACK)}
            assert att == att_m


class TestPositionValidation:
    def test_pawn_on_last_rank_rejected(self):
        with pytest.raises(Exception):
            parse_xfen("P3k3/8/8/8/8/8/8/4K3 w - - 0 1 1 1 1")

    def test_two_kings_per_color_rejected(self):
        with pytest.raises(Exception):
            parse_xfen("4k3/8/8/8/8/8/8/K3K3 w - - 0 1 1 1 1")

    def test_moves_remaining_above_allowance_rejected(self):
        with pytest.raises(Exception):
            parse_xfen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1 5 3 1")
