"""Scripted strategies: dispatch table, opening classification, turns."""

import pytest

from multimove.board import BLACK, WHITE, Move, Square, TurnConfig, initial_position
from multimove.game import GameRecord
from multimove.notation import parse_moves
from multimove.strategies import (OffBookError, SCRIPTS, ScriptContext,
                                  classify_opening, next_turn,
                                  predicted_winner, results_table,
                                  strategy_for)


def record_after(config, *turn_texts):
    rec = GameRecord(initial_position(config))
    color = WHITE
    for text in turn_texts:
        rec.push_turn(color, parse_moves(text, rec.current_position))
        color ^= 1
    return rec


class TestDispatch:
    @pytest.mark.parametrize("wi,bj,expected", [
        (2, 1, "lemma2"), (3, 1, "lemma3"), (3, 2, "lemma4"), (3, 3, "lemma5"),
        (4, 1, "lemma6"), (4, 4, "lemma6"), (7, 3, "lemma6"), (5, 9, "lemma6"),
        (1, 2, "lemma7"), (1, 3, "lemma8"), (2, 3, "lemma9"),
        (1, 4, "lemma10"), (2, 11, "lemma10"), (3, 9, "lemma10"), (3, 4, "lemma10"),
    ])
    def test_covering_script(self, wi, bj, expected):
        script = strategy_for(TurnConfig(wi, bj))
        assert script is not None and script.id == expected

    @pytest.mark.parametrize("wi,bj", [(1, 1), (2, 2)])
    def test_open_cells_have_no_script(self, wi, bj):
        assert strategy_for(TurnConfig(wi, bj)) is None

    def test_table_matches_the_threshold_rule(self):
        # White wins iff its allowance reaches min(opponent's, 4).
        table = results_table()
        assert len(table) == 25
        opens = [(c["white_per_turn"], c["black_per_turn"])
                 for c in table if c["winner"] is None]
        assert sorted(opens) == [("1", "1"), ("2", "2")]
        for cell in table:
            wi = 5 if cell["white_per_turn"] == ">4" else int(cell["white_per_turn"])
            bj = 5 if cell["black_per_turn"] == ">4" else int(cell["black_per_turn"])
            if cell["winner"] is None:
                continue
            expect = "white" if wi >= min(bj, 4) else "black"
            assert cell["winner"] == expect, cell
            script = SCRIPTS[cell["strategy"]]
            assert script.side == (WHITE if expect == "white" else BLACK)

    def test_predicted_winner_spot_checks(self):
        assert predicted_winner(TurnConfig(2, 1)) == WHITE
        assert predicted_winner(TurnConfig(3, 4)) == BLACK
        assert predicted_winner(TurnConfig(9, 9)) == WHITE
        assert predicted_winner(TurnConfig(2, 2)) is None


class TestClassification:
    def test_lemma7_classes(self):
        assert classify_opening("lemma7", record_after(TurnConfig(1, 2), "d2d4")) == "C"
        assert classify_opening("lemma7", record_after(TurnConfig(1, 2), "e2e3")) == "D"
        assert classify_opening("lemma7", record_after(TurnConfig(1, 2), "g1f3")) == "B"
        assert classify_opening("lemma7", record_after(TurnConfig(1, 2), "b1c3")) == "A"
        assert classify_opening("lemma7", record_after(TurnConfig(1, 2), "h2h4")) == "A"

    def test_lemma9_classes(self):
        cfg = TurnConfig(2, 3)
        assert classify_opening("lemma9", record_after(cfg, "e2e4 d1g4")) == "B2"
        assert classify_opening("lemma9", record_after(cfg, "e2e3 d1f3")) == "B1"
        assert classify_opening("lemma9", record_after(cfg, "e2e4 d1h5")) == "B3"
        assert classify_opening("lemma9", record_after(cfg, "c2c3 d1b3")) == "C"
        assert classify_opening("lemma9", record_after(cfg, "b1c3 c3a4")) == "A1"
        assert classify_opening("lemma9", record_after(cfg, "b1a3 a3b5")) == "A2"
        assert classify_opening("lemma9", record_after(cfg, "b1c3 c3d5")) == "A2"
        assert classify_opening("lemma9", record_after(cfg, "a2a3 h2h3")) == "Standard"
        # c-pawn two squares + Qb3 is NOT the fast-mate setup: standard reply.
        assert classify_opening("lemma9", record_after(cfg, "c2c4 d1b3")) == "Standard"

    def test_classification_needs_a_decision_point(self):
        rec = GameRecord(initial_position(TurnConfig(2, 3)))
        with pytest.raises(ValueError):
            classify_opening("lemma9", rec)

    def test_lemma9_classification_total_over_all_openings(self):
        from multimove.turns import turn_outcomes
        rec = GameRecord(initial_position(TurnConfig(2, 3)))
        enum = turn_outcomes(rec.current_position)
        labels = {}
        for seq, _state in enum.outcomes:
            rec.push_turn_trusted(WHITE, seq)
            label = classify_opening("lemma9", rec)
            labels[label] = labels.get(label, 0) + 1
            rec.pop_turn()
        assert set(labels) <= {"A1", "A2", "B1", "B2", "B3", "C", "Standard"}
        assert labels["A1"] == 1 and labels["A2"] == 4
        assert labels["B1"] == 2 and labels["B2"] == 2 and labels["B3"] == 2
        assert labels["C"] == 1


class TestNextTurn:
    def test_knight_rush_first_turn(self):
        rec = GameRecord(initial_position(TurnConfig(2, 1)))
        turn = next_turn(SCRIPTS["lemma2"], rec)
        assert [m.text for m in turn] == ["b1a3", "a3b5"]

    def test_double_knight_first_turn_any_white_move(self):
        for first in ("a2a3", "e2e4", "g1f3"):
            rec = record_after(TurnConfig(1, 3), first)
            turn = next_turn(SCRIPTS["lemma8"], rec)
            assert [m.text for m in turn] == ["b8c6", "g8f6", "a7a6"]

    def test_knight_sortie_after_e_pawn(self):
        rec = record_after(TurnConfig(1, 2), "e2e4")
        turn = next_turn(SCRIPTS["lemma7"], rec)
        assert [m.text for m in turn] == ["b8c6", "c6e5"]

    def test_lemma9_specialised_openings(self):
        cfg = TurnConfig(2, 3)
        cases = {
            "e2e4 d1g4": ["g8f6", "f6g4", "b8c6"],
            "e2e4 d1h5": ["g7g6", "b8c6", "g8f6"],
            "e2e3 d1f3": ["e7e5", "d8f6", "b8c6"],
            "c2c3 d1b3": ["d7d5", "d8d6", "b8c6"],
            "a2a3 h2h3": ["e7e6", "d8f6", "b8c6"],
            "b1a3 a3b5": ["a7a6", "a6b5", "b8c6"],
            "b1c3 c3a4": ["b7b5", "b5a4", "b8c6"],
            "b1a3 a3c4": ["b7b5", "b5c4", "b8c6"],
            "b1c3 c3d5": ["c7c6", "c6d5", "b8c6"],
            "b1c3 c3e4": ["d7d5", "d5e4", "b8c6"],
        }
        for opening, expected in cases.items():
            rec = record_after(cfg, opening)
            turn = next_turn(SCRIPTS["lemma9"], rec)
            assert [m.text for m in turn] == expected, opening

    def test_oracle_finish_turn_two(self):
        rec = record_after(TurnConfig(2, 1), "b1a3 a3b5", "d7d6")
        turn = next_turn(SCRIPTS["lemma2"], rec)
        assert [m.text for m in turn] == ["b5c7", "c7e8"]

    def test_off_book_raises_with_record(self):
        # Teleport the scripted knight away: no kill within two exists.
        rec = record_after(TurnConfig(2, 1), "b1a3 a3b1", "d7d6")
        with pytest.raises(OffBookError) as exc:
            next_turn(SCRIPTS["lemma2"], rec)
        assert exc.value.script_id == "lemma2"

    def test_wrong_side_rejected(self):
        rec = GameRecord(initial_position(TurnConfig(2, 1)))
        with pytest.raises(ValueError):
            next_turn(SCRIPTS["lemma7"], rec)

    def test_emitted_turns_always_legal_for_sampled_lines(self):
        import random
        from multimove.verifier import LEMMA_CONFIGS
        for lemma, (wi, bj) in LEMMA_CONFIGS.items():
            script = SCRIPTS[lemma]
            ctx = ScriptContext()
            rng = random.Random(lemma)
            rec = GameRecord(initial_position(TurnConfig(wi, bj)))
            for _ in range(10):
                pos = rec.current_position
                if pos.winner is not None:
                    break
                if pos.side_to_move == script.side:
                    turn = script.decide(rec, ctx)
                    rec.push_turn(script.side, turn)  # raises if illegal
                else:
                    moves = []
                    work = rec.final_position()
                    color = work.side_to_move
                    while work.winner is None and work.side_to_move == color:
                        m = rng.choice(work.gen_moves_sorted())
                        moves.append(Move.from_packed(m))
                        work.make(m)
                    rec.push_turn(color, moves)
            assert rec.current_position.winner == script.side, lemma
