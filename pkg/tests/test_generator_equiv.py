"""Optimized bitboard generator vs the independent mailbox generator.

The two implementations share only the Position fields they read; identical
move sets on random positions and along scripted-strategy lines are the
correctness contract for the fast path.
"""

import random

from multimove.board import BLACK, WHITE, Move, TurnConfig, initial_position
from multimove.game import GameRecord
from multimove.naive import naive_moves, naive_perft
from multimove.perft import perft
from multimove.strategies import SCRIPTS, ScriptContext
from multimove.turns import turn_outcomes
from multimove.verifier import LEMMA_CONFIGS


def assert_equivalent(pos):
    got = set(pos.gen_moves())
    want = naive_moves(pos)
    assert got == want, (pos.board_text(), sorted(got ^ want))


def test_equivalence_on_thousand_random_positions(random_positions_1000):
    for pos in random_positions_1000:
        assert_equivalent(pos)


def test_equivalence_exhaustive_on_small_lemma_trees():
    # Walk every node of the lemma2/3/6 verification trees.
    for lemma in ("lemma2", "lemma3", "lemma6"):
        script = SCRIPTS[lemma]
        wi, bj = LEMMA_CONFIGS[lemma]
        record = GameRecord(initial_position(TurnConfig(wi, bj)))
        ctx = ScriptContext()

        def walk(record):
            pos = record.current_position
            assert_equivalent(pos)
            if pos.winner is not None:
                return
            if pos.side_to_move == script.side:
                record.push_turn(script.side, script.decide(record, ctx))
                walk(record)
                record.pop_turn()
            else:
                for seq, _state in turn_outcomes(pos).outcomes:
                    record.push_turn_trusted(pos.side_to_move, seq)
                    walk(record)
                    record.pop_turn()

        walk(record)


def test_equivalence_along_scripted_lines_vs_random_adversaries():
    # Sampled verification lines for every lemma: script vs seeded random.
    for lemma, (wi, bj) in LEMMA_CONFIGS.items():
        script = SCRIPTS[lemma]
        ctx = ScriptContext()
        for seed in (1, 2, 3):
            rng = random.Random((lemma, seed).__hash__())
            record = GameRecord(initial_position(TurnConfig(wi, bj)))
            for _turn in range(12):
                pos = record.current_position
                assert_equivalent(pos)
                if pos.winner is not None:
                    break
                if pos.side_to_move == script.side:
                    record.push_turn(script.side, script.decide(record, ctx))
                else:
                    moves = []
                    work = record.final_position()
                    color = work.side_to_move
                    while work.winner is None and work.side_to_move == color:
                        assert_equivalent(work)
                        m = rng.choice(work.gen_moves_sorted())
                        moves.append(Move.from_packed(m))
                        work.make(m)
                    record.push_turn(color, moves)
            assert record.current_position.winner == script.side, lemma


def test_perft_matches_naive_oracle():
    pos = initial_position(TurnConfig(1, 1))
    for depth in (1, 2, 3):
        assert perft(pos.copy(), depth) == naive_perft(pos, depth)


def test_perft_variant_depth_four_golden():
    # Variant semantics diverge from standard chess once check rules would
    # bite; this value is frozen from the naive oracle (see goldens).
    import json, os
    path = os.path.join(os.path.dirname(__file__), "goldens", "perft.json")
    with open(path) as fh:
        golden = json.load(fh)
    pos = initial_position(TurnConfig(1, 1))
    for depth_str, expected in golden["initial_1_1"].items():
        assert perft(pos.copy(), int(depth_str)) == expected
