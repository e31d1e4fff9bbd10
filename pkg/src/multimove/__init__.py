"""Multimove Chess (i,j): rules engine, strategies, verifier and solver."""

from .board import (BLACK, WHITE, IllegalMoveError, Move, Piece, Position,
                    RulesError, Square, TurnConfig, apply_move,
                    apply_move_with_token, attacked_squares, initial_position,
                    legal_moves, mirrored, undo_move, winner_of)
from .game import GameRecord, RecordError, record_from_turns
from .notation import (ParseError, parse_moves, parse_record, parse_xfen,
                       serialize_record, serialize_xfen)
from .oracle import (CaptureWitness, OracleCache, SearchStats,
                     can_capture_king_within, reach_squares_within)
from .solver import (SolveResult, SoundnessError, StrategyNode,
                     audit_strategy_tree, random_adversary,
                     replay_strategy_tree, solve_forced_win)
from .strategies import (OffBookError, ScriptContext, StrategyScript,
                         classify_opening, next_turn, results_table,
                         strategy_for)
from .verifier import (UnsupportedCellError, VerificationCertificate,
                       explore_open_cell, sensitivity_rerun, verify_lemma,
                       verify_theorem)
from .budget import Budget, BudgetExceeded

__all__ = [
    "BLACK", "WHITE", "IllegalMoveError", "Move", "Piece", "Position",
    "RulesError", "Square", "TurnConfig", "apply_move", "apply_move_with_token",
    "attacked_squares", "initial_position", "legal_moves", "mirrored",
    "undo_move", "winner_of", "GameRecord", "RecordError", "record_from_turns",
    "ParseError", "parse_moves", "parse_record", "parse_xfen",
    "serialize_record", "serialize_xfen", "CaptureWitness", "OracleCache",
    "SearchStats", "can_capture_king_within", "reach_squares_within",
    "SolveResult", "SoundnessError", "StrategyNode", "audit_strategy_tree",
    "random_adversary", "replay_strategy_tree", "solve_forced_win",
    "OffBookError", "ScriptContext", "StrategyScript", "classify_opening",
    "next_turn", "results_table", "strategy_for", "UnsupportedCellError",
    "VerificationCertificate", "explore_open_cell", "sensitivity_rerun",
    "verify_lemma", "verify_theorem", "Budget", "BudgetExceeded",
]

__version__ = "0.1.0"
