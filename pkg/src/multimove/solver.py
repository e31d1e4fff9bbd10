"""Bounded forced-win search over multimove turns.

AND-OR semantics: the prover's full turns are existential choices, every
distinct opponent turn is a universal obligation.  Depth is counted in
prover turns; the last prover turn is delegated to the capture oracle, so a
T=1 solve and a can_capture_king_within(k=allowance) query coincide by
construction.

A ProvenWin carries a strategy tree: the prover's turn at the root plus, for
each distinct opponent reply state (keyed by XFen), the subtree that finishes
the job.  replay_strategy_tree audits such trees against arbitrary adversary
policies and fails loudly on any missing branch.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .board import Move, Position, TurnConfig
from .budget import Budget, BudgetExceeded
from .game import GameRecord
from .oracle import OracleCache, SearchStats, capture_search
from .turns import turn_outcomes

PROVEN_WIN = "ProvenWin"
PROVEN_NOT_WIN = "ProvenNotWinWithinBound"
UNKNOWN = "Unknown"


class SoundnessError(AssertionError):
    """A strategy tree failed its replay audit (missing branch or no win)."""


@dataclass
class StrategyNode:
    """Prover turn to play here; replies maps each opponent-turn state (XFen)
    to the follow-up node.  replies is None when the turn wins outright."""

    turn: Tuple[Move, ...]
    replies: Optional[Dict[str, "StrategyNode"]]

    def to_jsonable(self):
        return {
            "turn": [m.text for m in self.turn],
            "replies": None if self.replies is None else
                {key: node.to_jsonable() for key, node in self.replies.items()},
        }


@dataclass
class SolveResult:
    status: str
    depth_bound: int
    prover: int
    initial_xfen: str
    strategy_tree: Optional[StrategyNode]
    stats: SearchStats
    note: str = ""

    @property
    def proven(self) -> bool:
        return self.status == PROVEN_WIN


ProgressFn = Callable[[SearchStats, float], None]


def solve_forced_win(config: Optional[TurnConfig], position: Position,
                     prover: int, max_prover_turns: int,
                     budget: Optional[Budget] = None,
                     progress: Optional[ProgressFn] = None,
                     workers: int = 1) -> SolveResult:
    """Prove or refute "prover wins within max_prover_turns full turns".

    ProvenNotWinWithinBound is only reported after exhausting the whole
    AND-OR tree; a tripped budget yields Unknown.  With workers > 1 the
    root OR-branches split across processes; budget-free results are
    identical for any worker count (node budgets apply per worker).
    """
    if max_prover_turns < 1:
        raise ValueError("max_prover_turns must be >= 1")
    if position.winner is not None:
        raise ValueError("terminal position")
    if config is not None and config != position.config:
        raise ValueError("config does not match the position's turn config")
    if workers > 1 and position.side_to_move == prover and max_prover_turns > 1:
        return _solve_parallel(position, prover, max_prover_turns, budget,
                               workers)

    from .notation import serialize_xfen
    stats = SearchStats()
    cache = OracleCache()
    memo_fail: Dict[Tuple[int, int], bool] = {}
    tick = [0]

    def maybe_progress():
        if progress is not None:
            tick[0] += 1
            if tick[0] % 64 == 0:
                progress(stats, 0.0 if budget is None else budget.elapsed())

    def prove(pos: Position, turns_left: int) -> Optional[StrategyNode]:
        # pos may be mid-turn (root splitting): the in-turn kill budget is
        # whatever remains of the current turn.
        if budget is not None:
            budget.charge()
        stats.nodes += 1
        maybe_progress()
        if turns_left == 1:
            seq = capture_search(pos, pos.moves_remaining, stats=stats,
                                 cache=cache)
            if seq is None:
                return None
            return StrategyNode(tuple(Move.from_packed(m) for m in seq), None)
        key = (pos.zkey, turns_left)
        if key in memo_fail:
            stats.table_hits += 1
            return None
        # Cheap first: an immediate kill avoids the full turn enumeration.
        seq = capture_search(pos, pos.moves_remaining, stats=stats, cache=cache)
        if seq is not None:
            return StrategyNode(tuple(Move.from_packed(m) for m in seq), None)
        enum = turn_outcomes(pos, budget)
        stats.nodes += len(enum.outcomes)
        for seq_moves, state in enum.outcomes:
            if state.winner == prover:
                # Covered by the oracle above, but keep the invariant local.
                return StrategyNode(tuple(Move.from_packed(m) for m in seq_moves), None)
            if state.winner is not None:
                continue  # prover cannot capture its own king; unreachable
            replies = refute(state, turns_left)
            if replies is not None:
                return StrategyNode(tuple(Move.from_packed(m) for m in seq_moves),
                                    replies)
        memo_fail[key] = True
        return None

    def refute(pos: Position, turns_left: int) -> Optional[Dict[str, StrategyNode]]:
        """Opponent to move; prover has turns_left-1 turns afterwards.
        Returns the reply map if every opponent turn is beaten."""
        enum = turn_outcomes(pos, budget)
        stats.nodes += len(enum.outcomes)
        if not enum.outcomes:
            return None  # frozen game: not a win
        replies: Dict[str, StrategyNode] = {}
        for _seq, state in enum.outcomes:
            if state.winner is not None:
                return None  # opponent captured the prover's king
            if state.side_to_move != prover:
                # Prover's whole next turn is forfeited; spend it.
                if turns_left - 1 < 2:
                    return None
                sub_map = refute(state, turns_left - 1)
                if sub_map is None:
                    return None
                replies[serialize_xfen(state)] = StrategyNode((), sub_map)
                continue
            if not state.has_any_move():
                return None  # frozen
            sub = prove(state, turns_left - 1)
            if sub is None:
                return None
            replies[serialize_xfen(state)] = sub
        return replies

    initial_xfen = serialize_xfen(position)
    try:
        if position.side_to_move == prover:
            node = prove(position, max_prover_turns)
        else:
            # Opponent moves first: every opponent turn must be beaten.
            replies = refute(position, max_prover_turns + 1)
            node = None if replies is None else StrategyNode((), replies)
    except BudgetExceeded as exc:
        return SolveResult(UNKNOWN, max_prover_turns, prover, initial_xfen,
                           None, stats, note=str(exc))
    if node is None:
        return SolveResult(PROVEN_NOT_WIN, max_prover_turns, prover,
                           initial_xfen, None, stats)
    return SolveResult(PROVEN_WIN, max_prover_turns, prover, initial_xfen,
                       node, stats)


# ---------------------------------------------------------------------------
# Root splitting: one job per first move of the prover's turn.  Every worker
# finishes, then the lowest-index winning branch is chosen, so budget-free
# results match the serial search exactly.

_SOLVE_STATE: Dict = {}


def _solve_worker_init(xfen: str, prover: int, turns: int,
                       deadline, max_nodes):
    _SOLVE_STATE.update(xfen=xfen, prover=prover, turns=turns,
                        deadline=deadline, max_nodes=max_nodes)


def _solve_worker_run(job):
    import time as _time
    from .notation import parse_xfen
    idx, packed = job
    budget = None
    if _SOLVE_STATE["deadline"] is not None or _SOLVE_STATE["max_nodes"]:
        remaining = None
        if _SOLVE_STATE["deadline"] is not None:
            remaining = _SOLVE_STATE["deadline"] - _time.monotonic()
            if remaining <= 0:
                return (idx, UNKNOWN, None, SearchStats().as_dict())
        budget = Budget(max_seconds=remaining,
                        max_nodes=_SOLVE_STATE["max_nodes"])
    pos = parse_xfen(_SOLVE_STATE["xfen"])
    prover = _SOLVE_STATE["prover"]
    turns = _SOLVE_STATE["turns"]
    first = Move.from_packed(packed)
    pos.make(packed)
    if pos.winner == prover:
        return (idx, PROVEN_WIN,
                StrategyNode((first,), None).to_jsonable(),
                SearchStats().as_dict())
    if pos.winner is not None:
        return (idx, PROVEN_NOT_WIN, None, SearchStats().as_dict())
    # Mid-turn: this is still turn #1.  Turn over: the prover has one fewer.
    sub_turns = turns if pos.side_to_move == prover else turns - 1
    res = solve_forced_win(None, pos, prover, sub_turns, budget=budget)
    node = None
    if res.status == PROVEN_WIN:
        tree = res.strategy_tree
        node = StrategyNode((first,) + tree.turn, tree.replies).to_jsonable()
    return (idx, res.status, node, res.stats.as_dict())


def _node_from_jsonable(data) -> StrategyNode:
    replies = data["replies"]
    return StrategyNode(
        tuple(Move.from_packed(_packed_from_text(t)) for t in data["turn"]),
        None if replies is None else
        {k: _node_from_jsonable(v) for k, v in replies.items()})


def _packed_from_text(text: str) -> int:
    from .board import NAME_SQUARES, LETTER_KINDS, pack_move
    promo = LETTER_KINDS[text[4]] if len(text) == 5 else 0
    return pack_move(NAME_SQUARES[text[:2]], NAME_SQUARES[text[2:4]], promo)


def _solve_parallel(position: Position, prover: int, max_prover_turns: int,
                    budget: Optional[Budget], workers: int) -> SolveResult:
    import multiprocessing
    import time as _time
    from .notation import serialize_xfen
    initial_xfen = serialize_xfen(position)
    deadline = None
    max_nodes = None
    if budget is not None:
        if budget.max_seconds is not None:
            deadline = _time.monotonic() + max(
                0.0, budget.max_seconds - budget.elapsed())
        max_nodes = budget.max_nodes
    jobs = list(enumerate(position.gen_moves_sorted()))
    with multiprocessing.Pool(workers, initializer=_solve_worker_init,
                              initargs=(initial_xfen, prover,
                                        max_prover_turns, deadline,
                                        max_nodes)) as pool:
        results = sorted(pool.map(_solve_worker_run, jobs, chunksize=1))
    stats = SearchStats()
    for _idx, _status, _node, st in results:
        stats.nodes += st["nodes"]
        stats.oracle_calls += st["oracle_calls"]
        stats.oracle_nodes += st["oracle_nodes"]
        stats.table_hits += st["table_hits"]
    unknown_before_win = False
    for _idx, status, node, _st in results:
        if status == PROVEN_WIN:
            tree = _node_from_jsonable(node)
            note = "" if not unknown_before_win else \
                "earlier root branches hit their budget before this proof"
            return SolveResult(PROVEN_WIN, max_prover_turns, prover,
                               initial_xfen, tree, stats, note=note)
        if status == UNKNOWN:
            unknown_before_win = True
    if unknown_before_win:
        return SolveResult(UNKNOWN, max_prover_turns, prover, initial_xfen,
                           None, stats, note="budget exceeded in a worker")
    return SolveResult(PROVEN_NOT_WIN, max_prover_turns, prover,
                       initial_xfen, None, stats)


# ---------------------------------------------------------------------------
# Replay audit


AdversaryPolicy = Callable[[Position], List[Move]]


def random_adversary(seed: int) -> AdversaryPolicy:
    rng = random.Random(seed)

    def policy(pos: Position) -> List[Move]:
        work = pos.copy()
        color = work.side_to_move
        out: List[Move] = []
        while work.winner is None and work.side_to_move == color:
            moves = work.gen_moves_sorted()
            if not moves:
                break
            m = rng.choice(moves)
            out.append(Move.from_packed(m))
            work.make(m)
        return out

    return policy


def replay_strategy_tree(result: SolveResult,
                         adversary_policy: AdversaryPolicy) -> GameRecord:
    """Play the proven strategy against one adversary; returns the record.

    Raises SoundnessError if the tree lacks a branch for a legal reply or a
    claimed-winning line fails to win.
    """
    from .notation import parse_xfen, serialize_xfen
    if result.strategy_tree is None:
        raise ValueError("no strategy tree (not a ProvenWin?)")
    pos = parse_xfen(result.initial_xfen)
    record = GameRecord(pos)
    node: Optional[StrategyNode] = result.strategy_tree
    prover = result.prover
    while True:
        if node.turn:
            record.push_turn(prover, node.turn)
        cur = record.current_position
        if node.replies is None:
            if cur.winner != prover:
                raise SoundnessError("winning turn did not capture the king")
            return record
        if cur.winner is not None:
            raise SoundnessError("game ended where replies were expected")
        reply = adversary_policy(record.final_position())
        if reply:
            record.push_turn(cur.side_to_move, reply)
        else:
            raise SoundnessError("adversary had no moves; tree should have won")
        key = serialize_xfen(record.current_position)
        node = node.replies.get(key)
        if node is None:
            raise SoundnessError(f"tree is missing a branch for reply {key!r}")


def audit_strategy_tree(result: SolveResult) -> int:
    """Exhaustively replay the tree against every opponent turn; returns the
    number of leaves checked.  Raises SoundnessError on any gap."""
    from .notation import parse_xfen, serialize_xfen
    if result.strategy_tree is None:
        raise ValueError("no strategy tree")
    prover = result.prover

    def walk(pos: Position, node: StrategyNode) -> int:
        from .board import _resolve_packed
        work = pos
        for mv in node.turn:
            packed = _resolve_packed(work, mv)
            reason = work.illegal_reason(packed)
            if reason is not None:
                raise SoundnessError(f"illegal scripted move {mv.text}: {reason}")
            work = work.copy()
            work.make(packed)
        if node.replies is None:
            if work.winner != prover:
                raise SoundnessError("leaf turn does not win")
            return 1
        total = 0
        enum = turn_outcomes(work)
        if not enum.outcomes:
            raise SoundnessError("frozen game inside a proven tree")
        for _seq, state in enum.outcomes:
            if state.winner is not None:
                raise SoundnessError("opponent wins inside a proven tree")
            key = serialize_xfen(state)
            child = node.replies.get(key)
            if child is None:
                raise SoundnessError(f"missing branch for {key!r}")
            total += walk(state, child)
        return total

    return walk(parse_xfen(result.initial_xfen), result.strategy_tree)
