"""Command-line front end.

Subcommands: verify (lemma certificates), solve (bounded forced-win search),
explore (open cells), perft (generator auditing), play (terminal game),
serve (local engine service for the browser UI).

Exit codes are a stable contract:

    0  success: everything requested verified / proven / completed
    1  input or runtime error (bad XFen, unknown lemma, ...)
    2  usage error (bad flags; argparse default)
    3  verification found a counterexample
    4  budget exhausted (ResourceLimit / Unknown)
    5  open problem cell requested
    6  solver exhausted the bound without a proof
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from typing import List, Optional

from .board import (BLACK, WHITE, IllegalMoveError, Move, TurnConfig,
                    initial_position)
from .budget import Budget, parse_duration
from .game import GameRecord
from .naive import naive_perft
from .notation import ParseError, parse_moves, parse_xfen
from .oracle import SearchStats
from .perft import perft
from .solver import (PROVEN_NOT_WIN, PROVEN_WIN, UNKNOWN, solve_forced_win)
from .strategies import (OffBookError, SCRIPTS, ScriptContext, strategy_for)
from .verifier import (COUNTEREXAMPLE, LEMMA_CONFIGS, RESOURCE_LIMIT,
                       UnsupportedCellError, VERIFIED, explore_open_cell,
                       verify_lemma, verify_theorem)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_COUNTEREXAMPLE = 3
EXIT_BUDGET = 4
EXIT_OPEN_CELL = 5
EXIT_NOT_PROVEN = 6

ALL_LEMMAS = tuple(sorted(LEMMA_CONFIGS, key=lambda s: int(s[5:])))


def _default_workers() -> int:
    env = os.environ.get("MULTIMOVE_WORKERS")
    if env and env.isdigit() and int(env) >= 1:
        return int(env)
    return 1


def _budget_from(args) -> Optional[Budget]:
    seconds = parse_duration(args.budget) if args.budget else None
    nodes = args.nodes if getattr(args, "nodes", None) else None
    if seconds is None and nodes is None:
        return None
    return Budget(max_seconds=seconds, max_nodes=nodes)


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    out_dir = args.out
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    variants = ("strict", "loose") if args.ep_variant == "both" else (args.ep_variant,)

    if args.cell:
        wi, bj = args.cell
        try:
            cfg = TurnConfig(wi, bj)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
        worst = EXIT_OK
        for variant in variants:
            try:
                cert = verify_theorem(TurnConfig(wi, bj, variant),
                                      budget=_budget_from(args),
                                      workers=args.workers)
            except UnsupportedCellError as exc:
                print(f"cell ({wi},{bj}): open problem - {exc}")
                return EXIT_OPEN_CELL
            worst = max(worst, _report_cert(cert, out_dir, variant))
        return worst

    lemmas = ALL_LEMMAS if args.all else (f"lemma{args.lemma}",)
    worst = EXIT_OK
    for lemma in lemmas:
        if lemma not in SCRIPTS:
            print(f"error: unknown lemma {lemma!r}", file=sys.stderr)
            return EXIT_ERROR
        for variant in variants:
            checkpoint = None
            if args.resume and out_dir:
                checkpoint = os.path.join(out_dir, f"{lemma}.{variant}.progress")
            cert = verify_lemma(lemma, budget=_budget_from(args),
                                ep_rule=variant, workers=args.workers,
                                checkpoint_path=checkpoint)
            worst = max(worst, _report_cert(cert, out_dir, variant))
            if worst == EXIT_COUNTEREXAMPLE:
                return worst
    return worst


def _report_cert(cert, out_dir, variant) -> int:
    line = (f"{cert.lemma} ({cert.config[0]},{cert.config[1]}) ep={variant}: "
            f"{cert.status}  turn_bound={cert.turn_bound} "
            f"branches={cert.branches_examined} "
            f"opponent_turns={cert.opponent_turns_deduped} "
            f"raw_sequences={cert.raw_sequences} "
            f"wall={cert.wall_time}s")
    print(line)
    if cert.extension_note:
        print(f"  note: {cert.extension_note}")
    if cert.status == COUNTEREXAMPLE:
        print(f"  counterexample ({cert.counterexample_reason}):")
        print("  " + (cert.counterexample or "").replace("\n", "\n  "))
    if out_dir:
        suffix = "" if variant == "strict" else f".{variant}"
        path = os.path.join(out_dir, f"{cert.lemma}{suffix}.cert.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(cert.to_json() + "\n")
    if cert.status == VERIFIED:
        return EXIT_OK
    if cert.status == RESOURCE_LIMIT:
        return EXIT_BUDGET
    return EXIT_COUNTEREXAMPLE


# ---------------------------------------------------------------------------
# solve / explore


def _progress_printer():
    last = [0.0]

    def cb(stats: SearchStats, elapsed: float) -> None:
        now = time.monotonic()
        if now - last[0] >= 1.0:
            last[0] = now
            total = stats.nodes + stats.oracle_nodes
            rate = total / elapsed if elapsed > 0 else 0.0
            print(f"  ... {total} nodes, {rate:,.0f}/s, "
                  f"{stats.oracle_calls} oracle calls", file=sys.stderr)

    return cb


def cmd_solve(args) -> int:
    cfg = TurnConfig(args.white, args.black)
    side = WHITE if args.side == "white" else BLACK
    pos = initial_position(cfg)
    if side == BLACK:
        print("error: solving for Black from the start needs White to move "
              "first; use explore or a custom position", file=sys.stderr)
        return EXIT_ERROR
    budget = _budget_from(args)
    progress = _progress_printer() if args.progress else None
    res = solve_forced_win(None, pos, side, args.turns, budget=budget,
                           progress=progress, workers=args.workers)
    print(f"({args.white},{args.black}) {args.side} within {args.turns} "
          f"turn(s): {res.status}")
    print(f"  nodes={res.stats.nodes} oracle_calls={res.stats.oracle_calls} "
          f"oracle_nodes={res.stats.oracle_nodes} table_hits={res.stats.table_hits}")
    if res.note:
        print(f"  note: {res.note}")
    if res.status == PROVEN_WIN:
        print(f"  first turn: {' '.join(m.text for m in res.strategy_tree.turn)}")
        if args.out:
            import json
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump({"initial_xfen": res.initial_xfen,
                           "prover": args.side,
                           "max_prover_turns": res.depth_bound,
                           "tree": res.strategy_tree.to_jsonable()}, fh, indent=1)
            print(f"  strategy tree written to {args.out}")
        return EXIT_OK
    if res.status == PROVEN_NOT_WIN:
        return EXIT_NOT_PROVEN
    return EXIT_BUDGET


def cmd_explore(args) -> int:
    cfg = TurnConfig(args.white, args.black)
    budget = _budget_from(args) or Budget(max_seconds=30.0)
    progress = _progress_printer() if args.progress else None
    try:
        res = explore_open_cell(cfg, budget, progress=progress)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"({args.white},{args.black}) exploration: {res.status}")
    print(f"  bounds tried: {res.note}")
    print(f"  nodes={res.stats.nodes} oracle_nodes={res.stats.oracle_nodes}")
    if res.status == PROVEN_WIN:
        print("  !! proof found; this would settle an open problem - "
              "audit the strategy tree carefully")
        return EXIT_OK
    return EXIT_BUDGET if res.status == UNKNOWN else EXIT_NOT_PROVEN


# ---------------------------------------------------------------------------
# perft


def cmd_perft(args) -> int:
    try:
        if args.xfen:
            pos = parse_xfen(args.xfen)
        else:
            pos = initial_position(TurnConfig(args.white, args.black))
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    ok = True
    for depth in range(1, args.depth + 1):
        t0 = time.monotonic()
        n = perft(pos.copy(), depth)
        line = f"perft({depth}) = {n}  [{time.monotonic() - t0:.2f}s]"
        if args.audit:
            m = naive_perft(pos, depth)
            line += f"  naive={m} {'OK' if m == n else 'MISMATCH'}"
            ok = ok and m == n
        print(line)
    return EXIT_OK if ok else EXIT_ERROR


# ---------------------------------------------------------------------------
# play


class _Bot:
    def __init__(self, policy: str, config: TurnConfig, side: int, seed: int):
        self.requested = policy
        self.side = side
        self.config = config
        self.rng = random.Random(seed)
        self.ctx = ScriptContext()
        self.script = strategy_for(config) if policy == "lemma" else None
        self.policy = policy
        if policy == "lemma" and (self.script is None or self.script.side != side):
            why = ("no scripted strategy covers this cell" if self.script is None
                   else f"the scripted strategy plays "
                        f"{'White' if self.script.side == WHITE else 'Black'}")
            print(f"note: {why}; bot falls back to random-legal play")
            self.script = None
            self.policy = "random"

    def turn_moves(self, record: GameRecord) -> List[Move]:
        if self.policy == "lemma" and self.script is not None:
            try:
                return self.script.decide(record, self.ctx)
            except OffBookError:
                print("note: scripted strategy is off book here; "
                      "bot falls back to random-legal play")
                self.policy = "random"
        if self.policy == "solver":
            pos = record.final_position()
            try:
                res = solve_forced_win(None, pos, self.side, 2,
                                       budget=Budget(max_seconds=5.0))
            except ValueError:
                res = None
            if res is not None and res.status == PROVEN_WIN:
                return list(res.strategy_tree.turn)
            print("note: solver found no proof in time; playing random-legal")
        return self._random_turn(record)

    def _random_turn(self, record: GameRecord) -> List[Move]:
        work = record.final_position()
        out: List[Move] = []
        color = work.side_to_move
        while work.winner is None and work.side_to_move == color:
            moves = work.gen_moves_sorted()
            if not moves:
                break
            m = self.rng.choice(moves)
            out.append(Move.from_packed(m))
            work.make(m)
        return out


def cmd_play(args) -> int:
    cfg = TurnConfig(args.white, args.black)
    human = WHITE if args.side == "white" else BLACK
    bot = _Bot(args.bot, cfg, human ^ 1, args.seed)
    record = GameRecord(initial_position(cfg))
    print(f"Multimove Chess ({args.white},{args.black}); you play "
          f"{'White' if human == WHITE else 'Black'}; enter moves like e2e4 "
          "(promotions e7e8q; castle e1g1). Ctrl-D quits.")
    plies = 0
    while True:
        pos = record.current_position
        if pos.winner is not None:
            who = "White" if pos.winner == WHITE else "Black"
            yours = " - you win!" if pos.winner == human else " - the bot wins."
            print(f"{who} captured the king{yours}")
            return EXIT_OK
        if args.max_plies and plies >= args.max_plies:
            print(f"ply cap {args.max_plies} reached: unresolved")
            return EXIT_OK
        if pos.side_to_move == human:
            plies += _human_turn(record, human)
        else:
            moves = bot.turn_moves(record)
            if not moves:
                print("frozen position (neither side can move): unresolved")
                return EXIT_OK
            record.push_turn(pos.side_to_move, moves)
            plies += len(moves)
            print(f"bot plays: {' '.join(m.text for m in moves)}")


def _human_turn(record: GameRecord, human: int) -> int:
    print(record.current_position.board_text())
    turn: List[Move] = []
    work = record.final_position()
    while work.winner is None and work.side_to_move == human:
        prompt = f"[{work.moves_remaining} move(s) left] > "
        try:
            line = input(prompt)
        except EOFError:
            print("\nbye")
            raise SystemExit(EXIT_OK)
        tokens = line.split()
        for tok in tokens:
            try:
                mvs = parse_moves(tok, work)
            except ParseError as exc:
                print(f"  rejected: {exc.reason}")
                break
            mv = mvs[0]
            work.make(mv.packed())
            turn.append(mv)
            if work.winner is not None or work.side_to_move != human:
                break
    record.push_turn(human, turn)
    return len(turn)


# ---------------------------------------------------------------------------
# serve


def cmd_serve(args) -> int:
    from .service import run_server
    run_server(host=args.host, port=args.port, ui_dir=args.ui)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multimove",
                                 description="Multimove Chess (i,j) toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="exhaustively verify scripted strategies")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--lemma", type=int, help="lemma number 2..10")
    g.add_argument("--all", action="store_true", help="verify every lemma")
    g.add_argument("--cell", type=int, nargs=2, metavar=("I", "J"),
                   help="verify the covering strategy for one (i,j) cell")
    v.add_argument("--budget", help="wall budget, e.g. 30s / 5m / 2h")
    v.add_argument("--nodes", type=int, help="node budget")
    v.add_argument("--ep-variant", choices=("strict", "loose", "both"),
                   default="strict")
    v.add_argument("--out", help="directory for certificate files")
    v.add_argument("--resume", action="store_true",
                   help="resume from per-branch checkpoints in --out")
    v.add_argument("--workers", type=int, default=_default_workers())
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("solve", help="bounded forced-win search from the start")
    s.add_argument("--white", type=int, required=True)
    s.add_argument("--black", type=int, required=True)
    s.add_argument("--side", choices=("white", "black"), default="white")
    s.add_argument("--turns", type=int, required=True)
    s.add_argument("--budget")
    s.add_argument("--nodes", type=int)
    s.add_argument("--out", help="write the strategy tree (JSON) on ProvenWin")
    s.add_argument("--progress", action="store_true")
    s.add_argument("--workers", type=int, default=_default_workers())
    s.set_defaults(fn=cmd_solve)

    e = sub.add_parser("explore", help="bounded exploration of the open cells")
    e.add_argument("--white", type=int, required=True)
    e.add_argument("--black", type=int, required=True)
    e.add_argument("--budget")
    e.add_argument("--nodes", type=int)
    e.add_argument("--progress", action="store_true")
    e.set_defaults(fn=cmd_explore)

    p = sub.add_parser("perft", help="ply counts for generator auditing")
    p.add_argument("--xfen", help="start position (default: initial)")
    p.add_argument("--white", type=int, default=1)
    p.add_argument("--black", type=int, default=1)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--audit", action="store_true",
                   help="cross-check against the naive generator")
    p.set_defaults(fn=cmd_perft)

    pl = sub.add_parser("play", help="play in the terminal")
    pl.add_argument("--white", type=int, required=True)
    pl.add_argument("--black", type=int, required=True)
    pl.add_argument("--bot", choices=("lemma", "solver", "random"),
                    default="lemma")
    pl.add_argument("--side", choices=("white", "black"), default="white",
                    help="the side you play")
    pl.add_argument("--seed", type=int, default=0)
    pl.add_argument("--max-plies", type=int, default=0,
                    help="adjudicate 'unresolved' after this many plies")
    pl.set_defaults(fn=cmd_play)

    sv = sub.add_parser("serve", help="run the local engine service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8642)
    sv.add_argument("--ui", help="static directory for the browser UI")
    sv.set_defaults(fn=cmd_serve)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, IllegalMoveError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
