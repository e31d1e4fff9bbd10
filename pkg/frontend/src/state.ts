// Pure view-state derivation. Everything here is computed from service
// responses; the UI never derives legality on its own (it only filters the
// served legal-move list for highlighting).

import type { GameState, TableCell } from "./protocol.js";

export interface ViewSquare {
    file: number;   // 0..7 = a..h
    rank: number;   // 0..7 = 1..8
    piece: string | null;  // FEN letter, e.g. "N" or "p"
}

export interface UiGameView {
    board: (string | null)[][];       // [rank][file], rank 0 = rank 1
    sideToMove: string;
    movesRemaining: number;
    humanSide: string;
    myTurn: boolean;
    banner: string;
    gameOver: boolean;
    legalMoves: string[];
    pendingCount: number;
    botLabel: string;
}

// The piece-placement field of an XFen/FEN string, for display only.
export function boardFromXfen(xfen: string): (string | null)[][] {
    const placement = xfen.split(" ")[0];
    const rows = placement.split("/");
    const board: (string | null)[][] = [];
    for (let rank = 0; rank < 8; rank++) {
        board.push(new Array<string | null>(8).fill(null));
    }
    rows.forEach((row, i) => {
        const rank = 7 - i;
        let file = 0;
        for (const ch of row) {
            if (ch >= "1" && ch <= "8") {
                file += Number(ch);
            } else {
                board[rank][file] = ch;
                file += 1;
            }
        }
    });
    return board;
}

export function squareName(file: number, rank: number): string {
    return "abcdefgh"[file] + String(rank + 1);
}

export function deriveView(state: GameState): UiGameView {
    const over = state.status === "won";
    let banner: string;
    if (over) {
        const winner = state.winner === "white" ? "White" : "Black";
        const you = state.winner === state.human_side ? " - you win!" : " - the bot wins.";
        banner = `${winner} captured the king${you}`;
    } else if (state.side_to_move === state.human_side) {
        banner = `Your move: ${state.moves_remaining} left this turn`;
    } else {
        banner = "Bot to move";
    }
    return {
        board: boardFromXfen(state.xfen),
        sideToMove: state.side_to_move,
        movesRemaining: state.moves_remaining,
        humanSide: state.human_side,
        myTurn: !over && state.side_to_move === state.human_side,
        banner,
        gameOver: over,
        legalMoves: state.legal_moves,
        pendingCount: state.pending.length,
        botLabel: state.bot.fallback
            ? `${state.bot.active} (fallback: ${state.bot.note})`
            : state.bot.active,
    };
}

// Click-to-move selection. The only moves ever produced are members of the
// served legal-move list.
export interface Selection {
    from: string | null;
}

export type ClickResult =
    | { kind: "ignored" }
    | { kind: "selected"; from: string; targets: string[] }
    | { kind: "cleared" }
    | { kind: "move"; move: string }
    | { kind: "promotion"; options: string[] };

export function movesFrom(view: UiGameView, from: string): string[] {
    return view.legalMoves.filter((m) => m.startsWith(from));
}

export function handleSquareClick(view: UiGameView, sel: Selection,
                                  square: string): ClickResult {
    if (!view.myTurn) {
        return { kind: "ignored" };
    }
    if (sel.from === null) {
        const targets = movesFrom(view, square);
        if (targets.length === 0) {
            return { kind: "ignored" };
        }
        return { kind: "selected", from: square, targets: targets.map((m) => m.slice(2, 4)) };
    }
    if (sel.from === square) {
        return { kind: "cleared" };
    }
    const candidates = view.legalMoves.filter(
        (m) => m.startsWith(sel.from as string) && m.slice(2, 4) === square);
    if (candidates.length === 0) {
        // Maybe the player is switching to another of their pieces.
        const retarget = movesFrom(view, square);
        if (retarget.length > 0) {
            return { kind: "selected", from: square, targets: retarget.map((m) => m.slice(2, 4)) };
        }
        return { kind: "cleared" };
    }
    if (candidates.length === 1) {
        return { kind: "move", move: candidates[0] };
    }
    return { kind: "promotion", options: candidates };
}

// The 5x5 results grid. Cell labels come straight from the service table.
export interface PickerCell {
    whiteLabel: string;
    blackLabel: string;
    text: string;
    open: boolean;
    playableWhite: number;
    playableBlack: number;
}

export function pickerCells(table: TableCell[]): PickerCell[] {
    const asAllowance = (label: string) => (label === ">4" ? 5 : Number(label));
    return table.map((cell) => {
        let text: string;
        if (cell.winner === null) {
            text = "open problem";
        } else {
            const who = cell.winner === "white" ? "White" : "Black";
            text = `${who} wins - ${cell.strategy}`;
        }
        return {
            whiteLabel: cell.white_per_turn,
            blackLabel: cell.black_per_turn,
            text,
            open: cell.winner === null,
            playableWhite: asAllowance(cell.white_per_turn),
            playableBlack: asAllowance(cell.black_per_turn),
        };
    });
}
