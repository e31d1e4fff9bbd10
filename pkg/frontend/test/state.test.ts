import { describe, expect, it } from "vitest";

import type { GameState } from "../src/protocol.js";
import {
    boardFromXfen, deriveView, handleSquareClick, movesFrom, squareName,
} from "../src/state.js";

const START_XFEN =
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1 2 2 1";

function state(overrides: Partial<GameState> = {}): GameState {
    return {
        session: "s1",
        xfen: START_XFEN,
        side_to_move: "white",
        moves_remaining: 2,
        legal_moves: ["b1a3", "b1c3", "e2e3", "e2e4"],
        winner: null,
        status: "active",
        human_side: "white",
        history: "multimove-record v1\nxfen: " + START_XFEN + "\n",
        pending: [],
        bot: { requested: "lemma", active: "lemma2", fallback: false, note: "" },
        ...overrides,
    };
}

describe("boardFromXfen", () => {
    it("places the starting array", () => {
        const board = boardFromXfen(START_XFEN);
        expect(board[0][4]).toBe("K");
        expect(board[7][4]).toBe("k");
        expect(board[1].every((p) => p === "P")).toBe(true);
        expect(board[3].every((p) => p === null)).toBe(true);
    });

    it("reads a sparse position", () => {
        const board = boardFromXfen("4k3/8/8/8/8/8/8/4K2R w K - 0 1 1 1 1");
        expect(board[0][7]).toBe("R");
        expect(board[7][4]).toBe("k");
    });
});

describe("deriveView", () => {
    it("countdown always mirrors the served moves_remaining", () => {
        for (const n of [1, 2, 3, 7]) {
            const view = deriveView(state({ moves_remaining: n }));
            expect(view.movesRemaining).toBe(n);
            expect(view.banner).toContain(`${n} left`);
        }
    });

    it("king-captured end state banner", () => {
        const view = deriveView(state({
            status: "won", winner: "white", legal_moves: [], side_to_move: "white",
        }));
        expect(view.gameOver).toBe(true);
        expect(view.banner).toContain("White captured the king");
        expect(view.banner).toContain("you win");
    });

    it("bot fallback is surfaced in the label", () => {
        const view = deriveView(state({
            bot: { requested: "lemma", active: "random", fallback: true,
                   note: "open cell" },
        }));
        expect(view.botLabel).toContain("random");
        expect(view.botLabel).toContain("open cell");
    });
});

describe("handleSquareClick", () => {
    it("never produces a move outside the served legal list", () => {
        const view = deriveView(state());
        // e2e5 is not served: selecting e2 then e5 must not emit a move.
        const sel = handleSquareClick(view, { from: null }, "e2");
        expect(sel.kind).toBe("selected");
        const bad = handleSquareClick(view, { from: "e2" }, "e5");
        expect(bad.kind).not.toBe("move");
        const good = handleSquareClick(view, { from: "e2" }, "e4");
        expect(good).toEqual({ kind: "move", move: "e2e4" });
    });

    it("ignores clicks when it is not the human's turn", () => {
        const view = deriveView(state({ side_to_move: "black" }));
        expect(handleSquareClick(view, { from: null }, "e2").kind).toBe("ignored");
    });

    it("selecting an empty or enemy square is ignored", () => {
        const view = deriveView(state());
        expect(handleSquareClick(view, { from: null }, "e5").kind).toBe("ignored");
        expect(handleSquareClick(view, { from: null }, "e7").kind).toBe("ignored");
    });

    it("promotion choices come from the served list", () => {
        const view = deriveView(state({
            legal_moves: ["g7g8b", "g7g8n", "g7g8q", "g7g8r"],
        }));
        const res = handleSquareClick(view, { from: "g7" }, "g8");
        expect(res.kind).toBe("promotion");
        if (res.kind === "promotion") {
            expect(res.options).toHaveLength(4);
            expect(res.options.every((m) => view.legalMoves.includes(m))).toBe(true);
        }
    });

    it("third-ply attempts find an empty legal list and do nothing", () => {
        // After the allowance is spent the service stops listing moves for
        // the human; every click falls through to "ignored".
        const view = deriveView(state({ side_to_move: "black", legal_moves: [] }));
        expect(movesFrom(view, "e2")).toHaveLength(0);
        expect(handleSquareClick(view, { from: null }, "e2").kind).toBe("ignored");
    });
});

describe("squareName", () => {
    it("round-trips coordinates", () => {
        expect(squareName(0, 0)).toBe("a1");
        expect(squareName(4, 7)).toBe("e8");
    });
});
