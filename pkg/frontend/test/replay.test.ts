import { describe, expect, it } from "vitest";

import type { ReplayResponse } from "../src/protocol.js";
import { Replayer } from "../src/replay.js";

// The four-step knight-rush record as served by replay_record.
const RUSH: ReplayResponse = {
    ok: true,
    protocol: 1,
    type: "replay_record",
    initial_xfen: "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1 4 4 1",
    steps: [
        { side: "white", move: "b1a3",
          xfen: "rnbqkbnr/pppppppp/8/8/8/N7/PPPPPPPP/R1BQKBNR w KQkq - 0 1 3 4 1" },
        { side: "white", move: "a3b5",
          xfen: "rnbqkbnr/pppppppp/8/1N6/8/8/PPPPPPPP/R1BQKBNR w KQkq - 0 1 2 4 1" },
        { side: "white", move: "b5c7",
          xfen: "rnbqkbnr/ppNppppp/8/8/8/8/PPPPPPPP/R1BQKBNR w KQkq - 0 1 1 4 1" },
        { side: "white", move: "c7e8",
          xfen: "rnbqNbnr/pp1ppppp/8/8/8/8/PPPPPPPP/R1BQKBNR w KQ - 0 1 0 4 1" },
    ],
    winner: "white",
};

describe("Replayer", () => {
    it("starts at the initial position", () => {
        const r = new Replayer(RUSH);
        const v = r.view();
        expect(v.stepIndex).toBe(0);
        expect(v.xfen).toBe(RUSH.initial_xfen);
        expect(v.lastMove).toBeNull();
    });

    it("steps through all four plies then shows the win banner", () => {
        const r = new Replayer(RUSH);
        let v = r.view();
        for (let i = 1; i <= 4; i++) {
            v = r.next();
            expect(v.stepIndex).toBe(i);
        }
        expect(v.banner).toBe("White captured the king");
        expect(v.lastMove).toBe("c7e8");
        // stepping past the end is a no-op
        expect(r.next().stepIndex).toBe(4);
    });

    it("prev and rewind move backwards", () => {
        const r = new Replayer(RUSH);
        r.next();
        r.next();
        expect(r.prev().stepIndex).toBe(1);
        expect(r.rewind().stepIndex).toBe(0);
        expect(r.prev().stepIndex).toBe(0);
    });

    it("empty record shows only the start position", () => {
        const empty: ReplayResponse = { ...RUSH, steps: [], winner: null };
        const r = new Replayer(empty);
        expect(r.view().xfen).toBe(RUSH.initial_xfen);
        expect(r.next().stepIndex).toBe(0);
        expect(r.view().banner).toBe("step 0 / 0");
    });
});
