// Step-through playback of a game record served by replay_record.

import type { ReplayResponse } from "./protocol.js";

export interface ReplayView {
    xfen: string;
    stepIndex: number;      // 0 = initial position
    stepCount: number;
    lastMove: string | null;
    lastSide: string | null;
    banner: string;
}

export class Replayer {
    private data: ReplayResponse;
    private index = 0;

    constructor(data: ReplayResponse) {
        this.data = data;
    }

    view(): ReplayView {
        const { steps, winner } = this.data;
        const atEnd = this.index === steps.length;
        let banner = `step ${this.index} / ${steps.length}`;
        if (atEnd && winner !== null) {
            const who = winner === "white" ? "White" : "Black";
            banner = `${who} captured the king`;
        }
        const last = this.index > 0 ? steps[this.index - 1] : null;
        return {
            xfen: last ? last.xfen : this.data.initial_xfen,
            stepIndex: this.index,
            stepCount: steps.length,
            lastMove: last ? last.move : null,
            lastSide: last ? last.side : null,
            banner,
        };
    }

    next(): ReplayView {
        if (this.index < this.data.steps.length) {
            this.index += 1;
        }
        return this.view();
    }

    prev(): ReplayView {
        if (this.index > 0) {
            this.index -= 1;
        }
        return this.view();
    }

    rewind(): ReplayView {
        this.index = 0;
        return this.view();
    }
}
