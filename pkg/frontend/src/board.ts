// DOM board renderer: an 8x8 grid of divs, glyph pieces, highlight classes.

import { squareName } from "./state.js";

const GLYPHS: Record<string, string> = {
    K: "♔", Q: "♕", R: "♖", B: "♗", N: "♘", P: "♙",
    k: "♚", q: "♛", r: "♜", b: "♝", n: "♞", p: "♟",
};

export type SquareClickHandler = (square: string) => void;

export class BoardElement {
    readonly root: HTMLElement;
    private cells = new Map<string, HTMLElement>();
    private flipped = false;

    constructor(root: HTMLElement, onClick: SquareClickHandler) {
        this.root = root;
        root.classList.add("board");
        for (let r = 7; r >= 0; r--) {
            for (let f = 0; f < 8; f++) {
                const cell = document.createElement("div");
                const name = squareName(f, r);
                cell.dataset.square = name;
                cell.className = "sq " + (((f + r) % 2 === 0) ? "dark" : "light");
                cell.addEventListener("click", () => onClick(name));
                root.appendChild(cell);
                this.cells.set(name, cell);
            }
        }
    }

    setFlipped(flipped: boolean): void {
        if (flipped !== this.flipped) {
            this.flipped = flipped;
            this.root.classList.toggle("flipped", flipped);
        }
    }

    render(board: (string | null)[][]): void {
        for (let r = 0; r < 8; r++) {
            for (let f = 0; f < 8; f++) {
                const cell = this.cells.get(squareName(f, r))!;
                const piece = board[r][f];
                cell.textContent = piece ? GLYPHS[piece] : "";
            }
        }
    }

    highlight(selected: string | null, targets: string[]): void {
        for (const [name, cell] of this.cells) {
            cell.classList.toggle("selected", name === selected);
            cell.classList.toggle("target", targets.includes(name));
        }
    }
}
