// Wiring: variant picker, play view, replay view.

import { BoardElement } from "./board.js";
import * as client from "./client.js";
import { Replayer } from "./replay.js";
import {
    ClickResult, Selection, UiGameView, boardFromXfen, deriveView,
    handleSquareClick, pickerCells,
} from "./state.js";
import type { GameState } from "./protocol.js";

const $ = (id: string) => document.getElementById(id)!;

let session: string | null = null;
let view: UiGameView | null = null;
let selection: Selection = { from: null };
let board: BoardElement;
let replayBoard: BoardElement;
let replayer: Replayer | null = null;
let busy = false;

function setBanner(text: string): void {
    $("banner").textContent = text;
}

function toast(text: string): void {
    const el = $("toast");
    el.textContent = text;
    el.classList.add("show");
    window.setTimeout(() => el.classList.remove("show"), 2600);
}

function applyState(state: GameState): void {
    view = deriveView(state);
    board.setFlipped(state.human_side === "black");
    board.render(view.board);
    setBanner(view.banner);
    $("countdown").textContent = String(view.movesRemaining);
    $("botlabel").textContent = view.botLabel;
    $("history").textContent = state.history;
    selection = { from: null };
    board.highlight(null, []);
}

async function maybeBotTurn(): Promise<void> {
    if (!session || !view || view.gameOver || view.myTurn) {
        return;
    }
    busy = true;
    setBanner("Bot is thinking...");
    try {
        const resp = await client.botTurn(session);
        applyState(resp.state);
        toast(`bot: ${resp.moves.join(" ")}` +
              (resp.fallback ? ` (${resp.policy_used})` : ""));
        if (resp.event === "king-captured") {
            setBanner(deriveView(resp.state).banner);
        }
    } catch (err) {
        toast(String(err));
    } finally {
        busy = false;
    }
}

async function onSquareClick(square: string): Promise<void> {
    if (!view || busy) {
        return;
    }
    const result: ClickResult = handleSquareClick(view, selection, square);
    switch (result.kind) {
        case "ignored":
            return;
        case "cleared":
            selection = { from: null };
            board.highlight(null, []);
            return;
        case "selected":
            selection = { from: result.from };
            board.highlight(result.from, result.targets);
            return;
        case "promotion": {
            const letters = result.options.map((m) => m[4]);
            const pick = window.prompt(
                `promote to (${letters.join("/")})?`, "q") ?? "q";
            const chosen = result.options.find((m) => m[4] === pick)
                ?? result.options[0];
            await sendMove(chosen);
            return;
        }
        case "move":
            await sendMove(result.move);
            return;
    }
}

async function sendMove(move: string): Promise<void> {
    if (!session) {
        return;
    }
    busy = true;
    try {
        const resp = await client.submitMove(session, move);
        applyState(resp.state);
        if (resp.event === "king-captured") {
            return;
        }
    } catch (err) {
        toast(String(err));
    } finally {
        busy = false;
    }
    await maybeBotTurn();
}

async function startGame(whitePerTurn: number, blackPerTurn: number): Promise<void> {
    const humanSide = (document.querySelector(
        "input[name=side]:checked") as HTMLInputElement).value;
    const policy = ($("bot") as HTMLSelectElement).value;
    try {
        const resp = await client.newGame(whitePerTurn, blackPerTurn,
                                          humanSide, policy);
        session = resp.state.session;
        applyState(resp.state);
        if (resp.state.bot.fallback) {
            toast(resp.state.bot.note);
        }
        $("play").classList.remove("hidden");
        $("replay").classList.add("hidden");
        await maybeBotTurn();
    } catch (err) {
        toast(String(err));
    }
}

async function buildPicker(): Promise<void> {
    const grid = $("picker");
    try {
        const resp = await client.listStrategies();
        const cells = pickerCells(resp.table);
        grid.innerHTML = "";
        const corner = document.createElement("div");
        corner.className = "pick head";
        corner.textContent = "W\\B";
        grid.appendChild(corner);
        for (const label of ["1", "2", "3", "4", ">4"]) {
            const h = document.createElement("div");
            h.className = "pick head";
            h.textContent = label;
            grid.appendChild(h);
        }
        let lastRow = "";
        for (const cell of cells) {
            if (cell.whiteLabel !== lastRow) {
                lastRow = cell.whiteLabel;
                const h = document.createElement("div");
                h.className = "pick head";
                h.textContent = cell.whiteLabel;
                grid.appendChild(h);
            }
            const el = document.createElement("div");
            el.className = "pick cell " + (cell.open ? "open" :
                (cell.text.startsWith("White") ? "white-wins" : "black-wins"));
            el.innerHTML = `<b>(${cell.whiteLabel},${cell.blackLabel})</b>` +
                `<span>${cell.text}</span>`;
            el.addEventListener("click", () =>
                startGame(cell.playableWhite, cell.playableBlack));
            grid.appendChild(el);
        }
    } catch (err) {
        toast(`service unreachable: ${err}`);
    }
}

async function startReplay(): Promise<void> {
    const text = ($("record-input") as HTMLTextAreaElement).value;
    try {
        const resp = await client.replayRecord(text);
        replayer = new Replayer(resp);
        $("replay").classList.remove("hidden");
        $("play").classList.add("hidden");
        renderReplay();
    } catch (err) {
        toast(String(err));  // parse errors surface verbatim from the service
    }
}

function renderReplay(): void {
    if (!replayer) {
        return;
    }
    const v = replayer.view();
    replayBoard.render(boardFromXfen(v.xfen));
    $("replay-banner").textContent = v.banner +
        (v.lastMove ? `  (${v.lastSide} ${v.lastMove})` : "");
}

export function init(): void {
    board = new BoardElement($("board"), (sq) => { void onSquareClick(sq); });
    replayBoard = new BoardElement($("replay-board"), () => undefined);
    void buildPicker();
    $("replay-load").addEventListener("click", () => { void startReplay(); });
    $("replay-next").addEventListener("click", () => { replayer?.next(); renderReplay(); });
    $("replay-prev").addEventListener("click", () => { replayer?.prev(); renderReplay(); });
    $("replay-rewind").addEventListener("click", () => { replayer?.rewind(); renderReplay(); });
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
    init();
} else if (typeof document !== "undefined") {
    document.addEventListener("DOMContentLoaded", init);
}
