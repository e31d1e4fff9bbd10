// Thin fetch client: one POST per message, one reply per POST.

import type {
    BotTurnResponse, ErrorResponse, ReplayResponse, ServiceResponse,
    StateResponse, TableResponse,
} from "./protocol.js";

export class ServiceError extends Error {
    code: string;
    constructor(code: string, message: string) {
        super(message);
        this.code = code;
    }
}

async function post(body: Record<string, unknown>): Promise<ServiceResponse> {
    const resp = await fetch("/api", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
    });
    return (await resp.json()) as ServiceResponse;
}

function unwrap<T>(resp: ServiceResponse): T {
    if (!resp.ok) {
        const err = (resp as ErrorResponse).error;
        throw new ServiceError(err.code, err.message);
    }
    return resp as unknown as T;
}

export async function newGame(whitePerTurn: number, blackPerTurn: number,
                              humanSide: string, botPolicy: string,
                              seed = 0): Promise<StateResponse> {
    return unwrap(await post({
        type: "new_game",
        white_per_turn: whitePerTurn,
        black_per_turn: blackPerTurn,
        human_side: humanSide,
        bot_policy: botPolicy,
        seed,
    }));
}

export async function getState(session: string): Promise<StateResponse> {
    return unwrap(await post({ type: "get_state", session }));
}

export async function submitMove(session: string, move: string):
        Promise<StateResponse> {
    return unwrap(await post({ type: "submit_move", session, move }));
}

export async function botTurn(session: string): Promise<BotTurnResponse> {
    return unwrap(await post({ type: "bot_turn", session }));
}

export async function listStrategies(): Promise<TableResponse> {
    return unwrap(await post({ type: "list_strategies" }));
}

export async function replayRecord(record: string): Promise<ReplayResponse> {
    return unwrap(await post({ type: "replay_record", record }));
}
