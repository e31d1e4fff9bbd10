// Message types for the engine service (protocol version 1).
// Boards travel as XFen strings, moves as long-algebraic text; all rules
// live server-side.

export const PROTOCOL_VERSION = 1;

export type ColorName = "white" | "black";

export interface BotInfo {
    requested: string;
    active: string;
    fallback: boolean;
    note: string;
}

export interface GameState {
    session: string;
    xfen: string;
    side_to_move: ColorName;
    moves_remaining: number;
    legal_moves: string[];
    winner: ColorName | null;
    status: "active" | "won";
    human_side: ColorName;
    history: string;
    pending: string[];
    bot: BotInfo;
}

export interface TableCell {
    white_per_turn: string;
    black_per_turn: string;
    winner: ColorName | null;
    strategy: string | null;
}

export interface ReplayStep {
    side: ColorName;
    move: string;
    xfen: string;
}

export interface ErrorBody {
    code: string;
    message: string;
}

interface OkBase {
    ok: true;
    protocol: number;
    type: string;
}

export interface StateResponse extends OkBase {
    state: GameState;
    event?: "king-captured";
}

export interface BotTurnResponse extends StateResponse {
    moves: string[];
    policy_used: string;
    fallback: boolean;
    note: string;
}

export interface TableResponse extends OkBase {
    table: TableCell[];
}

export interface ReplayResponse extends OkBase {
    initial_xfen: string;
    steps: ReplayStep[];
    winner: ColorName | null;
}

export interface ErrorResponse {
    ok: false;
    protocol: number;
    error: ErrorBody;
}

export type ServiceResponse =
    | StateResponse
    | BotTurnResponse
    | TableResponse
    | ReplayResponse
    | ErrorResponse;
