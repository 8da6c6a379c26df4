// Wire types of the game-service JSON API.

export type SeatName = "P1" | "P2";
export type RowName = "a" | "b" | "c";

export interface MoveEventsView {
    capturedOpponent: boolean;
    landedWarRosette: boolean;
    landedWarNonrosette: boolean;
    borneOff: boolean;
    displacedByRosette: boolean;
    gameWon: boolean;
}

export interface MoveRecordView {
    seat: SeatName;
    dice: number;
    action: number;
    events: MoveEventsView;
}

export interface BoardCell {
    row: RowName;
    col: number;
    seat: SeatName;
}

export interface StateView {
    id: string;
    toMove: SeatName;
    humanSeat: SeatName;
    dice: number | null;
    legalActions: number[];
    board: BoardCell[];
    hands: Record<SeatName, number>;
    borneOff: Record<SeatName, number>;
    winner: SeatName | null;
    history: MoveRecordView[];
}

export interface ServiceError {
    error: string;
    message: string;
    legalActions?: number[];
}

export interface CreateGameOptions {
    humanSeat: SeatName;
    seed?: number;
    pieces?: number;
    dice?: number;
}
