// Board-position IDs used on the wire: war zone b1..b8 are 1..8, then the
// private rows in column order (a -> 9..14, c -> 15..20), start pools 21/22,
// finished pools 23/24, and 0 for the forced pass.

import type { RowName, SeatName } from "./types.js";

export const PASS_ACTION = 0;
export const START_POOL: Record<SeatName, number> = { P1: 21, P2: 22 };

export interface SquareRef {
    row: RowName;
    col: number;
}

const PRIVATE_COLS = [1, 2, 3, 4, 7, 8];

const ID_TO_SQUARE = new Map<number, SquareRef>();
for (let col = 1; col <= 8; col++) {
    ID_TO_SQUARE.set(col, { row: "b", col });
}
PRIVATE_COLS.forEach((col, i) => {
    ID_TO_SQUARE.set(9 + i, { row: "a", col });
    ID_TO_SQUARE.set(15 + i, { row: "c", col });
});

export function squareForAction(action: number): SquareRef | null {
    return ID_TO_SQUARE.get(action) ?? null;
}

export function actionForSquare(row: RowName, col: number): number | null {
    for (const [action, sq] of ID_TO_SQUARE) {
        if (sq.row === row && sq.col === col) {
            return action;
        }
    }
    return null;
}

export function startPoolSeat(action: number): SeatName | null {
    if (action === START_POOL.P1) return "P1";
    if (action === START_POOL.P2) return "P2";
    return null;
}
