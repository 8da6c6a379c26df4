// Fixed state views used by the render snapshots and the scripted service.

import type { StateView } from "../src/types.js";

export function freshGame(): StateView {
    return {
        id: "fix-fresh",
        toMove: "P1",
        humanSeat: "P1",
        dice: 1,
        legalActions: [21],
        board: [],
        hands: { P1: 4, P2: 4 },
        borneOff: { P1: 0, P2: 0 },
        winner: null,
        history: [],
    };
}

export function midGame(): StateView {
    return {
        id: "fix-mid",
        toMove: "P1",
        humanSeat: "P1",
        dice: 2,
        legalActions: [2, 12, 21],
        board: [
            { row: "a", col: 4, seat: "P1" },
            { row: "b", col: 2, seat: "P1" },
            { row: "b", col: 4, seat: "P2" },
            { row: "c", col: 3, seat: "P2" },
        ],
        hands: { P1: 2, P2: 2 },
        borneOff: { P1: 0, P2: 0 },
        winner: null,
        history: [
            {
                seat: "P1",
                dice: 2,
                action: 21,
                events: {
                    capturedOpponent: false,
                    landedWarRosette: false,
                    landedWarNonrosette: false,
                    borneOff: false,
                    displacedByRosette: false,
                    gameWon: false,
                },
            },
            {
                seat: "P2",
                dice: 1,
                action: 22,
                events: {
                    capturedOpponent: false,
                    landedWarRosette: false,
                    landedWarNonrosette: false,
                    borneOff: false,
                    displacedByRosette: false,
                    gameWon: false,
                },
            },
        ],
    };
}

export function wonGame(): StateView {
    return {
        id: "fix-done",
        toMove: "P2",
        humanSeat: "P1",
        dice: null,
        legalActions: [],
        board: [{ row: "c", col: 7, seat: "P2" }],
        hands: { P1: 0, P2: 1 },
        borneOff: { P1: 4, P2: 2 },
        winner: "P1",
        history: [
            {
                seat: "P1",
                dice: 1,
                action: 13,
                events: {
                    capturedOpponent: false,
                    landedWarRosette: false,
                    landedWarNonrosette: false,
                    borneOff: true,
                    displacedByRosette: false,
                    gameWon: true,
                },
            },
        ],
    };
}

export function passOnly(): StateView {
    const view = midGame();
    return { ...view, id: "fix-pass", dice: 0, legalActions: [0] };
}
