// View-model construction and DOM rendering for the 20-square board.
// Rendering is a pure function of the service state view: the client keeps
// no game state of its own beyond the session id.

import { PASS_ACTION, START_POOL, squareForAction, actionForSquare } from "./actions.js";
import type { RowName, SeatName, StateView } from "./types.js";

export type ZoneName = "safe" | "war" | "war-rosette" | "private-rosette";

export interface CellViewModel {
    row: RowName;
    col: number;
    zone: ZoneName;
    occupant: SeatName | null;
    action: number | null; // advertised action ID when this cell is clickable
}

export interface TrayViewModel {
    seat: SeatName;
    hand: number;
    borneOff: number;
    action: number | null; // advertised start-pool action ID, if any
}

export interface BoardViewModel {
    cells: CellViewModel[];
    trays: Record<SeatName, TrayViewModel>;
    dice: number | null;
    banner: string;
    passAction: boolean;
    winner: SeatName | null;
    log: string[];
}

const PRIVATE_COLS = [1, 2, 3, 4, 7, 8];
const ROSETTES = new Set(["a1", "c1", "b4", "a7", "c7"]);

function zoneOf(row: RowName, col: number): ZoneName {
    const starred = ROSETTES.has(`${row}${col}`);
    if (row === "b") {
        return starred ? "war-rosette" : "war";
    }
    return starred ? "private-rosette" : "safe";
}

function describeMove(record: StateView["history"][number]): string {
    const sq = squareForAction(record.action);
    let what: string;
    if (record.action === PASS_ACTION) {
        what = "passes";
    } else if (record.action === START_POOL.P1 || record.action === START_POOL.P2) {
        what = "enters a piece";
    } else if (sq) {
        what = `moves ${sq.row}${sq.col}`;
    } else {
        what = `plays ${record.action}`;
    }
    const notes: string[] = [];
    if (record.events.displacedByRosette) notes.push("bounced off the rosette");
    if (record.events.capturedOpponent) notes.push("capture!");
    if (record.events.landedWarRosette) notes.push("claims the rosette");
    if (record.events.borneOff) notes.push("bears off");
    if (record.events.gameWon) notes.push("wins the game");
    const suffix = notes.length ? ` (${notes.join(", ")})` : "";
    return `${record.seat} rolls ${record.dice}, ${what}${suffix}`;
}

export function buildViewModel(view: StateView): BoardViewModel {
    const advertised = new Set(view.legalActions);
    const humanTurn = view.winner === null && view.toMove === view.humanSeat;

    const occupancy = new Map<string, SeatName>();
    for (const cell of view.board) {
        occupancy.set(`${cell.row}${cell.col}`, cell.seat);
    }

    const cells: CellViewModel[] = [];
    for (const row of ["a", "b", "c"] as RowName[]) {
        const cols = row === "b" ? [1, 2, 3, 4, 5, 6, 7, 8] : PRIVATE_COLS;
        for (const col of cols) {
            const occupant = occupancy.get(`${row}${col}`) ?? null;
            const action = actionForSquare(row, col);
            const clickable =
                humanTurn &&
                action !== null &&
                advertised.has(action) &&
                occupant === view.humanSeat;
            cells.push({
                row,
                col,
                zone: zoneOf(row, col),
                occupant,
                action: clickable ? action : null,
            });
        }
    }

    const trays = {} as Record<SeatName, TrayViewModel>;
    for (const seat of ["P1", "P2"] as SeatName[]) {
        const poolAction = START_POOL[seat];
        const clickable = humanTurn && seat === view.humanSeat && advertised.has(poolAction);
        trays[seat] = {
            seat,
            hand: view.hands[seat],
            borneOff: view.borneOff[seat],
            action: clickable ? poolAction : null,
        };
    }

    let banner: string;
    if (view.winner !== null) {
        banner = view.winner === view.humanSeat ? "You win!" : "The agent wins.";
    } else if (humanTurn) {
        banner = `Your turn — you rolled ${view.dice}`;
    } else {
        banner = "Agent is thinking…";
    }

    return {
        cells,
        trays,
        dice: view.dice,
        banner,
        passAction: humanTurn && advertised.has(PASS_ACTION),
        winner: view.winner,
        log: view.history.map(describeMove),
    };
}

export interface RenderHandlers {
    onAction: (action: number) => void;
}

export function renderBoard(root: HTMLElement, vm: BoardViewModel, handlers: RenderHandlers): void {
    root.textContent = "";
    root.classList.toggle("game-over", vm.winner !== null);

    const banner = document.createElement("div");
    banner.className = "banner" + (vm.winner !== null ? " victory" : "");
    banner.textContent = vm.banner;
    root.appendChild(banner);

    const dice = document.createElement("div");
    dice.className = "dice";
    dice.textContent = vm.dice === null ? "—" : `dice: ${vm.dice}`;
    root.appendChild(dice);

    const board = document.createElement("div");
    board.className = "board";
    for (const row of ["a", "b", "c"] as RowName[]) {
        const rowEl = document.createElement("div");
        rowEl.className = `board-row row-${row}`;
        for (let col = 1; col <= 8; col++) {
            const cell = vm.cells.find((c) => c.row === row && c.col === col);
            const cellEl = document.createElement("div");
            if (!cell) {
                cellEl.className = "cell void";
                rowEl.appendChild(cellEl);
                continue;
            }
            cellEl.className = `cell zone-${cell.zone}`;
            cellEl.dataset.square = `${row}${col}`;
            if (cell.zone === "war-rosette" || cell.zone === "private-rosette") {
                cellEl.classList.add("rosette");
            }
            if (cell.occupant) {
                const piece = document.createElement("span");
                piece.className = `piece seat-${cell.occupant}`;
                piece.textContent = cell.occupant === "P1" ? "●" : "○";
                cellEl.appendChild(piece);
            }
            if (cell.action !== null) {
                cellEl.classList.add("highlight");
                cellEl.dataset.action = String(cell.action);
                cellEl.addEventListener("click", () => handlers.onAction(cell.action!));
            }
            rowEl.appendChild(cellEl);
        }
        board.appendChild(rowEl);
    }
    root.appendChild(board);

    const trays = document.createElement("div");
    trays.className = "trays";
    for (const seat of ["P1", "P2"] as SeatName[]) {
        const tray = vm.trays[seat];
        const trayEl = document.createElement("div");
        trayEl.className = `tray tray-${seat}`;
        trayEl.textContent = `${seat} — hand ${tray.hand}, home ${tray.borneOff}`;
        if (tray.action !== null) {
            trayEl.classList.add("highlight");
            trayEl.dataset.action = String(tray.action);
            trayEl.addEventListener("click", () => handlers.onAction(tray.action!));
        }
        trays.appendChild(trayEl);
    }
    root.appendChild(trays);

    if (vm.passAction) {
        const pass = document.createElement("button");
        pass.className = "pass-button highlight";
        pass.dataset.action = String(PASS_ACTION);
        pass.textContent = "Pass (no legal move)";
        pass.addEventListener("click", () => handlers.onAction(PASS_ACTION));
        root.appendChild(pass);
    }

    const log = document.createElement("ol");
    log.className = "move-log";
    for (const line of vm.log) {
        const item = document.createElement("li");
        item.textContent = line;
        log.appendChild(item);
    }
    root.appendChild(log);
}
