// Application wiring: one in-flight request at a time, render only what the
// service returned, animate the new history entries before unlocking input.

import { GameClient, ServiceRejection } from "./api.js";
import { buildViewModel, renderBoard } from "./board.js";
import type { SeatName, StateView } from "./types.js";

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export interface AppOptions {
    client: GameClient;
    root: HTMLElement;
    toast?: (message: string) => void;
    stepDelayMs?: number; // per history-delta animation pause; 0 in tests
}

export class App {
    private readonly client: GameClient;
    private readonly root: HTMLElement;
    private readonly toast: (message: string) => void;
    private readonly stepDelayMs: number;
    private view: StateView | null = null;
    private busy = false;

    constructor(options: AppOptions) {
        this.client = options.client;
        this.root = options.root;
        this.toast = options.toast ?? (() => undefined);
        this.stepDelayMs = options.stepDelayMs ?? 250;
    }

    get currentView(): StateView | null {
        return this.view;
    }

    get locked(): boolean {
        return this.busy;
    }

    async newGame(humanSeat: SeatName, seed?: number): Promise<void> {
        this.busy = true;
        try {
            this.view = await this.client.createGame({ humanSeat, seed });
            this.render();
        } finally {
            this.busy = false;
        }
    }

    async refresh(): Promise<void> {
        if (!this.view) {
            return;
        }
        this.view = await this.client.getState(this.view.id);
        this.render();
    }

    /** Submit an advertised action; non-advertised input never leaves the client. */
    async chooseAction(action: number): Promise<void> {
        const view = this.view;
        if (!view || this.busy || view.winner !== null) {
            return;
        }
        if (!view.legalActions.includes(action)) {
            return;
        }
        this.busy = true;
        const known = view.history.length;
        try {
            const next = await this.client.submitMove(view.id, action);
            await this.animateDeltas(next, known);
            this.view = next;
            this.render();
        } catch (err) {
            if (err instanceof ServiceRejection) {
                this.toast(err.body.message);
                await this.refresh(); // highlights may be stale; re-sync
            } else {
                this.toast(String(err));
            }
        } finally {
            this.busy = false;
        }
    }

    private async animateDeltas(next: StateView, known: number): Promise<void> {
        if (this.stepDelayMs <= 0) {
            return;
        }
        for (const record of next.history.slice(known)) {
            const flash = document.createElement("div");
            flash.className = "move-flash";
            flash.textContent = `${record.seat}: ${record.action === 0 ? "pass" : "move " + record.action}`;
            if (record.events.capturedOpponent) {
                flash.classList.add("capture");
            }
            this.root.appendChild(flash);
            await sleep(this.stepDelayMs);
            flash.remove();
        }
    }

    private render(): void {
        if (!this.view) {
            return;
        }
        const vm = buildViewModel(this.view);
        renderBoard(this.root, vm, { onAction: (action) => void this.chooseAction(action) });
    }
}
