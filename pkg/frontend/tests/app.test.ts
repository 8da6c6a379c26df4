import { beforeEach, describe, expect, it } from "vitest";

import { GameClient } from "../src/api.js";
import { App } from "../src/app.js";
import type { StateView } from "../src/types.js";
import { freshGame, midGame, wonGame } from "./fixtures.js";

interface Scripted {
    client: GameClient;
    requests: { url: string; body?: unknown }[];
}

/** Fetch stub that walks a fixed list of responses. */
function scriptedService(responses: (StateView | { status: number; body: unknown })[]): Scripted {
    const requests: { url: string; body?: unknown }[] = [];
    let cursor = 0;
    const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
        requests.push({ url, body: init?.body ? JSON.parse(String(init.body)) : undefined });
        const next = responses[cursor];
        if (next === undefined) {
            throw new Error(`no scripted response left for ${url}`);
        }
        cursor += 1;
        if ("status" in next && "body" in next && typeof next.status === "number") {
            return new Response(JSON.stringify(next.body), { status: next.status });
        }
        return new Response(JSON.stringify(next), { status: 200 });
    };
    return { client: new GameClient("", fetchImpl), requests };
}

function makeApp(script: Scripted): { app: App; root: HTMLElement; toasts: string[] } {
    const root = document.createElement("main");
    document.body.appendChild(root);
    const toasts: string[] = [];
    const app = new App({
        client: script.client,
        root,
        toast: (m) => toasts.push(m),
        stepDelayMs: 0,
    });
    return { app, root, toasts };
}

beforeEach(() => {
    document.body.innerHTML = "";
});

describe("App", () => {
    it("creates a game and renders the opening state", async () => {
        const script = scriptedService([freshGame()]);
        const { app, root } = makeApp(script);
        await app.newGame("P1", 7);
        expect(script.requests).toHaveLength(1);
        expect(script.requests[0].url).toBe("/api/games");
        expect(script.requests[0].body).toEqual({ humanSeat: "P1", seed: 7 });
        expect(root.querySelector(".tray-P1.highlight")).not.toBeNull();
    });

    it("never submits a non-advertised action", async () => {
        const script = scriptedService([midGame()]);
        const { app } = makeApp(script);
        await app.newGame("P1");
        await app.chooseAction(5); // not in legalActions
        await app.chooseAction(0);
        expect(script.requests).toHaveLength(1); // only the create call
    });

    it("ignores clicks on non-highlighted cells", async () => {
        const script = scriptedService([midGame()]);
        const { app, root } = makeApp(script);
        await app.newGame("P1");
        const idle = root.querySelector('[data-square="b7"]') as HTMLElement;
        idle.click();
        await Promise.resolve();
        expect(script.requests).toHaveLength(1);
    });

    it("submits advertised clicks and rerenders from the response", async () => {
        const after = midGame();
        after.board = after.board.filter((c) => !(c.row === "b" && c.col === 2));
        after.board.push({ row: "b", col: 6, seat: "P1" });
        after.legalActions = [6, 21];
        const script = scriptedService([midGame(), after]);
        const { app, root } = makeApp(script);
        await app.newGame("P1");
        const cell = root.querySelector('[data-action="2"]') as HTMLElement;
        cell.click();
        await vi_waitForIdle(app);
        expect(script.requests).toHaveLength(2);
        expect(script.requests[1].url).toContain("/moves");
        expect(script.requests[1].body).toEqual({ action: 2 });
        expect(root.querySelector('[data-square="b6"] .piece')).not.toBeNull();
    });

    it("shows a toast and resyncs when the service rejects", async () => {
        const rejection = {
            status: 400,
            body: { error: "illegal_action", message: "not currently legal", legalActions: [21] },
        };
        const script = scriptedService([midGame(), rejection, midGame()]);
        const { app, toasts } = makeApp(script);
        await app.newGame("P1");
        await app.chooseAction(2);
        expect(toasts).toEqual(["not currently legal"]);
        expect(script.requests).toHaveLength(3); // create, rejected move, resync GET
        expect(script.requests[2].url).toBe("/api/games/fix-mid");
    });

    it("replays a winning game to the victory state", async () => {
        const script = scriptedService([midGame(), wonGame()]);
        const { app, root } = makeApp(script);
        await app.newGame("P1");
        const cell = root.querySelector('[data-action="12"]') as HTMLElement;
        cell.click();
        await vi_waitForIdle(app);
        expect(root.querySelector(".banner.victory")?.textContent).toBe("You win!");
        expect(root.querySelectorAll("[data-action]")).toHaveLength(0);
        // further input is a no-op
        await app.chooseAction(13);
        expect(script.requests).toHaveLength(2);
    });

    it("locks input while a request is in flight", async () => {
        let release: (value: Response) => void = () => undefined;
        const gate = new Promise<Response>((resolve) => (release = resolve));
        const requests: string[] = [];
        const client = new GameClient("", async (url, init) => {
            requests.push(url);
            if (requests.length === 1) {
                return new Response(JSON.stringify(midGame()), { status: 200 });
            }
            return gate;
        });
        const root = document.createElement("main");
        document.body.appendChild(root);
        const app = new App({ client, root, stepDelayMs: 0 });
        await app.newGame("P1");
        const first = app.chooseAction(2);
        expect(app.locked).toBe(true);
        await app.chooseAction(21); // swallowed: a request is in flight
        release(new Response(JSON.stringify(wonGame()), { status: 200 }));
        await first;
        expect(requests).toHaveLength(2);
    });
});

async function vi_waitForIdle(app: App): Promise<void> {
    for (let i = 0; i < 50 && app.locked; i++) {
        await new Promise((resolve) => setTimeout(resolve, 1));
    }
    await new Promise((resolve) => setTimeout(resolve, 1));
}
