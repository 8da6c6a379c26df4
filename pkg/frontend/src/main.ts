import { GameClient } from "./api.js";
import { App } from "./app.js";
import type { SeatName } from "./types.js";

function param(name: string, fallback: string): string {
    return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

const root = document.getElementById("game");
if (!root) {
    throw new Error("missing #game container");
}

const toastEl = document.getElementById("toast");
const toast = (message: string) => {
    if (!toastEl) return;
    toastEl.textContent = message;
    toastEl.classList.add("visible");
    setTimeout(() => toastEl.classList.remove("visible"), 2500);
};

const client = new GameClient(param("service", ""));
const app = new App({ client, root, toast });

const seat = (param("seat", "P1") === "P2" ? "P2" : "P1") as SeatName;
const seedParam = param("seed", "");
void app.newGame(seat, seedParam ? Number(seedParam) : undefined);

document.getElementById("new-game")?.addEventListener("click", () => {
    void app.newGame(seat);
});
