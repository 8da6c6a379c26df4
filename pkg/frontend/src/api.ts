// Thin client for the game-service JSON API. The fetch implementation is
// injectable so tests can script the service.

import type { CreateGameOptions, ServiceError, StateView } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceRejection extends Error {
    readonly body: ServiceError;

    constructor(body: ServiceError) {
        super(body.message);
        this.body = body;
    }
}

export class GameClient {
    private readonly baseUrl: string;
    private readonly fetchImpl: FetchLike;

    constructor(baseUrl = "", fetchImpl: FetchLike = (...args) => fetch(...args)) {
        this.baseUrl = baseUrl.replace(/\/$/, "");
        this.fetchImpl = fetchImpl;
    }

    private async request(path: string, init?: RequestInit): Promise<StateView> {
        const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
        const body = await response.json();
        if (!response.ok) {
            throw new ServiceRejection(body as ServiceError);
        }
        return body as StateView;
    }

    createGame(options: CreateGameOptions): Promise<StateView> {
        return this.request("/api/games", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(options),
        });
    }

    getState(id: string): Promise<StateView> {
        return this.request(`/api/games/${id}`);
    }

    submitMove(id: string, action: number): Promise<StateView> {
        return this.request(`/api/games/${id}/moves`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ action }),
        });
    }
}
