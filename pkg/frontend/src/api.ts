/*
Typed client for the session service. Every displayed number in the UI
comes from these payloads; the UI never recomputes results.
*/

export interface SessionConfig {
    alpha: number;
    sample_count: number;
    init_radius: number;
    max_iterations: number;
    convergence_force: number;
    functional: string;
    filter: string;
}

export interface SessionView {
    id: string;
    state: "loaded" | "seeded" | "running" | "done" | "failed";
    frame_count: number;
    width: number;
    height: number;
    fps: number;
    pixel_spacing_cm: number;
    seed: { x: number; y: number } | null;
    frames_completed: number;
    error: string | null;
    config: SessionConfig;
}

export interface FrameRow {
    frame_index: number;
    x_c: number;
    y_c: number;
    r_px: number;
    diameter_px: number;
    diameter_cm: number;
    iterations: number;
    converged: boolean;
}

export interface ResultPayload {
    state: string;
    frames_completed: number;
    frame_count: number;
    frames: FrameRow[];
}

export interface SeedRequest {
    x: number;
    y: number;
    alpha?: number;
    sample_count?: number;
    functional?: string;
    filter?: string;
}

export class ApiError extends Error {
    status: number;

    constructor(status: number, detail: string) {
        super(detail);
        this.status = status;
    }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
    private baseUrl: string;
    private fetchFn: FetchLike;

    constructor(baseUrl = "", fetchFn: FetchLike = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl.replace(/\/$/, "");
        this.fetchFn = fetchFn;
    }

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        const response = await this.fetchFn(this.baseUrl + path, {
            method: method,
            headers: body === undefined ? {} : { "Content-Type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (!response.ok) {
            let detail = response.statusText;
            try {
                const payload = await response.json();
                if (payload && typeof payload.detail === "string") {
                    detail = payload.detail;
                }
            } catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(response.status, detail);
        }
        return (await response.json()) as T;
    }

    createSession(source: string, pixelSpacingCm?: number): Promise<SessionView> {
        return this.request("POST", "/sessions", {
            source: source,
            pixel_spacing_cm: pixelSpacingCm ?? null,
        });
    }

    getSession(id: string): Promise<SessionView> {
        return this.request("GET", `/sessions/${id}`);
    }

    seedSession(id: string, seed: SeedRequest): Promise<SessionView> {
        return this.request("POST", `/sessions/${id}/seed`, seed);
    }

    runSession(id: string): Promise<SessionView> {
        return this.request("POST", `/sessions/${id}/run`);
    }

    getResult(id: string): Promise<ResultPayload> {
        return this.request("GET", `/sessions/${id}/result`);
    }

    frameUrl(id: string, index: number): string {
        return `${this.baseUrl}/sessions/${id}/frames/${index}`;
    }

    overlayUrl(id: string, index: number): string {
        return `${this.baseUrl}/sessions/${id}/overlay/${index}`;
    }
}
