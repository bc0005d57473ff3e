/*
Session state held by the UI and the controller that drives it against the
service. The view object is re-rendered wholesale after every change; all
numbers in it come from service payloads.
*/

import { ApiError, Client, FrameRow, SeedRequest, SessionView } from "./api.js";
import { insideImage, Point } from "./transform.js";

export type Phase = "idle" | "loaded" | "seeded" | "running" | "done" | "failed";

export interface ConfigForm {
    alpha: number | null;
    sampleCount: number | null;
    functional: string | null;
    filter: string | null;
}

export interface UiSessionView {
    sessionId: string | null;
    phase: Phase;
    frameCount: number;
    width: number;
    height: number;
    fps: number;
    currentFrame: number;
    playing: boolean;
    seed: Point | null;
    /** per-frame rows received so far; null = not yet computed */
    series: (FrameRow | null)[];
    framesCompleted: number;
    error: string | null;
    hint: string | null;
}

export function freshView(): UiSessionView {
    return {
        sessionId: null,
        phase: "idle",
        frameCount: 0,
        width: 0,
        height: 0,
        fps: 30,
        currentFrame: 0,
        playing: false,
        seed: null,
        series: [],
        framesCompleted: 0,
        error: null,
        hint: null,
    };
}

export const POLL_INTERVAL_MS = 250;

export class SessionController {
    client: Client;
    view: UiSessionView;

    constructor(client: Client, view?: UiSessionView) {
        this.client = client;
        this.view = view ?? freshView();
    }

    private absorb(session: SessionView): void {
        this.view.sessionId = session.id;
        this.view.phase = session.state;
        this.view.frameCount = session.frame_count;
        this.view.width = session.width;
        this.view.height = session.height;
        this.view.fps = session.fps;
        this.view.framesCompleted = session.frames_completed;
        if (session.seed !== null) {
            this.view.seed = { x: session.seed.x, y: session.seed.y };
        }
        if (session.state === "failed") {
            this.view.error = session.error ?? "tracking failed";
        }
    }

    async load(source: string, pixelSpacingCm?: number): Promise<void> {
        this.view = freshView();
        try {
            const session = await this.client.createSession(source, pixelSpacingCm);
            this.absorb(session);
            this.view.series = new Array(session.frame_count).fill(null);
        } catch (error) {
            this.view.error = describeError(error);
        }
    }

    /** Seed from a click already converted to pixel coordinates. */
    async seedAt(pixel: Point, overrides?: Partial<SeedRequest>): Promise<void> {
        this.view.hint = null;
        if (this.view.sessionId === null) {
            this.view.hint = "load a video before seeding";
            return;
        }
        if (!insideImage(this.view.width, this.view.height, pixel)) {
            this.view.hint = "click inside the image to seed";
            return;
        }
        try {
            const session = await this.client.seedSession(this.view.sessionId, {
                x: pixel.x,
                y: pixel.y,
                ...overrides,
            });
            this.view.error = null;
            this.absorb(session);
            this.view.seed = { x: pixel.x, y: pixel.y };
        } catch (error) {
            this.view.seed = null;
            this.view.error = describeError(error);
        }
    }

    async start(): Promise<void> {
        if (this.view.sessionId === null) {
            this.view.hint = "load a video and seed it first";
            return;
        }
        try {
            const session = await this.client.runSession(this.view.sessionId);
            this.view.error = null;
            this.absorb(session);
            this.view.playing = true;
        } catch (error) {
            this.view.error = describeError(error);
        }
    }

    /** One polling step: refresh state and pull the completed result prefix. */
    async poll(): Promise<void> {
        if (this.view.sessionId === null) {
            return;
        }
        const session = await this.client.getSession(this.view.sessionId);
        this.absorb(session);
        if (
            session.frames_completed > countKnown(this.view.series) ||
            (session.state === "done" && countKnown(this.view.series) < session.frame_count)
        ) {
            const payload = await this.client.getResult(this.view.sessionId);
            for (const row of payload.frames) {
                this.view.series[row.frame_index] = row;
            }
            this.view.framesCompleted = payload.frames_completed;
        }
    }

    /** Advance playback by one frame (called at the video frame rate). */
    tick(): void {
        if (!this.view.playing || this.view.frameCount === 0) {
            return;
        }
        this.view.currentFrame = (this.view.currentFrame + 1) % this.view.frameCount;
    }
}

function countKnown(series: (FrameRow | null)[]): number {
    let known = 0;
    for (const row of series) {
        if (row !== null) {
            known += 1;
        }
    }
    return known;
}

export function describeError(error: unknown): string {
    if (error instanceof ApiError) {
        return `error ${error.status}: ${error.message}`;
    }
    return error instanceof Error ? error.message : String(error);
}
