/*
End-to-end flow against the real service: spawn `apcircle serve`, create a
session from a phantom spec, seed by a simulated canvas click, run, poll to
completion, and verify the chart series equals the /result payload value
for value. Requires the Python package to be installed.
*/

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";
import { buildSeries, extremes } from "../src/chart.js";
import { SessionController } from "../src/state.js";
import { canvasToPixel, fitTransform, pixelToCanvas } from "../src/transform.js";

const PORT = 8731;
const BASE = `http://127.0.0.1:${PORT}`;

const SPEC = `
width = 96
height = 96
frame_count = 10
center_x = 48
center_y = 48
base_diameter = 30
amplitude = 5
period = 20
rng_seed = 3
`;

let server: ChildProcess | null = null;
let specPath = "";

async function serviceUp(): Promise<boolean> {
    try {
        const response = await fetch(`${BASE}/sessions/nonexistent`);
        return response.status === 404;
    } catch {
        return false;
    }
}

beforeAll(async () => {
    const dir = mkdtempSync(join(tmpdir(), "apcircle-e2e-"));
    specPath = join(dir, "clip.phantom");
    writeFileSync(specPath, SPEC);

    server = spawn("apcircle", ["serve", "--port", String(PORT)], {
        stdio: "ignore",
    });
    const deadline = Date.now() + 30_000;
    while (Date.now() < deadline) {
        if (await serviceUp()) {
            return;
        }
        await new Promise((resolve) => setTimeout(resolve, 200));
    }
    throw new Error("apcircle serve did not come up; is the package installed?");
}, 40_000);

afterAll(() => {
    server?.kill();
});

describe("end-to-end annotation flow", () => {
    it("create -> click-seed -> run -> chart equals /result payload", async () => {
        const client = new Client(BASE);
        const controller = new SessionController(client);

        await controller.load(specPath);
        expect(controller.view.error).toBeNull();
        expect(controller.view.phase).toBe("loaded");
        expect(controller.view.frameCount).toBe(10);

        // simulate the operator click at the displayed vessel center
        const t = fitTransform(controller.view.width, controller.view.height, 576, 576);
        const clickCanvas = pixelToCanvas(t, { x: 48, y: 48 });
        const clicked = canvasToPixel(t, clickCanvas);
        expect(Math.abs(clicked.x - 48)).toBeLessThan(2);
        expect(Math.abs(clicked.y - 48)).toBeLessThan(2);
        await controller.seedAt(clicked);
        expect(controller.view.error).toBeNull();
        expect(controller.view.phase).toBe("seeded");

        await controller.start();
        expect(controller.view.error).toBeNull();

        const deadline = Date.now() + 30_000;
        while (controller.view.phase === "running" || controller.view.phase === "seeded") {
            if (Date.now() > deadline) {
                throw new Error("tracking did not finish in time");
            }
            await new Promise((resolve) => setTimeout(resolve, 100));
            await controller.poll();
        }
        expect(controller.view.phase).toBe("done");

        // one chart point per frame, byte-equal to the payload
        const payload = await client.getResult(controller.view.sessionId!);
        expect(payload.frames).toHaveLength(10);
        const series = buildSeries(controller.view.series);
        expect(series).toHaveLength(10);
        for (const row of payload.frames) {
            const point = series[row.frame_index]!;
            expect(point.diameterCm).toBe(row.diameter_cm);
            expect(point.converged).toBe(row.converged);
        }
        const ex = extremes(series)!;
        const payloadDiameters = payload.frames.map((row) => row.diameter_cm);
        expect(ex.dMax).toBe(Math.max(...payloadDiameters));
        expect(ex.dMin).toBe(Math.min(...payloadDiameters));

        // overlay and frame endpoints serve images for the tracked frames
        const overlay = await fetch(client.overlayUrl(controller.view.sessionId!, 0));
        expect(overlay.status).toBe(200);
        expect(overlay.headers.get("content-type")).toBe("image/png");
    }, 60_000);

    it("run before seed surfaces the 409 as a user-visible error", async () => {
        const client = new Client(BASE);
        const controller = new SessionController(client);
        await controller.load(specPath);
        expect(controller.view.phase).toBe("loaded");

        await controller.start();
        expect(controller.view.error).not.toBeNull();
        expect(controller.view.error).toMatch(/409/);

        // the raw client reports the same status
        await expect(client.runSession(controller.view.sessionId!)).rejects.toThrowError(
            ApiError,
        );
    }, 30_000);
});
