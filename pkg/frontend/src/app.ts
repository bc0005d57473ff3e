/*
DOM wiring: source form, frame canvas with click-to-seed, overlay playback
and the live diameter chart. All engine work happens server-side; this file
only renders payloads.
*/

import { Client } from "./api.js";
import {
    buildSeries,
    drawChart,
    makeLayout,
    pointNear,
} from "./chart.js";
import { POLL_INTERVAL_MS, SessionController } from "./state.js";
import {
    canvasToPixel,
    fitTransform,
    pixelToCanvas,
    ViewTransform,
} from "./transform.js";

export class App {
    controller: SessionController;
    client: Client;
    private frameCanvas: HTMLCanvasElement;
    private chartCanvas: HTMLCanvasElement;
    private status: HTMLElement;
    private toast: HTMLElement;
    private hover: HTMLElement;
    private transform: ViewTransform | null = null;
    private frameImage: HTMLImageElement | null = null;
    private frameIsOverlay = false;
    private shownFrame = -1;
    private pollTimer: number | null = null;
    private playTimer: number | null = null;

    constructor(root: Document, client?: Client) {
        this.client = client ?? new Client("");
        this.controller = new SessionController(this.client);
        this.frameCanvas = root.getElementById("frame-canvas") as HTMLCanvasElement;
        this.chartCanvas = root.getElementById("chart-canvas") as HTMLCanvasElement;
        this.status = root.getElementById("status") as HTMLElement;
        this.toast = root.getElementById("toast") as HTMLElement;
        this.hover = root.getElementById("hover-readout") as HTMLElement;

        (root.getElementById("load-form") as HTMLFormElement).addEventListener(
            "submit",
            (event) => {
                event.preventDefault();
                void this.onLoad(root);
            },
        );
        (root.getElementById("run-button") as HTMLButtonElement).addEventListener(
            "click",
            () => void this.onRun(),
        );
        (root.getElementById("play-button") as HTMLButtonElement).addEventListener(
            "click",
            () => {
                this.controller.view.playing = !this.controller.view.playing;
                this.render();
            },
        );
        this.frameCanvas.addEventListener("click", (event) => void this.onCanvasClick(event, root));
        this.chartCanvas.addEventListener("mousemove", (event) => this.onChartHover(event));
    }

    private async onLoad(root: Document): Promise<void> {
        const source = (root.getElementById("source-input") as HTMLInputElement).value.trim();
        await this.controller.load(source);
        const view = this.controller.view;
        if (view.sessionId !== null) {
            this.transform = fitTransform(
                view.width,
                view.height,
                this.frameCanvas.width,
                this.frameCanvas.height,
            );
            this.startPolling();
            this.startPlayback();
        }
        this.render();
    }

    private configOverrides(root: Document) {
        const overrides: { alpha?: number; sample_count?: number; functional?: string; filter?: string } = {};
        const alpha = (root.getElementById("alpha-input") as HTMLInputElement).value.trim();
        if (alpha !== "") {
            overrides.alpha = Number(alpha);
        }
        const samples = (root.getElementById("samples-input") as HTMLInputElement).value.trim();
        if (samples !== "") {
            overrides.sample_count = Number(samples);
        }
        const functional = (root.getElementById("functional-select") as HTMLSelectElement).value;
        if (functional !== "") {
            overrides.functional = functional;
        }
        const filter = (root.getElementById("filter-select") as HTMLSelectElement).value;
        if (filter !== "") {
            overrides.filter = filter;
        }
        return overrides;
    }

    private async onCanvasClick(event: MouseEvent, root: Document): Promise<void> {
        if (this.transform === null) {
            this.controller.view.hint = "load a video before seeding";
            this.render();
            return;
        }
        const rect = this.frameCanvas.getBoundingClientRect();
        const pixel = canvasToPixel(this.transform, {
            x: event.clientX - rect.left,
            y: event.clientY - rect.top,
        });
        await this.controller.seedAt(pixel, this.configOverrides(root));
        this.render();
    }

    private async onRun(): Promise<void> {
        await this.controller.start();
        this.render();
    }

    private startPolling(): void {
        if (this.pollTimer !== null) {
            clearInterval(this.pollTimer);
        }
        this.pollTimer = setInterval(() => {
            void this.controller
                .poll()
                .then(() => this.render())
                .catch(() => undefined);
        }, POLL_INTERVAL_MS) as unknown as number;
    }

    private startPlayback(): void {
        if (this.playTimer !== null) {
            clearInterval(this.playTimer);
        }
        const fps = this.controller.view.fps > 0 ? this.controller.view.fps : 30;
        this.playTimer = setInterval(() => {
            this.controller.tick();
            this.render();
        }, 1000 / fps) as unknown as number;
    }

    private onChartHover(event: MouseEvent): void {
        const view = this.controller.view;
        const series = buildSeries(view.series);
        const layout = makeLayout(
            this.chartCanvas.width,
            this.chartCanvas.height,
            view.frameCount,
            series,
        );
        const rect = this.chartCanvas.getBoundingClientRect();
        const point = pointNear(series, layout, event.clientX - rect.left);
        this.hover.textContent =
            point === null
                ? ""
                : `frame ${point.frame}: ${point.diameterCm.toFixed(4)} cm${point.converged ? "" : " (not converged)"}`;
    }

    /** Redraw everything from the current view state. */
    render(): void {
        const view = this.controller.view;
        this.status.textContent =
            view.sessionId === null
                ? "no session"
                : `session ${view.sessionId} | ${view.phase} | frame ${view.currentFrame + 1}/${view.frameCount}` +
                  (view.phase === "running" ? ` | ${view.framesCompleted} tracked` : "");
        this.toast.textContent = view.error ?? view.hint ?? "";
        this.toast.className = view.error !== null ? "toast error" : view.hint !== null ? "toast hint" : "toast";
        this.renderFrame();
        this.renderChart();
    }

    private renderFrame(): void {
        const view = this.controller.view;
        if (view.sessionId === null || this.transform === null) {
            return;
        }
        const frame = view.currentFrame;
        const hasResult = view.series[frame] !== null && view.series[frame] !== undefined;
        if (this.shownFrame !== frame || this.frameIsOverlay !== hasResult) {
            const url = hasResult
                ? this.client.overlayUrl(view.sessionId, frame)
                : this.client.frameUrl(view.sessionId, frame);
            const image = new Image();
            image.onload = () => {
                this.frameImage = image;
                this.drawFrameImage(image);
            };
            image.onerror = () => {
                // overlay not available: fall back to the plain frame
                if (hasResult) {
                    const plain = new Image();
                    plain.onload = () => {
                        this.frameImage = plain;
                        this.drawFrameImage(plain);
                    };
                    plain.src = this.client.frameUrl(view.sessionId as string, frame);
                }
            };
            image.src = url;
            this.shownFrame = frame;
            this.frameIsOverlay = hasResult;
        } else if (this.frameImage !== null) {
            this.drawFrameImage(this.frameImage);
        }
    }

    private drawFrameImage(image: HTMLImageElement): void {
        const ctx = this.frameCanvas.getContext("2d");
        if (ctx === null || this.transform === null) {
            return;
        }
        const view = this.controller.view;
        ctx.clearRect(0, 0, this.frameCanvas.width, this.frameCanvas.height);
        ctx.imageSmoothingEnabled = false;
        ctx.drawImage(
            image,
            this.transform.offsetX,
            this.transform.offsetY,
            view.width * this.transform.zoom,
            view.height * this.transform.zoom,
        );
        if (view.seed !== null) {
            const c = pixelToCanvas(this.transform, view.seed);
            ctx.strokeStyle = "#ff5470";
            ctx.beginPath();
            ctx.moveTo(c.x - 6, c.y);
            ctx.lineTo(c.x + 6, c.y);
            ctx.moveTo(c.x, c.y - 6);
            ctx.lineTo(c.x, c.y + 6);
            ctx.stroke();
        }
    }

    private renderChart(): void {
        const ctx = this.chartCanvas.getContext("2d");
        if (ctx === null) {
            return;
        }
        const view = this.controller.view;
        const series = buildSeries(view.series);
        const layout = makeLayout(
            this.chartCanvas.width,
            this.chartCanvas.height,
            view.frameCount,
            series,
        );
        drawChart(ctx, series, layout, view.sessionId === null ? null : view.currentFrame);
    }
}
