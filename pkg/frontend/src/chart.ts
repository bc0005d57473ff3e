/*
Diameter trace: series assembly from result payloads and canvas drawing.
Missing frames (no result yet, or a failed run step) leave gaps in the
polyline; non-converged frames are flagged visually.
*/

import { FrameRow } from "./api.js";

export interface ChartPoint {
    frame: number;
    diameterCm: number;
    converged: boolean;
}

export interface ChartLayout {
    width: number;
    height: number;
    frameCount: number;
    dMin: number;
    dMax: number;
    padding: number;
}

export function buildSeries(rows: (FrameRow | null)[]): (ChartPoint | null)[] {
    return rows.map((row, index) =>
        row === null
            ? null
            : { frame: index, diameterCm: row.diameter_cm, converged: row.converged },
    );
}

export interface Extremes {
    dMax: number;
    dMin: number;
    frameOfMax: number;
    frameOfMin: number;
}

export function extremes(series: (ChartPoint | null)[]): Extremes | null {
    let best: Extremes | null = null;
    for (const point of series) {
        if (point === null) {
            continue;
        }
        if (best === null) {
            best = {
                dMax: point.diameterCm,
                dMin: point.diameterCm,
                frameOfMax: point.frame,
                frameOfMin: point.frame,
            };
            continue;
        }
        if (point.diameterCm > best.dMax) {
            best.dMax = point.diameterCm;
            best.frameOfMax = point.frame;
        }
        if (point.diameterCm < best.dMin) {
            best.dMin = point.diameterCm;
            best.frameOfMin = point.frame;
        }
    }
    return best;
}

export function makeLayout(
    width: number,
    height: number,
    frameCount: number,
    series: (ChartPoint | null)[],
): ChartLayout {
    const ex = extremes(series);
    const dMin = ex === null ? 0 : ex.dMin;
    const dMax = ex === null ? 1 : ex.dMax;
    const span = Math.max(dMax - dMin, 1e-9);
    return {
        width: width,
        height: height,
        frameCount: Math.max(frameCount, 1),
        dMin: dMin - 0.05 * span,
        dMax: dMax + 0.05 * span,
        padding: 28,
    };
}

export function toCanvasX(layout: ChartLayout, frame: number): number {
    const usable = layout.width - 2 * layout.padding;
    return layout.padding + (frame / Math.max(layout.frameCount - 1, 1)) * usable;
}

export function toCanvasY(layout: ChartLayout, diameterCm: number): number {
    const usable = layout.height - 2 * layout.padding;
    const t = (diameterCm - layout.dMin) / (layout.dMax - layout.dMin);
    return layout.height - layout.padding - t * usable;
}

export function frameAtCanvasX(layout: ChartLayout, canvasX: number): number {
    const usable = layout.width - 2 * layout.padding;
    const t = (canvasX - layout.padding) / usable;
    return Math.round(t * Math.max(layout.frameCount - 1, 1));
}

export function pointNear(
    series: (ChartPoint | null)[],
    layout: ChartLayout,
    canvasX: number,
): ChartPoint | null {
    const frame = frameAtCanvasX(layout, canvasX);
    if (frame < 0 || frame >= series.length) {
        return null;
    }
    return series[frame];
}

export function drawChart(
    ctx: CanvasRenderingContext2D,
    series: (ChartPoint | null)[],
    layout: ChartLayout,
    currentFrame: number | null,
): void {
    ctx.clearRect(0, 0, layout.width, layout.height);
    ctx.fillStyle = "#10151c";
    ctx.fillRect(0, 0, layout.width, layout.height);

    const ex = extremes(series);
    if (ex !== null) {
        // D_max / D_min guide lines
        ctx.strokeStyle = "#36506a";
        ctx.setLineDash([4, 4]);
        for (const value of [ex.dMax, ex.dMin]) {
            const y = toCanvasY(layout, value);
            ctx.beginPath();
            ctx.moveTo(layout.padding, y);
            ctx.lineTo(layout.width - layout.padding, y);
            ctx.stroke();
        }
        ctx.setLineDash([]);
        ctx.fillStyle = "#7da7cc";
        ctx.font = "11px sans-serif";
        ctx.fillText(`Dmax ${ex.dMax.toFixed(3)} cm @ ${ex.frameOfMax}`, layout.padding + 4, toCanvasY(layout, ex.dMax) - 4);
        ctx.fillText(`Dmin ${ex.dMin.toFixed(3)} cm @ ${ex.frameOfMin}`, layout.padding + 4, toCanvasY(layout, ex.dMin) + 12);
    }

    // polyline with gaps
    ctx.strokeStyle = "#53c28b";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let penDown = false;
    for (const point of series) {
        if (point === null) {
            penDown = false;
            continue;
        }
        const x = toCanvasX(layout, point.frame);
        const y = toCanvasY(layout, point.diameterCm);
        if (penDown) {
            ctx.lineTo(x, y);
        } else {
            ctx.moveTo(x, y);
            penDown = true;
        }
    }
    ctx.stroke();

    // flag non-converged frames
    ctx.fillStyle = "#e06c5b";
    for (const point of series) {
        if (point !== null && !point.converged) {
            ctx.fillRect(toCanvasX(layout, point.frame) - 2, toCanvasY(layout, point.diameterCm) - 2, 4, 4);
        }
    }

    if (currentFrame !== null) {
        ctx.strokeStyle = "#c9b458";
        ctx.beginPath();
        const x = toCanvasX(layout, currentFrame);
        ctx.moveTo(x, layout.padding);
        ctx.lineTo(x, layout.height - layout.padding);
        ctx.stroke();
    }
}
