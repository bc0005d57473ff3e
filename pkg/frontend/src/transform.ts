/*
Coordinate mapping between image pixels and canvas coordinates.

The frame is drawn letterboxed: one uniform zoom factor plus an offset,
so the transform is exactly invertible.
*/

export interface Point {
    x: number;
    y: number;
}

export interface ViewTransform {
    zoom: number;
    offsetX: number;
    offsetY: number;
}

export function fitTransform(
    imageWidth: number,
    imageHeight: number,
    canvasWidth: number,
    canvasHeight: number,
): ViewTransform {
    const zoom = Math.min(canvasWidth / imageWidth, canvasHeight / imageHeight);
    return {
        zoom: zoom,
        offsetX: (canvasWidth - imageWidth * zoom) / 2,
        offsetY: (canvasHeight - imageHeight * zoom) / 2,
    };
}

export function pixelToCanvas(t: ViewTransform, p: Point): Point {
    return { x: p.x * t.zoom + t.offsetX, y: p.y * t.zoom + t.offsetY };
}

export function canvasToPixel(t: ViewTransform, p: Point): Point {
    return { x: (p.x - t.offsetX) / t.zoom, y: (p.y - t.offsetY) / t.zoom };
}

export function insideImage(imageWidth: number, imageHeight: number, p: Point): boolean {
    return p.x >= 0 && p.x <= imageWidth - 1 && p.y >= 0 && p.y <= imageHeight - 1;
}
