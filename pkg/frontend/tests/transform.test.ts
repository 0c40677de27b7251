import { describe, expect, it } from "vitest";

import {
  fitViewport,
  nearestPointIndex,
  panBy,
  screenToWorld,
  worldToScreen,
  zoomAt,
} from "../src/transform";

const points = [
  { dim1: -10, dim2: -5 },
  { dim1: 10, dim2: 5 },
  { dim1: 0, dim2: 0 },
];

describe("viewport fitting", () => {
  it("keeps every point inside the padded screen area", () => {
    const v = fitViewport(points, 640, 480);
    for (const p of points) {
      const [sx, sy] = worldToScreen(v, p.dim1, p.dim2);
      expect(sx).toBeGreaterThanOrEqual(0);
      expect(sx).toBeLessThanOrEqual(640);
      expect(sy).toBeGreaterThanOrEqual(0);
      expect(sy).toBeLessThanOrEqual(480);
    }
  });

  it("centers the bounding box", () => {
    const v = fitViewport(points, 640, 480);
    const [sx, sy] = worldToScreen(v, 0, 0);
    expect(sx).toBeCloseTo(320, 6);
    expect(sy).toBeCloseTo(240, 6);
  });
});

describe("coordinate round trips", () => {
  const v = fitViewport(points, 500, 400);

  it("world -> screen -> world is the identity", () => {
    const [sx, sy] = worldToScreen(v, 3.25, -1.5);
    const [wx, wy] = screenToWorld(v, sx, sy);
    expect(wx).toBeCloseTo(3.25, 10);
    expect(wy).toBeCloseTo(-1.5, 10);
  });

  it("screen y axis points down", () => {
    const [, up] = worldToScreen(v, 0, 5);
    const [, down] = worldToScreen(v, 0, -5);
    expect(up).toBeLessThan(down);
  });
});

describe("zoom and pan", () => {
  it("zooming about a cursor keeps the world point under it", () => {
    const v = fitViewport(points, 500, 400);
    const [wx, wy] = screenToWorld(v, 123, 234);
    const zoomed = zoomAt(v, 123, 234, 1.7);
    const [sx, sy] = worldToScreen(zoomed, wx, wy);
    expect(sx).toBeCloseTo(123, 8);
    expect(sy).toBeCloseTo(234, 8);
  });

  it("panning moves the view by whole pixels", () => {
    const v = fitViewport(points, 500, 400);
    const moved = panBy(v, 40, -25);
    const [sx, sy] = worldToScreen(moved, 0, 0);
    const [bx, by] = worldToScreen(v, 0, 0);
    expect(sx - bx).toBeCloseTo(40, 8);
    expect(sy - by).toBeCloseTo(-25, 8);
  });
});

describe("hit testing", () => {
  it("finds the nearest point within the radius", () => {
    const v = fitViewport(points, 500, 400);
    const [sx, sy] = worldToScreen(v, 10, 5);
    expect(nearestPointIndex(v, points, sx + 3, sy - 2, 8)).toBe(1);
  });

  it("returns null when nothing is close", () => {
    const v = fitViewport(points, 500, 400);
    expect(nearestPointIndex(v, points, 1, 1, 4)).toBeNull();
  });
});
