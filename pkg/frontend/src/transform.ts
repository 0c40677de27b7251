/** Pure view math for the scatter canvas: world (embedding) coordinates to
 * screen pixels and back, plus hit testing. Kept free of DOM so it can be
 * unit-tested directly. */

export interface Viewport {
  /** World coordinate at the screen center. */
  centerX: number;
  centerY: number;
  /** Pixels per world unit. */
  scale: number;
  width: number;
  height: number;
}

export function fitViewport(
  points: ReadonlyArray<{ dim1: number; dim2: number }>,
  width: number,
  height: number,
  padding = 0.08,
): Viewport {
  if (points.length === 0) {
    return { centerX: 0, centerY: 0, scale: 1, width, height };
  }
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const p of points) {
    minX = Math.min(minX, p.dim1);
    maxX = Math.max(maxX, p.dim1);
    minY = Math.min(minY, p.dim2);
    maxY = Math.max(maxY, p.dim2);
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const scale = Math.min(
    (width * (1 - 2 * padding)) / spanX,
    (height * (1 - 2 * padding)) / spanY,
  );
  return {
    centerX: (minX + maxX) / 2,
    centerY: (minY + maxY) / 2,
    scale,
    width,
    height,
  };
}

export function worldToScreen(v: Viewport, x: number, y: number): [number, number] {
  // Screen y grows downward; world y grows upward.
  return [v.width / 2 + (x - v.centerX) * v.scale, v.height / 2 - (y - v.centerY) * v.scale];
}

export function screenToWorld(v: Viewport, px: number, py: number): [number, number] {
  return [v.centerX + (px - v.width / 2) / v.scale, v.centerY - (py - v.height / 2) / v.scale];
}

/** Zoom about a fixed screen point so the world point under the cursor stays put. */
export function zoomAt(v: Viewport, px: number, py: number, factor: number): Viewport {
  const [wx, wy] = screenToWorld(v, px, py);
  const scale = v.scale * factor;
  return {
    ...v,
    scale,
    centerX: wx - (px - v.width / 2) / scale,
    centerY: wy + (py - v.height / 2) / scale,
  };
}

export function panBy(v: Viewport, dpx: number, dpy: number): Viewport {
  return { ...v, centerX: v.centerX - dpx / v.scale, centerY: v.centerY + dpy / v.scale };
}

/** Index of the point nearest to a screen position, within a pixel radius. */
export function nearestPointIndex(
  v: Viewport,
  points: ReadonlyArray<{ dim1: number; dim2: number }>,
  px: number,
  py: number,
  radiusPx: number,
): number | null {
  let best: number | null = null;
  let bestSq = radiusPx * radiusPx;
  for (let i = 0; i < points.length; i++) {
    const [sx, sy] = worldToScreen(v, points[i].dim1, points[i].dim2);
    const d = (sx - px) * (sx - px) + (sy - py) * (sy - py);
    if (d <= bestSq) {
      best = i;
      bestSq = d;
    }
  }
  return best;
}
