/** Canvas scatter view of the embedding: mode-colored training points,
 * generated overlay, optional hull polygons, pan/zoom/hover, click-to-decode. */

import type { EmbeddingRow, HullReport } from "./api";
import {
  Viewport,
  fitViewport,
  nearestPointIndex,
  panBy,
  screenToWorld,
  worldToScreen,
  zoomAt,
} from "./transform";

export const MODE_COLORS: Record<string, string> = {
  Bending: "#2b6cb0",
  Twisting: "#dd6b20",
  Mixed: "#2f855a",
};

export interface GeneratedPoint {
  dim1: number;
  dim2: number;
  mode: string;
}

export interface HullOverlay {
  training: HullReport;
  generated: HullReport;
}

export class ScatterView {
  private viewport: Viewport;
  private hovered: number | null = null;
  private generated: GeneratedPoint[] = [];
  private hulls: HullOverlay | null = null;
  private hullsVisible = false;
  private dragging = false;
  private moved = false;
  private lastX = 0;
  private lastY = 0;

  onPick: (worldX: number, worldY: number) => void = () => {};
  onHover: (row: EmbeddingRow | null) => void = () => {};

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private rows: EmbeddingRow[],
  ) {
    this.viewport = fitViewport(rows, canvas.width, canvas.height);
    canvas.addEventListener("mousedown", (e) => {
      this.dragging = true;
      this.moved = false;
      this.lastX = e.offsetX;
      this.lastY = e.offsetY;
    });
    canvas.addEventListener("mousemove", (e) => this.handleMove(e));
    window.addEventListener("mouseup", () => {
      this.dragging = false;
    });
    canvas.addEventListener("click", (e) => {
      if (this.moved) return; // a drag, not a pick
      const [wx, wy] = screenToWorld(this.viewport, e.offsetX, e.offsetY);
      this.onPick(wx, wy);
    });
    canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      const factor = e.deltaY < 0 ? 1.15 : 1 / 1.15;
      this.viewport = zoomAt(this.viewport, e.offsetX, e.offsetY, factor);
      this.draw();
    });
  }

  private handleMove(e: MouseEvent): void {
    if (this.dragging) {
      const dx = e.offsetX - this.lastX;
      const dy = e.offsetY - this.lastY;
      if (Math.abs(dx) + Math.abs(dy) > 2) this.moved = true;
      this.viewport = panBy(this.viewport, dx, dy);
      this.lastX = e.offsetX;
      this.lastY = e.offsetY;
      this.draw();
      return;
    }
    const idx = nearestPointIndex(this.viewport, this.rows, e.offsetX, e.offsetY, 8);
    const next = idx === null ? null : idx;
    if (next !== this.hovered) {
      this.hovered = next;
      this.onHover(next === null ? null : this.rows[next]);
      this.draw();
    }
  }

  setGenerated(points: GeneratedPoint[]): void {
    this.generated = points;
    this.draw();
  }

  setHulls(hulls: HullOverlay | null): void {
    this.hulls = hulls;
    this.draw();
  }

  /** Stored hull overlay in world coordinates, exactly as the API sent it. */
  hullData(): HullOverlay | null {
    return this.hulls;
  }

  toggleHulls(visible: boolean): void {
    this.hullsVisible = visible;
    this.draw();
  }

  /** Hull polygons in screen space, exposed for rendering and for tests. */
  hullScreenPaths(): { training: [number, number][]; generated: [number, number][] } | null {
    if (!this.hulls || !this.hullsVisible) return null;
    const project = (hull: HullReport): [number, number][] =>
      hull.vertices.map(([x, y]) => worldToScreen(this.viewport, x, y));
    return { training: project(this.hulls.training), generated: project(this.hulls.generated) };
  }

  draw(): void {
    let ctx: CanvasRenderingContext2D | null = null;
    try {
      ctx = this.canvas.getContext("2d");
    } catch {
      return; // headless environment without canvas support
    }
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.fillStyle = "#fafafa";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);

    for (const row of this.rows) {
      const [sx, sy] = worldToScreen(this.viewport, row.dim1, row.dim2);
      ctx.fillStyle = MODE_COLORS[row.mode] ?? "#718096";
      ctx.beginPath();
      ctx.arc(sx, sy, 2.5, 0, Math.PI * 2);
      ctx.fill();
    }
    for (const p of this.generated) {
      const [sx, sy] = worldToScreen(this.viewport, p.dim1, p.dim2);
      ctx.strokeStyle = MODE_COLORS[p.mode] ?? "#718096";
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      ctx.moveTo(sx - 3, sy - 3);
      ctx.lineTo(sx + 3, sy + 3);
      ctx.moveTo(sx - 3, sy + 3);
      ctx.lineTo(sx + 3, sy - 3);
      ctx.stroke();
    }
    const paths = this.hullScreenPaths();
    if (paths) {
      this.strokePath(ctx, paths.training, "#2b6cb0");
      this.strokePath(ctx, paths.generated, "#c53030");
    }
    if (this.hovered !== null) {
      const row = this.rows[this.hovered];
      const [sx, sy] = worldToScreen(this.viewport, row.dim1, row.dim2);
      ctx.strokeStyle = "#1a202c";
      ctx.beginPath();
      ctx.arc(sx, sy, 5, 0, Math.PI * 2);
      ctx.stroke();
    }
  }

  private strokePath(ctx: CanvasRenderingContext2D, path: [number, number][], color: string): void {
    if (path.length < 2) return;
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(path[0][0], path[0][1]);
    for (const [x, y] of path.slice(1)) ctx.lineTo(x, y);
    ctx.closePath();
    ctx.stroke();
  }
}
