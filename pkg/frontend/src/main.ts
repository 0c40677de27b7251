import {
  ApiError,
  DesignPayload,
  decodePoint,
  generateDesigns,
  getEmbedding,
  getMetrics,
  getTrajectory,
} from "./api";
import { BannerArea } from "./banners";
import { Inspector } from "./inspector";
import { ScatterView } from "./scatter";
import { TrajectoryView } from "./trajectory";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

export interface App {
  scatter: ScatterView;
  inspector: Inspector;
  trajectoryView: TrajectoryView;
}

export async function boot(): Promise<App | null> {
  const banners = new BannerArea(byId("banners"));
  const inspector = new Inspector(byId("inspector"));
  inspector.clear();
  const trajectoryView = new TrajectoryView(byId("trajectory"));
  const hover = byId<HTMLSpanElement>("hover-info");
  const pressure = byId<HTMLInputElement>("pressure");
  const pressureValue = byId<HTMLSpanElement>("pressure-value");
  const trajectoryMode = byId<HTMLSpanElement>("trajectory-mode");

  let rows;
  try {
    rows = await getEmbedding();
  } catch (err) {
    banners.error(err);
    return null;
  }
  const scatter = new ScatterView(byId<HTMLCanvasElement>("scatter"), rows);
  scatter.draw();

  try {
    const metrics = getMetrics();
    const payload = await metrics;
    scatter.setHulls({
      training: payload.diversity.training_hull,
      generated: payload.diversity.generated_hull,
    });
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      // Metrics not computed yet; the hull toggle simply stays empty.
    } else {
      banners.error(err);
    }
  }

  scatter.onHover = (row) => {
    hover.textContent = row ? `id ${row.id} (${row.mode})` : "";
  };

  // One decode in flight at a time: clicks during a pending decode are dropped.
  let decodePending = false;
  scatter.onPick = async (x, y) => {
    if (decodePending) return;
    decodePending = true;
    try {
      const payload = await decodePoint(x, y, 5);
      inspector.show(payload);
      await showTrajectory(payload);
    } catch (err) {
      banners.error(err);
    } finally {
      decodePending = false;
    }
  };

  async function showTrajectory(payload: DesignPayload): Promise<void> {
    const id = payload.neighbor_ids?.[0];
    if (id === undefined) return;
    try {
      const tr = await getTrajectory(id, Number(pressure.value));
      trajectoryMode.textContent = `${tr.mode}, tip ${tr.tip_displacement_mm.toFixed(1)} mm`;
      trajectoryView.show(tr);
    } catch (err) {
      banners.error(err);
    }
  }

  inspector.onTrajectoryRequest = (payload) => void showTrajectory(payload);
  pressure.addEventListener("input", () => {
    pressureValue.textContent = `${pressure.value} kPa`;
    const current = inspector.design;
    if (current) void showTrajectory(current);
  });

  byId<HTMLInputElement>("hull-toggle").addEventListener("change", (e) => {
    scatter.toggleHulls((e.target as HTMLInputElement).checked);
  });

  byId<HTMLButtonElement>("generate").addEventListener("click", async () => {
    const n = Number(byId<HTMLInputElement>("generate-n").value) || 100;
    const seed = Math.floor(Math.random() * 1e6);
    try {
      const out = await generateDesigns(n, seed);
      const points = out.designs
        .filter((d) => d.dim1 !== undefined && d.dim2 !== undefined)
        .map((d) => ({ dim1: d.dim1 as number, dim2: d.dim2 as number, mode: d.params.mode }));
      scatter.setGenerated(points);
      byId<HTMLSpanElement>("generate-info").textContent =
        `${out.designs.length} generated, novelty ${out.d_new.toFixed(4)}`;
    } catch (err) {
      banners.error(err);
    }
  });

  return { scatter, inspector, trajectoryView };
}

const isTest = typeof import.meta !== "undefined" && import.meta.env?.MODE === "test";
if (!isTest && typeof document !== "undefined" && document.getElementById("scatter")) {
  void boot();
}
