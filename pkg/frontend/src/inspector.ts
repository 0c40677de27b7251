/** Design inspector panel: the 16 parameters, feasibility badge, novelty,
 * and per-design actions. Values are rendered verbatim from the API payload;
 * no client-side rounding or recomputation. */

import type { DesignPayload } from "./api";

export const PARAM_LABELS: ReadonlyArray<[keyof DesignPayload["params"], string]> = [
  ["L", "chamber length [mm]"],
  ["W", "chamber width [mm]"],
  ["H", "chamber height [mm]"],
  ["t", "chamber wall thickness [mm]"],
  ["t_n", "inter-chamber gap [mm]"],
  ["t_h", "chamber top-head thickness [mm]"],
  ["t_ab", "inter-air-chamber wall [mm]"],
  ["t_b", "base layer thickness [mm]"],
  ["N", "chamber count"],
  ["theta", "chamber orientation [deg]"],
  ["alpha", "helical fraction"],
  ["L_T", "total length [mm]"],
  ["N1", "helical chambers"],
  ["N2", "straight chambers"],
  ["mode", "actuation mode"],
  ["cross_section", "cross-section"],
];

export class Inspector {
  private current: DesignPayload | null = null;

  onTrajectoryRequest: (payload: DesignPayload) => void = () => {};

  constructor(private readonly root: HTMLElement) {}

  get design(): DesignPayload | null {
    return this.current;
  }

  show(payload: DesignPayload): void {
    this.current = payload;
    const rows = PARAM_LABELS.map(([key, label]) => {
      const value = payload.params[key];
      return `<tr><td>${key}</td><td class="label">${label}</td>` +
        `<td class="value" data-param="${key}">${String(value)}</td></tr>`;
    }).join("");

    const feasible = payload.feasibility.ok;
    const failures = payload.feasibility.checks.filter((c) => !c.passed);
    const badge = feasible
      ? `<span class="badge ok">feasible</span>`
      : `<span class="badge bad" title="${failures.map((c) => c.name).join(", ")}">` +
        `infeasible (${failures.length})</span>`;

    const stats: string[] = [];
    if (payload.novelty !== undefined) {
      stats.push(`novelty <b data-stat="novelty">${String(payload.novelty)}</b>`);
    }
    if (payload.repair_distance !== undefined) {
      stats.push(`repair <b data-stat="repair">${String(payload.repair_distance)}</b>`);
    }
    if (payload.neighbor_ids !== undefined) {
      stats.push(`neighbors <b data-stat="neighbors">${payload.neighbor_ids.join(", ")}</b>`);
    }

    this.root.innerHTML = `
      <div class="inspector-head">${badge}<span class="stats">${stats.join(" · ")}</span></div>
      <table class="params"><tbody>${rows}</tbody></table>
      <div class="actions">
        <button data-action="trajectory">trajectory</button>
        <a data-action="stl" href="#" download>download STL</a>
        <a data-action="csg" href="#" download>download CSG</a>
      </div>`;

    const neighbor = payload.neighbor_ids?.[0];
    const stl = this.root.querySelector<HTMLAnchorElement>("[data-action=stl]");
    const csg = this.root.querySelector<HTMLAnchorElement>("[data-action=csg]");
    if (neighbor === undefined) {
      stl?.remove();
      csg?.remove();
    } else {
      if (stl) stl.href = `/api/design/${neighbor}/mesh`;
      if (csg) csg.href = `/api/design/${neighbor}/csg`;
    }
    this.root
      .querySelector<HTMLButtonElement>("[data-action=trajectory]")
      ?.addEventListener("click", () => {
        if (this.current) this.onTrajectoryRequest(this.current);
      });
  }

  clear(): void {
    this.current = null;
    this.root.innerHTML = `<p class="hint">click the map to decode a design</p>`;
  }
}
