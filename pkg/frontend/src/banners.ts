/** Dismissible error banners; a stale-workdir error offers a reload. */

import { ApiError } from "./api";

export class BannerArea {
  constructor(private readonly root: HTMLElement) {}

  error(err: unknown): void {
    const banner = document.createElement("div");
    banner.className = "banner";
    const message =
      err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
    const stale = err instanceof ApiError && err.staleWorkdir;
    banner.innerHTML = `<span>${message}</span>`;
    if (stale) {
      const reload = document.createElement("button");
      reload.textContent = "work directory changed, reload";
      reload.addEventListener("click", () => window.location.reload());
      banner.appendChild(reload);
    }
    const dismiss = document.createElement("button");
    dismiss.textContent = "dismiss";
    dismiss.addEventListener("click", () => banner.remove());
    banner.appendChild(dismiss);
    this.root.appendChild(banner);
  }
}
