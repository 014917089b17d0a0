/* Beacon map: a planar canvas of grid coordinates, north up, metres on
   the ground. No tiles and no datum shift; eastings/northings are drawn
   as-is. Clicking selects (two selections show the live join from the
   service); the side panel shows the picked beacon with a unit toggle
   that re-queries the API rather than converting locally. */

import { Api } from "../api.js";
import type { BeaconOut, GeoJsonFC, GeoJsonFeature, JoinOut } from "../types.js";
import { esc, fmt3, fmtDate } from "../format.js";

/** World (easting/northing) to screen transform. Display geometry only. */
export class Viewport {
  centerE = 0;
  centerN = 0;
  metresPerPixel = 1;

  fitBounds(features: GeoJsonFeature[], width: number, height: number): void {
    if (features.length === 0) {
      return;
    }
    const es = features.map((f) => f.geometry.coordinates[0]);
    const ns = features.map((f) => f.geometry.coordinates[1]);
    const minE = Math.min(...es);
    const maxE = Math.max(...es);
    const minN = Math.min(...ns);
    const maxN = Math.max(...ns);
    this.centerE = (minE + maxE) / 2;
    this.centerN = (minN + maxN) / 2;
    const spanE = Math.max(maxE - minE, 10);
    const spanN = Math.max(maxN - minN, 10);
    // Leave a margin so edge beacons are not glued to the border.
    this.metresPerPixel = Math.max(spanE / (width * 0.8), spanN / (height * 0.8));
  }

  /** North up: screen y grows downward while northing grows upward. */
  toScreen(e: number, n: number, width: number, height: number): [number, number] {
    return [
      width / 2 + (e - this.centerE) / this.metresPerPixel,
      height / 2 - (n - this.centerN) / this.metresPerPixel,
    ];
  }

  fromScreen(x: number, y: number, width: number, height: number): [number, number] {
    return [
      this.centerE + (x - width / 2) * this.metresPerPixel,
      this.centerN - (y - height / 2) * this.metresPerPixel,
    ];
  }

  panPixels(dx: number, dy: number): void {
    this.centerE -= dx * this.metresPerPixel;
    this.centerN += dy * this.metresPerPixel;
  }

  zoomAt(factor: number, x: number, y: number, width: number, height: number): void {
    const [e, n] = this.fromScreen(x, y, width, height);
    this.metresPerPixel /= factor;
    const [nx, ny] = this.toScreen(e, n, width, height);
    this.panPixels(x - nx, y - ny);
  }
}

export interface ScaleBar {
  metres: number;
  pixels: number;
  label: string;
}

/** Pick a 1/2/5 x 10^k scale bar that fits in maxPixels. */
export function scaleBarSpec(metresPerPixel: number, maxPixels: number): ScaleBar {
  const maxMetres = metresPerPixel * maxPixels;
  let best = 1;
  for (let k = -3; k <= 7; k++) {
    for (const m of [1, 2, 5]) {
      const candidate = m * 10 ** k;
      if (candidate <= maxMetres && candidate > best) {
        best = candidate;
      }
    }
  }
  const label = best >= 1000 ? `${best / 1000} km` : `${best} m`;
  return { metres: best, pixels: best / metresPerPixel, label };
}

/** Nearest beacon within `radiusPx` of a click, or null. */
export function hitTest(
  features: GeoJsonFeature[],
  vp: Viewport,
  x: number,
  y: number,
  width: number,
  height: number,
  radiusPx = 8
): GeoJsonFeature | null {
  let bestFeature: GeoJsonFeature | null = null;
  let bestDist = radiusPx;
  for (const f of features) {
    const [sx, sy] = vp.toScreen(
      f.geometry.coordinates[0],
      f.geometry.coordinates[1],
      width,
      height
    );
    const d = Math.hypot(sx - x, sy - y);
    if (d <= bestDist) {
      bestDist = d;
      bestFeature = f;
    }
  }
  return bestFeature;
}

/** Side panel for one beacon; coordinates come pre-converted by the API. */
export function renderBeaconDetail(b: BeaconOut, photoUrl: string | null): string {
  const coord = (v: number | null) => (v === null ? "" : fmt3(v));
  return `<div class="beacon-detail">
    <h3>${esc(b.beacon_name)}${b.marked ? " ⚑" : ""}</h3>
    <table class="kv">
      <tr><th>easting</th><td>${coord(b.easting)} ${esc(b.unit)}</td></tr>
      <tr><th>northing</th><td>${coord(b.northing)} ${esc(b.unit)}</td></tr>
      <tr><th>elevation</th><td>${coord(b.elevation)} ${b.elevation === null ? "" : esc(b.unit)}</td></tr>
      <tr><th>description</th><td>${esc(b.description)}</td></tr>
      <tr><th>surveyor</th><td>${esc(b.revision_surveyor)}</td></tr>
      <tr><th>revised</th><td>${fmtDate(b.revision_date)}</td></tr>
    </table>
    ${photoUrl ? `<img class="beacon-photo" src="${esc(photoUrl)}" alt="${esc(b.beacon_name)}">` : ""}
    <button data-action="toggle-mark" data-id="${b.beacon_id}">
      ${b.marked ? "Unmark" : "Mark"}
    </button>
    <button data-action="print">Print sheet</button>
  </div>`;
}

/** Live join between the two selected beacons, verbatim API fields. */
export function renderJoinPanel(from: string, to: string, join: JoinOut): string {
  return `<div class="join-panel">
    <h3>Join ${esc(from)} → ${esc(to)}</h3>
    <p class="join-result">${esc(join.bearing_dms)}, ${fmt3(join.distance)} ${esc(join.unit)}</p>
  </div>`;
}

export class BeaconMapView {
  fc: GeoJsonFC | null = null;
  beacons: BeaconOut[] = [];
  loadError: string | null = null;
  unit = "m";
  viewport = new Viewport();
  /** Selection order matters: join runs from the first pick to the second. */
  selectedIds: number[] = [];
  join: JoinOut | null = null;

  constructor(private readonly api: Api) {}

  async load(): Promise<void> {
    this.loadError = null;
    try {
      [this.fc, this.beacons] = await Promise.all([
        this.api.beaconsGeojson(),
        this.api.listBeacons(this.unit),
      ]);
    } catch (err) {
      this.fc = null;
      this.beacons = [];
      this.loadError = String(err);
    }
  }

  /** Re-query with the other unit; the service does the conversion. */
  async setUnit(unit: string): Promise<void> {
    this.unit = unit;
    this.beacons = await this.api.listBeacons(unit);
    if (this.selectedIds.length === 2) {
      await this.refreshJoin();
    }
  }

  beaconById(id: number): BeaconOut | null {
    return this.beacons.find((b) => b.beacon_id === id) ?? null;
  }

  async select(id: number): Promise<void> {
    if (this.selectedIds.includes(id)) {
      this.selectedIds = this.selectedIds.filter((s) => s !== id);
    } else {
      this.selectedIds = [...this.selectedIds, id].slice(-2);
    }
    this.join = null;
    if (this.selectedIds.length === 2) {
      await this.refreshJoin();
    }
  }

  private async refreshJoin(): Promise<void> {
    const [a, b] = this.selectedIds.map((id) => this.beaconById(id));
    if (!a || !b) {
      return;
    }
    this.join = await this.api.joinBeacons(a.beacon_name, b.beacon_name, this.unit);
  }

  async toggleMark(id: number): Promise<void> {
    const beacon = this.beaconById(id);
    if (!beacon) {
      return;
    }
    await this.api.updateBeacon(id, { marked: !beacon.marked });
    await this.load();
  }

  /** Canvas painting; everything else in this view is DOM-free. */
  draw(ctx: CanvasRenderingContext2D, width: number, height: number): void {
    ctx.clearRect(0, 0, width, height);
    if (!this.fc) {
      return;
    }
    for (const f of this.fc.features) {
      const [x, y] = this.viewport.toScreen(
        f.geometry.coordinates[0],
        f.geometry.coordinates[1],
        width,
        height
      );
      const selected = this.selectedIds.includes(f.properties.beacon_id);
      ctx.beginPath();
      if (f.properties.marked) {
        // Marked beacons draw as filled triangles, unmarked as circles.
        ctx.moveTo(x, y - 6);
        ctx.lineTo(x - 5, y + 4);
        ctx.lineTo(x + 5, y + 4);
        ctx.closePath();
      } else {
        ctx.arc(x, y, 4, 0, Math.PI * 2);
      }
      ctx.fillStyle = selected ? "#e5484d" : f.properties.marked ? "#f5a623" : "#30a46c";
      ctx.fill();
      ctx.fillStyle = "#222";
      ctx.fillText(f.properties.name, x + 7, y + 3);
    }
    const bar = scaleBarSpec(this.viewport.metresPerPixel, width / 4);
    const y0 = height - 14;
    ctx.strokeStyle = "#222";
    ctx.beginPath();
    ctx.moveTo(12, y0);
    ctx.lineTo(12 + bar.pixels, y0);
    ctx.stroke();
    ctx.fillText(bar.label, 12, y0 - 4);
    ctx.fillText("N ↑", width - 32, 16);
  }

  render(): string {
    if (this.loadError) {
      return `<section class="view-beacons">
        <h2>Beacons</h2>
        <p class="load-error">Map failed to load: ${esc(this.loadError)}</p>
      </section>`;
    }
    const empty = this.fc && this.fc.features.length === 0;
    const selected =
      this.selectedIds.length > 0
        ? this.beaconById(this.selectedIds[this.selectedIds.length - 1])
        : null;
    const joinPanel =
      this.join && this.selectedIds.length === 2
        ? renderJoinPanel(
            this.beaconById(this.selectedIds[0])?.beacon_name ?? "",
            this.beaconById(this.selectedIds[1])?.beacon_name ?? "",
            this.join
          )
        : "";
    return `<section class="view-beacons">
      <h2>Beacons</h2>
      <div class="unit-toggle">
        <button data-action="set-unit" data-unit="m"
                ${this.unit === "m" ? "disabled" : ""}>m</button>
        <button data-action="set-unit" data-unit="ft"
                ${this.unit === "ft" ? "disabled" : ""}>ft</button>
      </div>
      ${empty ? `<p class="empty">No beacons registered.</p>` : `<canvas id="beacon-map" width="640" height="420"></canvas>`}
      <aside class="beacon-side">
        ${selected ? renderBeaconDetail(selected, selected.photo_ref ? this.api.mediaUrl(selected.photo_ref) : null) : `<p class="empty">Click a beacon.</p>`}
        ${joinPanel}
      </aside>
    </section>`;
  }
}
