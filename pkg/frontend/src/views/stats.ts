/* Stats view: one availability pie per instrument (available/lent/faulty)
   and a daily activity bar chart over a picked date range. Sector sizes
   and bar heights are display geometry; every number printed next to
   them is a field from the stats endpoints. */

import { Api } from "../api.js";
import type { AvailabilityRow, DailyRow } from "../types.js";
import { esc, fmtInt } from "../format.js";

export interface PieSector {
  label: string;
  value: number;
  className: string;
}

/** The three sectors of one instrument's pie, verbatim from its row. */
export function pieSectors(row: AvailabilityRow): PieSector[] {
  return [
    { label: "available", value: row.remaining, className: "sector-available" },
    { label: "lent", value: row.lent, className: "sector-lent" },
    { label: "faulty", value: row.faulty, className: "sector-faulty" },
  ];
}

function polar(cx: number, cy: number, r: number, angleDeg: number): [number, number] {
  const rad = ((angleDeg - 90) * Math.PI) / 180;
  return [cx + r * Math.cos(rad), cy + r * Math.sin(rad)];
}

function sectorPath(cx: number, cy: number, r: number, start: number, end: number): string {
  const [sx, sy] = polar(cx, cy, r, start);
  const [ex, ey] = polar(cx, cy, r, end);
  const large = end - start > 180 ? 1 : 0;
  return `M ${cx} ${cy} L ${sx} ${sy} A ${r} ${r} 0 ${large} 1 ${ex} ${ey} Z`;
}

/** SVG pie for one instrument. The denominator is the row's own total. */
export function renderPie(row: AvailabilityRow): string {
  const sectors = pieSectors(row);
  const size = 120;
  const c = size / 2;
  const r = c - 4;
  let angle = 0;
  const paths: string[] = [];
  for (const s of sectors) {
    if (row.total <= 0 || s.value <= 0) {
      continue;
    }
    const sweep = (s.value / row.total) * 360;
    if (sweep >= 360) {
      paths.push(`<circle class="${s.className}" cx="${c}" cy="${c}" r="${r}"/>`);
    } else {
      paths.push(
        `<path class="${s.className}" d="${sectorPath(c, c, r, angle, angle + sweep)}"/>`
      );
    }
    angle += sweep;
  }
  const legend = sectors
    .map(
      (s) =>
        `<span class="legend ${s.className}">${s.label} ${fmtInt(s.value)}</span>`
    )
    .join(" ");
  return `<figure class="pie" data-instrument="${esc(row.instrument_name)}">
    <svg viewBox="0 0 ${size} ${size}" role="img"
         aria-label="${esc(row.instrument_name)} availability">
      ${paths.join("\n      ")}
    </svg>
    <figcaption>${esc(row.instrument_name)} - total ${fmtInt(row.total)}<br>
    ${legend}</figcaption>
  </figure>`;
}

export function renderAvailability(rows: AvailabilityRow[]): string {
  if (rows.length === 0) {
    return `<p class="empty">No instruments stocked.</p>`;
  }
  return `<div class="pies">${rows.map(renderPie).join("\n")}</div>`;
}

/**
 * Daily activity bars. A range with no activity still draws the axis
 * and the zero line so "nothing happened" looks different from
 * "nothing loaded".
 */
export function renderDailyChart(rows: DailyRow[]): string {
  if (rows.length === 0) {
    return `<p class="empty">No data for this range.</p>`;
  }
  const width = Math.max(320, rows.length * 60);
  const height = 160;
  const baseline = height - 24;
  const peak = Math.max(1, ...rows.map((r) => Math.max(r.lendings, r.instruments, r.returns)));
  const groups = rows
    .map((r, i) => {
      const x0 = i * 60 + 10;
      const bar = (offset: number, value: number, cls: string, label: string) => {
        const h = (value / peak) * (baseline - 16);
        return `<rect class="${cls}" x="${x0 + offset}" y="${baseline - h}"
          width="12" height="${h}"><title>${label}: ${fmtInt(value)}</title></rect>`;
      };
      return `<g data-date="${esc(r.date)}">
        ${bar(0, r.lendings, "bar-lendings", "lendings")}
        ${bar(14, r.instruments, "bar-instruments", "instruments")}
        ${bar(28, r.returns, "bar-returns", "returns")}
        <text x="${x0}" y="${height - 8}" class="axis">${esc(r.date.slice(5))}</text>
      </g>`;
    })
    .join("\n");
  return `<svg class="daily" viewBox="0 0 ${width} ${height}" role="img"
       aria-label="daily lendings">
    <line class="zero-line" x1="0" y1="${baseline}" x2="${width}" y2="${baseline}"/>
    ${groups}
  </svg>`;
}

export class StatsView {
  availability: AvailabilityRow[] = [];
  daily: DailyRow[] = [];
  from: string;
  to: string;

  constructor(private readonly api: Api, today: string) {
    // Default range: the last week up to today.
    const start = new Date(today + "T00:00:00Z");
    start.setUTCDate(start.getUTCDate() - 6);
    this.from = start.toISOString().slice(0, 10);
    this.to = today;
  }

  async load(): Promise<void> {
    [this.availability, this.daily] = await Promise.all([
      this.api.availability(),
      this.api.daily(this.from, this.to),
    ]);
  }

  async setRange(from: string, to: string): Promise<void> {
    this.from = from;
    this.to = to;
    this.daily = await this.api.daily(from, to);
  }

  render(): string {
    return `<section class="view-stats">
      <h2>Availability</h2>
      ${renderAvailability(this.availability)}
      <h2>Daily activity</h2>
      <form data-action="set-range" class="range-picker">
        <input type="date" data-field="from" value="${this.from}">
        <input type="date" data-field="to" value="${this.to}">
        <button type="submit">Apply</button>
      </form>
      ${renderDailyChart(this.daily)}
    </section>`;
  }
}
