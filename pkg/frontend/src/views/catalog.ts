/* Catalog view: where an instrument lives in the store (room/shelf),
   free-text search, and job checklists joined with live stock so a
   clerk can tell at a glance whether a job can be kitted today. */

import { Api } from "../api.js";
import type { CatalogOut, JobCheckOut, JobTemplateOut, LocateOut } from "../types.js";
import { esc, fmtInt } from "../format.js";

export function renderCatalogTable(rows: CatalogOut[]): string {
  if (rows.length === 0) {
    return `<p class="empty">No catalog entries.</p>`;
  }
  const body = rows
    .map(
      (r) => `<tr data-action="locate" data-name="${esc(r.instrument_name)}">
      <td>${esc(r.instrument_name)}</td>
      <td>${esc(r.description)}</td>
      <td>${esc(r.room)}</td>
      <td>${esc(r.shelf)}</td>
    </tr>`
    )
    .join("");
  return `<table class="grid">
    <thead><tr><th>instrument</th><th>description</th><th>room</th><th>shelf</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export function renderLocatePanel(loc: LocateOut): string {
  const stockLine = loc.stocked
    ? `<p>remaining in store: ${fmtInt(loc.remaining ?? 0)}</p>`
    : `<p class="warn">not currently stocked</p>`;
  return `<div class="locate-panel">
    <h3>${esc(loc.instrument_name)}</h3>
    <p>room ${esc(loc.room)}, shelf ${esc(loc.shelf)}</p>
    ${stockLine}
  </div>`;
}

export function renderJobCheck(check: JobCheckOut): string {
  const lines = check.lines
    .map(
      (l) => `<tr class="${l.covered ? "covered" : "short"}">
      <td>${esc(l.instrument_name)}</td>
      <td>${fmtInt(l.required)}</td>
      <td>${l.remaining === null ? "—" : fmtInt(l.remaining)}</td>
      <td>${l.covered ? "ok" : "short"}</td>
    </tr>`
    )
    .join("");
  const verdict = check.all_covered
    ? `<p class="ok">all covered</p>`
    : `<p class="warn">shortfalls above</p>`;
  return `<div class="job-check">
    <h3>Job: ${esc(check.job_type)}</h3>
    <table class="grid">
      <thead><tr><th>instrument</th><th>required</th><th>remaining</th><th></th></tr></thead>
      <tbody>${lines}</tbody>
    </table>
    ${verdict}
  </div>`;
}

export class CatalogView {
  rows: CatalogOut[] = [];
  templates: JobTemplateOut[] = [];
  located: LocateOut | null = null;
  jobCheck: JobCheckOut | null = null;
  query = "";

  constructor(private readonly api: Api) {}

  async load(): Promise<void> {
    [this.rows, this.templates] = await Promise.all([
      this.api.catalog(),
      this.api.jobTemplates(),
    ]);
  }

  async search(q: string): Promise<void> {
    this.query = q;
    this.rows = await this.api.catalog(q || undefined);
  }

  async locate(name: string): Promise<void> {
    this.located = await this.api.locate(name);
  }

  async checkJob(type: string): Promise<void> {
    this.jobCheck = await this.api.jobRequirements(type);
  }

  render(): string {
    const jobButtons = this.templates
      .map(
        (t) =>
          `<button data-action="check-job" data-type="${esc(t.job_type)}">${esc(t.job_type)}</button>`
      )
      .join(" ");
    return `<section class="view-catalog">
      <h2>Catalog</h2>
      <form data-action="catalog-search">
        <input data-field="q" placeholder="search name or description"
               value="${esc(this.query)}">
        <button type="submit">Search</button>
      </form>
      ${renderCatalogTable(this.rows)}
      ${this.located ? renderLocatePanel(this.located) : ""}
      <h2>Jobs</h2>
      <div class="job-buttons">${jobButtons || `<p class="empty">No job templates.</p>`}</div>
      ${this.jobCheck ? renderJobCheck(this.jobCheck) : ""}
    </section>`;
  }
}
