/* Recycle bin: soft-deleted lendings and beacons, restorable in place.
   The bin and the main lists are disjoint by construction server-side;
   this view only ever shows what /api/recycle-bin returns. */

import { Api } from "../api.js";
import type { RecycleRow } from "../types.js";
import { esc, fmtWhen } from "../format.js";

export function renderRecycleBin(rows: RecycleRow[]): string {
  if (rows.length === 0) {
    return `<p class="empty">The recycle bin is empty.</p>`;
  }
  const body = rows
    .map(
      (r) => `<tr>
      <td>${esc(r.kind)}</td>
      <td>${r.record_id}</td>
      <td>${esc(r.label)}</td>
      <td>${fmtWhen(r.deleted_at)}</td>
      <td><button data-action="restore" data-kind="${esc(r.kind)}"
          data-id="${r.record_id}">Restore</button></td>
    </tr>`
    )
    .join("");
  return `<table class="grid">
    <thead><tr><th>kind</th><th>#</th><th>label</th><th>deleted</th><th></th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export class RecycleBinView {
  rows: RecycleRow[] = [];

  constructor(private readonly api: Api) {}

  async load(): Promise<void> {
    this.rows = await this.api.recycleBin();
  }

  async restore(kind: string, id: number): Promise<void> {
    if (kind === "lending") {
      await this.api.restoreLending(id);
    } else {
      await this.api.restoreBeacon(id);
    }
    await this.load();
  }

  render(): string {
    return `<section class="view-recycle">
      <h2>Recycle bin</h2>
      ${renderRecycleBin(this.rows)}
    </section>`;
  }
}
