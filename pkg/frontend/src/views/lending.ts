/* Lending view: transaction grid with a detail panel under the selected
   row, a new-lending form checked against live availability before it
   ever reaches the service, return with the printable note, soft delete. */

import { Api } from "../api.js";
import type { LendingIn, LendingOut, StockOut } from "../types.js";
import { esc, fmtInt, fmtWhen } from "../format.js";

export interface LendingFormLine {
  instrument_name: string;
  quantity: number;
  serials: string; // "+"-separated, as typed
}

export interface LendingForm {
  person_name: string;
  person_department: string;
  person_phone: string;
  remarks: string;
  lines: LendingFormLine[];
}

export function emptyLendingForm(): LendingForm {
  return {
    person_name: "",
    person_department: "",
    person_phone: "",
    remarks: "",
    lines: [{ instrument_name: "", quantity: 1, serials: "" }],
  };
}

export type FormVerdict = { ok: true } | { ok: false; message: string };

/**
 * Pre-submit check against live stock. Messages lead with the same
 * machine codes the service would answer with, so the clerk sees one
 * vocabulary whether the check fires here or server-side.
 */
export function validateLendingForm(form: LendingForm, stock: StockOut[]): FormVerdict {
  if (!form.person_name.trim()) {
    return { ok: false, message: "Borrower name is required." };
  }
  const lines = form.lines.filter((l) => l.instrument_name.trim());
  if (lines.length === 0) {
    return { ok: false, message: "At least one instrument line is required." };
  }
  for (const line of lines) {
    const name = line.instrument_name.trim();
    if (!Number.isInteger(line.quantity) || line.quantity <= 0) {
      return { ok: false, message: `Quantity for ${name} must be a positive whole number.` };
    }
    const row = stock.find(
      (s) => s.instrument_name.toLowerCase() === name.toLowerCase()
    );
    if (!row) {
      return { ok: false, message: `UNKNOWN_INSTRUMENT: ${name} is not stocked.` };
    }
    if (line.quantity > row.remaining) {
      return {
        ok: false,
        message:
          `INSUFFICIENT_STOCK: only ${row.remaining} of ${row.instrument_name} ` +
          `remaining, asked for ${line.quantity}.`,
      };
    }
  }
  return { ok: true };
}

export function formToRequest(form: LendingForm): LendingIn {
  return {
    person_name: form.person_name.trim(),
    person_department: form.person_department.trim(),
    person_phone: form.person_phone.trim(),
    remarks: form.remarks.trim(),
    items: form.lines
      .filter((l) => l.instrument_name.trim())
      .map((l) => ({
        instrument_name: l.instrument_name.trim(),
        quantity: l.quantity,
        serials: l.serials.split("+").map((s) => s.trim()).filter(Boolean),
      })),
  };
}

function detailSummary(row: LendingOut): string {
  return row.details
    .map((d) => {
      const serials = d.serials.length ? ` [${d.serials.join(", ")}]` : "";
      return `${d.quantity} x ${d.instrument_name}${serials}`;
    })
    .join("; ");
}

export function renderLendingGrid(rows: LendingOut[], selectedId: number | null): string {
  if (rows.length === 0) {
    return `<p class="empty">No lendings recorded yet.</p>`;
  }
  const body = rows
    .map((r) => {
      const cls = [
        r.lending_id === selectedId ? "selected" : "",
        r.is_returned ? "returned" : "open",
      ]
        .filter(Boolean)
        .join(" ");
      return `<tr class="${cls}" data-action="select-lending" data-id="${r.lending_id}">
        <td>${r.lending_id}</td>
        <td>${fmtWhen(r.date)}</td>
        <td>${esc(r.person_name)}</td>
        <td>${esc(r.person_department)}</td>
        <td>${fmtInt(r.total_instru)}</td>
        <td>${r.is_returned ? `returned ${fmtWhen(r.return_date)}` : "open"}</td>
      </tr>`;
    })
    .join("");
  return `<table class="grid">
    <thead><tr><th>#</th><th>date</th><th>borrower</th><th>department</th>
    <th>items</th><th>status</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

/** Bottom panel: everything about the selected lending, plus actions. */
export function renderDetailPanel(row: LendingOut | null): string {
  if (!row) {
    return `<p class="empty">Select a lending to see its details.</p>`;
  }
  const lines = row.details
    .map(
      (d) => `<tr><td>${esc(d.instrument_name)}</td><td>${fmtInt(d.quantity)}</td>
      <td>${esc(d.serials.join(", "))}</td></tr>`
    )
    .join("");
  const actions = row.is_returned
    ? `<button data-action="delete-lending" data-id="${row.lending_id}">Delete</button>`
    : `<button data-action="return-lending" data-id="${row.lending_id}">Return</button>`;
  return `<div class="detail">
    <h3>Lending #${row.lending_id} - ${esc(row.person_name)}</h3>
    <p>${esc(row.person_department)} ${esc(row.person_phone)}</p>
    <p>${esc(row.remarks)}</p>
    <p>${esc(detailSummary(row))}</p>
    <table class="grid"><thead><tr><th>instrument</th><th>qty</th><th>serials</th></tr></thead>
    <tbody>${lines}</tbody></table>
    ${actions}
  </div>`;
}

/** Printable return note, shown after a successful return. */
export function renderReturnNote(noteText: string): string {
  return `<div class="return-note printable">
    <pre>${esc(noteText)}</pre>
    <button data-action="print">Print</button>
  </div>`;
}

export function renderLendingForm(form: LendingForm, stock: StockOut[], error: string | null): string {
  const options = stock
    .map(
      (s) =>
        `<option value="${esc(s.instrument_name)}">` +
        `${esc(s.instrument_name)} (${fmtInt(s.remaining)} left)</option>`
    )
    .join("");
  const lines = form.lines
    .map(
      (l, i) => `<div class="form-line" data-line="${i}">
      <input list="stock-names" data-field="instrument_name" data-line="${i}"
             placeholder="instrument" value="${esc(l.instrument_name)}">
      <input type="number" min="1" data-field="quantity" data-line="${i}"
             value="${l.quantity}">
      <input data-field="serials" data-line="${i}" placeholder="serial+serial"
             value="${esc(l.serials)}">
    </div>`
    )
    .join("");
  return `<form class="lending-form" data-action="submit-lending">
    <datalist id="stock-names">${options}</datalist>
    <input data-field="person_name" placeholder="borrower" value="${esc(form.person_name)}">
    <input data-field="person_department" placeholder="department"
           value="${esc(form.person_department)}">
    <input data-field="person_phone" placeholder="phone" value="${esc(form.person_phone)}">
    <input data-field="remarks" placeholder="remarks" value="${esc(form.remarks)}">
    ${lines}
    <button type="button" data-action="add-line">+ line</button>
    ${error ? `<p class="form-error">${esc(error)}</p>` : ""}
    <button type="submit">Record lending</button>
  </form>`;
}

/**
 * State machine behind the view. Mutations wait for the service: a
 * submit for an entity is refused while one is already in flight, and
 * nothing updates optimistically.
 */
export class LendingWorkflow {
  rows: LendingOut[] = [];
  stock: StockOut[] = [];
  selectedId: number | null = null;
  form: LendingForm = emptyLendingForm();
  formError: string | null = null;
  lastNote: string | null = null;
  private inFlight = new Set<string>();

  constructor(private readonly api: Api) {}

  get selected(): LendingOut | null {
    return this.rows.find((r) => r.lending_id === this.selectedId) ?? null;
  }

  async load(): Promise<void> {
    [this.rows, this.stock] = await Promise.all([
      this.api.listLendings(),
      this.api.stock(),
    ]);
  }

  private busy(key: string): boolean {
    return this.inFlight.has(key);
  }

  private async guarded<T>(key: string, op: () => Promise<T>): Promise<T> {
    this.inFlight.add(key);
    try {
      return await op();
    } finally {
      this.inFlight.delete(key);
    }
  }

  /**
   * Validates against the freshest stock we hold, then submits. Returns
   * false when the form never left the browser (validation or an
   * in-flight submit); the caller re-renders either way.
   */
  async submitNew(): Promise<boolean> {
    if (this.busy("new")) {
      return false;
    }
    const verdict = validateLendingForm(this.form, this.stock);
    if (!verdict.ok) {
      this.formError = verdict.message;
      return false;
    }
    this.formError = null;
    await this.guarded("new", async () => {
      await this.api.createLending(formToRequest(this.form));
      this.form = emptyLendingForm();
      await this.load();
    });
    return true;
  }

  async returnSelected(): Promise<void> {
    const id = this.selectedId;
    if (id === null || this.busy(`lending:${id}`)) {
      return;
    }
    await this.guarded(`lending:${id}`, async () => {
      const out = await this.api.returnLending(id);
      this.lastNote = out.note_text;
      await this.load();
    });
  }

  async deleteSelected(): Promise<void> {
    const id = this.selectedId;
    if (id === null || this.busy(`lending:${id}`)) {
      return;
    }
    await this.guarded(`lending:${id}`, async () => {
      await this.api.deleteLending(id);
      this.selectedId = null;
      await this.load();
    });
  }

  render(): string {
    return `<section class="view-lending">
      <h2>Lendings</h2>
      ${renderLendingForm(this.form, this.stock, this.formError)}
      ${renderLendingGrid(this.rows, this.selectedId)}
      ${renderDetailPanel(this.selected)}
      ${this.lastNote ? renderReturnNote(this.lastNote) : ""}
    </section>`;
  }
}
