/* Display formatting only. Domain numbers always arrive from the API;
   nothing here computes, it just renders. */

/** Metres (or the active length unit) shown to millimetre precision. */
export function fmt3(value: number): string {
  return value.toFixed(3);
}

/** Counts and other integers straight through. */
export function fmtInt(value: number): string {
  return String(value);
}

/** ISO datetime from the API -> "YYYY-MM-DD HH:MM" for grid cells. */
export function fmtWhen(iso: string | null): string {
  if (!iso) {
    return "";
  }
  return iso.slice(0, 16).replace("T", " ");
}

/** ISO date or null -> "YYYY-MM-DD" or empty. */
export function fmtDate(iso: string | null): string {
  return iso ?? "";
}

/** Escape text for interpolation into HTML template literals. */
export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
