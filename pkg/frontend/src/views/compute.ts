/* Computation forms: area, join of two points, detailing by rays, curve
   setting-out, level reduction. Inputs are parsed from the form fields
   and posted as-is; everything shown afterwards is the service's answer
   (DMS strings arrive pre-formatted from the API). */

import { Api, ApiCallError } from "../api.js";
import type {
  AreaOut,
  CurveOut,
  DetailingOut,
  JoinOut,
  LevelsOut,
} from "../types.js";
import type { DetailingRequest, LevelsRequest } from "../api.js";
import { esc, fmt3 } from "../format.js";

/** Areas rendered to four decimals in whatever unit the service chose. */
function fmtArea(value: number): string {
  return value.toFixed(4);
}

// -- input parsing ----------------------------------------------------------

export function parseVertices(text: string): [number, number][] {
  const vertices: [number, number][] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line) {
      continue;
    }
    const parts = line.split(",").map((p) => Number(p.trim()));
    if (parts.length !== 2 || parts.some((n) => !Number.isFinite(n))) {
      throw new Error(`Vertex line "${line}" is not "easting,northing".`);
    }
    vertices.push([parts[0], parts[1]]);
  }
  return vertices;
}

export function parseLevelRows(text: string): LevelsRequest["rows"] {
  const rows: LevelsRequest["rows"] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line) {
      continue;
    }
    const parts = line.split(",");
    if (parts.length < 4) {
      throw new Error(`Row "${line}" is not "POINT,BS,IS,FS[,remarks]".`);
    }
    const num = (s: string, what: string): number | undefined => {
      const t = s.trim();
      if (!t) {
        return undefined;
      }
      const n = Number(t);
      if (!Number.isFinite(n)) {
        throw new Error(`${what} reading "${t}" is not a number.`);
      }
      return n;
    };
    rows.push({
      point: parts[0].trim(),
      backsight: num(parts[1], "BS"),
      intersight: num(parts[2], "IS"),
      foresight: num(parts[3], "FS"),
      remarks: parts.slice(4).join(",").trim(),
    });
  }
  return rows;
}

export function parseRayRows(text: string): DetailingRequest["observations"] {
  const rays: DetailingRequest["observations"] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line) {
      continue;
    }
    const parts = line.split(",").map((p) => p.trim());
    if (parts.length < 4) {
      throw new Error(`Ray "${line}" is not "NAME,HCR,VCR,SLOPE[,TARGET_H]".`);
    }
    const slope = Number(parts[3]);
    const target = parts[4] ? Number(parts[4]) : 0;
    if (!Number.isFinite(slope) || !Number.isFinite(target)) {
      throw new Error(`Ray "${line}" has a non-numeric distance.`);
    }
    rays.push({
      point_name: parts[0],
      hcr: parts[1],
      vcr_zenith: parts[2],
      slope_distance: slope,
      target_height: target,
    });
  }
  return rays;
}

// -- result rendering -------------------------------------------------------

export function renderAreaResult(area: AreaOut): string {
  return `<div class="result area-result">
    <p>area: <strong>${fmtArea(area.area)} ${esc(area.unit)}</strong>
    (${fmtArea(area.area_m2)} m2, ${area.vertex_count} vertices)</p>
  </div>`;
}

export function renderJoinResult(join: JoinOut): string {
  return `<div class="result join-result">
    <p>bearing <strong>${esc(join.bearing_dms)}</strong>,
    distance <strong>${fmt3(join.distance)} ${esc(join.unit)}</strong></p>
  </div>`;
}

export function renderCurveReport(curve: CurveOut): string {
  const row = (label: string, value: string) =>
    `<tr><th>${label}</th><td>${value}</td></tr>`;
  return `<table class="kv curve-report">
    ${row("deflection", esc(curve.deflection_dms))}
    ${row("radius", `${fmt3(curve.radius)} m`)}
    ${row("curve length", `${fmt3(curve.curve_length)} m`)}
    ${row("tangent length", `${fmt3(curve.tangent_length)} m`)}
    ${row("external distance", `${fmt3(curve.external_distance)} m`)}
    ${row("mid-ordinate", `${fmt3(curve.mid_ordinate)} m`)}
    ${row("long chord", `${fmt3(curve.long_chord)} m`)}
    ${row("chainage IP", fmt3(curve.ip_chainage))}
    ${row("chainage T1", fmt3(curve.chainage_t1))}
    ${row("chainage T2", fmt3(curve.chainage_t2))}
    ${row("initial sub-chord", `${fmt3(curve.initial_subchord)} m`)}
    ${row("final sub-chord", `${fmt3(curve.final_subchord)} m`)}
  </table>`;
}

export function renderPegTable(curve: CurveOut): string {
  const body = curve.pegs
    .map(
      (p) => `<tr>
      <td>${esc(p.name)}</td>
      <td>${fmt3(p.chainage)}</td>
      <td>${fmt3(p.chord)}</td>
      <td>${esc(p.tangential_angle_dms)}</td>
      <td>${esc(p.cumulative_angle_dms)}</td>
    </tr>`
    )
    .join("");
  return `<table class="grid peg-table">
    <thead><tr><th>peg</th><th>chainage</th><th>chord</th>
    <th>tangential</th><th>cumulative</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

/**
 * Schematic sketch: both tangents meeting at the IP and the arc between
 * tangent points. Proportions come from the solved tangent length,
 * radius and deflection; the layout itself is display geometry.
 */
export function renderCurveSketch(curve: CurveOut): string {
  const t = curve.tangent_length;
  const r = curve.radius;
  const d = (curve.deflection_deg * Math.PI) / 180;
  const t1: [number, number] = [0, 0];
  const ip: [number, number] = [t, 0];
  const t2: [number, number] = [t + t * Math.cos(d), t * Math.sin(d)];
  const sag = r * (1 - Math.cos(d / 2));
  const xs = [t1[0], ip[0], t2[0]];
  const ys = [t1[1], ip[1], t2[1], sag];
  const pad = Math.max(t, r) * 0.08;
  const minX = Math.min(...xs) - pad;
  const minY = Math.min(...ys) - pad;
  const w = Math.max(...xs) - minX + pad;
  const h = Math.max(...ys) - minY + pad;
  const label = (p: [number, number], text: string, dy: number) =>
    `<text x="${p[0]}" y="${p[1] + dy}" class="sketch-label">${text}</text>`;
  return `<svg class="curve-sketch" viewBox="${minX} ${minY} ${w} ${h}"
       preserveAspectRatio="xMidYMid meet" role="img" aria-label="curve sketch">
    <path class="tangents" d="M ${t1[0]} ${t1[1]} L ${ip[0]} ${ip[1]} L ${t2[0]} ${t2[1]}"
          vector-effect="non-scaling-stroke"/>
    <path class="arc" d="M ${t1[0]} ${t1[1]} A ${r} ${r} 0 0 1 ${t2[0]} ${t2[1]}"
          vector-effect="non-scaling-stroke"/>
    ${label(t1, "T1", -pad / 2)}
    ${label(ip, "IP", -pad / 2)}
    ${label(t2, "T2", pad)}
  </svg>`;
}

/** Classic columnar book with the arithmetic check row at the bottom. */
export function renderLevelBook(levels: LevelsOut): string {
  const hpc = levels.method === "height_of_collimation";
  const cell = (v: number | null) => (v === null ? "" : fmt3(v));
  const head = hpc
    ? `<th>point</th><th>BS</th><th>IS</th><th>FS</th><th>HPC</th><th>RL</th><th>remarks</th>`
    : `<th>point</th><th>BS</th><th>IS</th><th>FS</th><th>rise</th><th>fall</th><th>RL</th><th>remarks</th>`;
  const body = levels.rows
    .map((r) => {
      const mid = hpc
        ? `<td>${cell(r.height_of_collimation)}</td>`
        : `<td>${cell(r.rise)}</td><td>${cell(r.fall)}</td>`;
      return `<tr>
        <td>${esc(r.point)}</td>
        <td>${cell(r.backsight)}</td>
        <td>${cell(r.intersight)}</td>
        <td>${cell(r.foresight)}</td>
        ${mid}
        <td>${fmt3(r.reduced_level)}</td>
        <td>${esc(r.remarks)}</td>
      </tr>`;
    })
    .join("");
  const checkClass = levels.checks_pass ? "checks-pass" : "checks-fail";
  const sums = hpc
    ? `<td>${fmt3(levels.sum_backsight)}</td><td></td><td>${fmt3(levels.sum_foresight)}</td><td></td>`
    : `<td>${fmt3(levels.sum_backsight)}</td><td></td><td>${fmt3(levels.sum_foresight)}</td>` +
      `<td>${fmt3(levels.sum_rise)}</td><td>${fmt3(levels.sum_fall)}</td>`;
  const misclose =
    levels.misclose === null ? "" : ` misclose ${fmt3(levels.misclose)} m,`;
  const failures = levels.failures.length
    ? `<p class="warn">${levels.failures.map(esc).join("<br>")}</p>`
    : "";
  return `<div class="level-book">
    <table class="grid">
      <thead><tr>${head}</tr></thead>
      <tbody>${body}</tbody>
      <tfoot><tr class="check-row ${checkClass}">
        <td>Σ</td>${sums}
        <td>${fmt3(levels.last_rl)}</td>
        <td>checks ${levels.checks_pass ? "PASS" : "FAIL"},${misclose}
            first RL ${fmt3(levels.first_rl)}</td>
      </tr></tfoot>
    </table>
    ${failures}
  </div>`;
}

export function renderDetailingResult(det: DetailingOut): string {
  const body = det.points
    .map(
      (p) => `<tr>
      <td>${esc(p.point_name)}</td>
      <td>${fmt3(p.easting)}</td>
      <td>${fmt3(p.northing)}</td>
      <td>${fmt3(p.elevation)}</td>
      <td>${esc(p.bearing_dms)}</td>
      <td>${fmt3(p.horizontal_distance)}</td>
    </tr>`
    )
    .join("");
  return `<table class="grid detailing-result">
    <thead><tr><th>point</th><th>easting</th><th>northing</th><th>elevation</th>
    <th>bearing</th><th>h-dist</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

// -- view ---------------------------------------------------------------------

interface AreaForm {
  vertices: string;
  unit: string;
}

interface JoinForm {
  fromEasting: string;
  fromNorthing: string;
  toEasting: string;
  toNorthing: string;
  unit: string;
}

interface CurveForm {
  deflection: string;
  radius: string;
  curveLength: string;
  ipChainage: string;
  chord: string;
}

interface LevelsForm {
  method: string;
  startRl: string;
  closingRl: string;
  rows: string;
}

interface DetailingForm {
  easting: string;
  northing: string;
  elevation: string;
  instrumentHeight: string;
  referenceBearing: string;
  hcrToReference: string;
  rays: string;
}

function requireNumber(value: string, what: string): number {
  const n = Number(value.trim());
  if (!value.trim() || !Number.isFinite(n)) {
    throw new Error(`${what} must be a number.`);
  }
  return n;
}

function errorText(err: unknown): string {
  if (err instanceof ApiCallError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

export class ComputeView {
  areaForm: AreaForm = { vertices: "", unit: "m2" };
  joinForm: JoinForm = {
    fromEasting: "",
    fromNorthing: "",
    toEasting: "",
    toNorthing: "",
    unit: "m",
  };
  curveForm: CurveForm = {
    deflection: "",
    radius: "",
    curveLength: "",
    ipChainage: "",
    chord: "",
  };
  levelsForm: LevelsForm = {
    method: "rise_fall",
    startRl: "",
    closingRl: "",
    rows: "",
  };
  detailingForm: DetailingForm = {
    easting: "",
    northing: "",
    elevation: "",
    instrumentHeight: "",
    referenceBearing: "",
    hcrToReference: "",
    rays: "",
  };
  areaResult: AreaOut | null = null;
  joinResult: JoinOut | null = null;
  curveResult: CurveOut | null = null;
  levelsResult: LevelsOut | null = null;
  detailingResult: DetailingOut | null = null;
  errors: Record<string, string | null> = {
    area: null,
    join: null,
    curve: null,
    levels: null,
    detailing: null,
  };

  constructor(private readonly api: Api) {}

  async submitArea(): Promise<void> {
    try {
      const vertices = parseVertices(this.areaForm.vertices);
      this.areaResult = await this.api.computeArea(vertices, this.areaForm.unit);
      this.errors.area = null;
    } catch (err) {
      this.errors.area = errorText(err);
    }
  }

  /** Unit change re-queries the service; no local conversion. */
  async setAreaUnit(unit: string): Promise<void> {
    this.areaForm.unit = unit;
    if (this.areaForm.vertices.trim()) {
      await this.submitArea();
    }
  }

  async submitJoin(): Promise<void> {
    try {
      const f = this.joinForm;
      this.joinResult = await this.api.computeJoin(
        [
          requireNumber(f.fromEasting, "from easting"),
          requireNumber(f.fromNorthing, "from northing"),
        ],
        [
          requireNumber(f.toEasting, "to easting"),
          requireNumber(f.toNorthing, "to northing"),
        ],
        f.unit
      );
      this.errors.join = null;
    } catch (err) {
      this.errors.join = errorText(err);
    }
  }

  async submitCurve(): Promise<void> {
    try {
      const body: Parameters<Api["computeCurve"]>[0] = {
        deflection: this.curveForm.deflection.trim(),
        ip_chainage: requireNumber(this.curveForm.ipChainage, "IP chainage"),
        standard_chord: requireNumber(this.curveForm.chord, "standard chord"),
      };
      if (this.curveForm.radius.trim()) {
        body.radius = requireNumber(this.curveForm.radius, "radius");
      }
      if (this.curveForm.curveLength.trim()) {
        body.curve_length = requireNumber(this.curveForm.curveLength, "curve length");
      }
      this.curveResult = await this.api.computeCurve(body);
      this.errors.curve = null;
    } catch (err) {
      this.errors.curve = errorText(err);
    }
  }

  async submitLevels(): Promise<void> {
    try {
      const body: LevelsRequest = {
        method: this.levelsForm.method,
        start_rl: requireNumber(this.levelsForm.startRl, "start RL"),
        rows: parseLevelRows(this.levelsForm.rows),
      };
      if (this.levelsForm.closingRl.trim()) {
        body.closing_rl = requireNumber(this.levelsForm.closingRl, "closing RL");
      }
      this.levelsResult = await this.api.computeLevels(body);
      this.errors.levels = null;
    } catch (err) {
      this.errors.levels = errorText(err);
    }
  }

  async submitDetailing(): Promise<void> {
    try {
      const f = this.detailingForm;
      const body: DetailingRequest = {
        station: {
          easting: requireNumber(f.easting, "station easting"),
          northing: requireNumber(f.northing, "station northing"),
          elevation: requireNumber(f.elevation, "station elevation"),
        },
        instrument_height: requireNumber(f.instrumentHeight, "instrument height"),
        reference_bearing: f.referenceBearing.trim(),
        hcr_to_reference: f.hcrToReference.trim(),
        observations: parseRayRows(f.rays),
      };
      this.detailingResult = await this.api.computeDetailing(body);
      this.errors.detailing = null;
    } catch (err) {
      this.errors.detailing = errorText(err);
    }
  }

  render(): string {
    const err = (key: string) =>
      this.errors[key] ? `<p class="form-error">${esc(this.errors[key]!)}</p>` : "";
    return `<section class="view-compute">
      <h2>Area</h2>
      <form data-action="compute-area">
        <textarea data-field="vertices" rows="5"
          placeholder="easting,northing per line">${esc(this.areaForm.vertices)}</textarea>
        <select data-field="unit" data-action="area-unit">
          ${["m2", "ha", "acre", "ft2"]
            .map(
              (u) =>
                `<option value="${u}" ${u === this.areaForm.unit ? "selected" : ""}>${u}</option>`
            )
            .join("")}
        </select>
        <button type="submit">Compute area</button>
      </form>
      ${err("area")}
      ${this.areaResult ? renderAreaResult(this.areaResult) : ""}

      <h2>Join</h2>
      <form data-action="compute-join">
        <input data-field="fromEasting" placeholder="from easting"
               value="${esc(this.joinForm.fromEasting)}">
        <input data-field="fromNorthing" placeholder="from northing"
               value="${esc(this.joinForm.fromNorthing)}">
        <input data-field="toEasting" placeholder="to easting"
               value="${esc(this.joinForm.toEasting)}">
        <input data-field="toNorthing" placeholder="to northing"
               value="${esc(this.joinForm.toNorthing)}">
        <button type="submit">Compute join</button>
      </form>
      ${err("join")}
      ${this.joinResult ? renderJoinResult(this.joinResult) : ""}

      <h2>Curve setting-out</h2>
      <form data-action="compute-curve">
        <input data-field="deflection" placeholder="deflection (30 or 30°00'00&quot;)"
               value="${esc(this.curveForm.deflection)}">
        <input data-field="radius" placeholder="radius m"
               value="${esc(this.curveForm.radius)}">
        <input data-field="curveLength" placeholder="or curve length m"
               value="${esc(this.curveForm.curveLength)}">
        <input data-field="ipChainage" placeholder="IP chainage"
               value="${esc(this.curveForm.ipChainage)}">
        <input data-field="chord" placeholder="standard chord m"
               value="${esc(this.curveForm.chord)}">
        <button type="submit">Solve curve</button>
      </form>
      ${err("curve")}
      ${
        this.curveResult
          ? renderCurveSketch(this.curveResult) +
            renderCurveReport(this.curveResult) +
            renderPegTable(this.curveResult) +
            `<button data-action="print">Print report</button>`
          : ""
      }

      <h2>Level book</h2>
      <form data-action="compute-levels">
        <select data-field="method">
          <option value="rise_fall" ${this.levelsForm.method === "rise_fall" ? "selected" : ""}>rise and fall</option>
          <option value="height_of_collimation" ${this.levelsForm.method === "height_of_collimation" ? "selected" : ""}>height of collimation</option>
        </select>
        <input data-field="startRl" placeholder="start RL"
               value="${esc(this.levelsForm.startRl)}">
        <input data-field="closingRl" placeholder="closing RL (optional)"
               value="${esc(this.levelsForm.closingRl)}">
        <textarea data-field="rows" rows="6"
          placeholder="POINT,BS,IS,FS[,remarks] per line">${esc(this.levelsForm.rows)}</textarea>
        <button type="submit">Reduce levels</button>
      </form>
      ${err("levels")}
      ${this.levelsResult ? renderLevelBook(this.levelsResult) : ""}

      <h2>Detailing by rays</h2>
      <form data-action="compute-detailing">
        <input data-field="easting" placeholder="station easting"
               value="${esc(this.detailingForm.easting)}">
        <input data-field="northing" placeholder="station northing"
               value="${esc(this.detailingForm.northing)}">
        <input data-field="elevation" placeholder="station elevation"
               value="${esc(this.detailingForm.elevation)}">
        <input data-field="instrumentHeight" placeholder="instrument height"
               value="${esc(this.detailingForm.instrumentHeight)}">
        <input data-field="referenceBearing" placeholder="reference bearing"
               value="${esc(this.detailingForm.referenceBearing)}">
        <input data-field="hcrToReference" placeholder="HCR to reference"
               value="${esc(this.detailingForm.hcrToReference)}">
        <textarea data-field="rays" rows="5"
          placeholder="NAME,HCR,VCR,SLOPE[,TARGET_H] per line">${esc(this.detailingForm.rays)}</textarea>
        <button type="submit">Compute details</button>
      </form>
      ${err("detailing")}
      ${this.detailingResult ? renderDetailingResult(this.detailingResult) : ""}
    </section>`;
  }
}
