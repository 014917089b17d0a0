/* Entry point: mounts the active view into #view, wires navigation and
   event delegation, and surfaces API errors in the banner with their
   machine code. All handlers wait for the service before re-rendering;
   nothing updates optimistically. */

import { Api, ApiCallError } from "./api.js";
import { esc } from "./format.js";
import { BeaconMapView, hitTest } from "./views/beacons.js";
import { CatalogView } from "./views/catalog.js";
import { ComputeView } from "./views/compute.js";
import { LendingWorkflow } from "./views/lending.js";
import { RecycleBinView } from "./views/recycle.js";
import { StatsView } from "./views/stats.js";

type ViewName = "Lending" | "RecycleBin" | "Stats" | "Beacons" | "Catalog" | "Compute";

const api = new Api("");
const today = new Date().toISOString().slice(0, 10);

const views = {
  Lending: new LendingWorkflow(api),
  RecycleBin: new RecycleBinView(api),
  Stats: new StatsView(api, today),
  Beacons: new BeaconMapView(api),
  Catalog: new CatalogView(api),
  Compute: new ComputeView(api),
};

let active: ViewName = "Lending";

const viewRoot = document.getElementById("view")!;
const banner = document.getElementById("banner")!;
const nav = document.getElementById("nav")!;

function showError(err: unknown): void {
  const text =
    err instanceof ApiCallError ? `${err.code}: ${err.message}` : String(err);
  banner.innerHTML = `<div class="banner-error">${esc(text)}
    <button data-action="dismiss-banner">×</button></div>`;
}

function clearBanner(): void {
  banner.innerHTML = "";
}

function paint(): void {
  viewRoot.innerHTML = views[active].render();
  if (active === "Beacons") {
    paintMap();
  }
}

function paintMap(): void {
  const canvas = document.getElementById("beacon-map") as HTMLCanvasElement | null;
  if (!canvas) {
    return;
  }
  const view = views.Beacons;
  const ctx = canvas.getContext("2d")!;
  if (view.fc && view.viewport.metresPerPixel === 1 && view.viewport.centerE === 0) {
    view.viewport.fitBounds(view.fc.features, canvas.width, canvas.height);
  }
  view.draw(ctx, canvas.width, canvas.height);

  canvas.onclick = async (ev) => {
    const rect = canvas.getBoundingClientRect();
    const x = ev.clientX - rect.left;
    const y = ev.clientY - rect.top;
    if (!view.fc) {
      return;
    }
    const hitFeature = hitTest(view.fc.features, view.viewport, x, y, canvas.width, canvas.height);
    if (hitFeature) {
      await run(() => view.select(hitFeature.properties.beacon_id));
    }
  };
  canvas.onwheel = (ev) => {
    ev.preventDefault();
    const rect = canvas.getBoundingClientRect();
    view.viewport.zoomAt(
      ev.deltaY < 0 ? 1.2 : 1 / 1.2,
      ev.clientX - rect.left,
      ev.clientY - rect.top,
      canvas.width,
      canvas.height
    );
    view.draw(ctx, canvas.width, canvas.height);
  };
  let dragFrom: [number, number] | null = null;
  canvas.onmousedown = (ev) => {
    dragFrom = [ev.clientX, ev.clientY];
  };
  canvas.onmousemove = (ev) => {
    if (!dragFrom) {
      return;
    }
    view.viewport.panPixels(ev.clientX - dragFrom[0], ev.clientY - dragFrom[1]);
    dragFrom = [ev.clientX, ev.clientY];
    view.draw(ctx, canvas.width, canvas.height);
  };
  canvas.onmouseup = () => {
    dragFrom = null;
  };
}

/** Run a view action, repaint, and banner any failure. */
async function run(action: () => Promise<unknown>): Promise<void> {
  try {
    await action();
    clearBanner();
  } catch (err) {
    showError(err);
  }
  paint();
}

async function activate(name: ViewName): Promise<void> {
  active = name;
  for (const b of nav.querySelectorAll("button")) {
    b.classList.toggle("active", b.dataset.view === name);
  }
  const view = views[name];
  await run(async () => {
    if ("load" in view) {
      await view.load();
    }
  });
}

function formValue(form: HTMLElement, field: string): string {
  const el = form.querySelector<HTMLInputElement>(`[data-field="${field}"]`);
  return el ? el.value : "";
}

nav.addEventListener("click", (ev) => {
  const button = (ev.target as HTMLElement).closest<HTMLElement>("button[data-view]");
  if (button) {
    void activate(button.dataset.view as ViewName);
  }
});

banner.addEventListener("click", (ev) => {
  const el = (ev.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (el?.dataset.action === "dismiss-banner") {
    clearBanner();
  }
});

viewRoot.addEventListener("submit", (ev) => {
  const form = (ev.target as HTMLElement).closest<HTMLFormElement>("form[data-action]");
  if (!form) {
    return;
  }
  ev.preventDefault();
  const get = (field: string) => formValue(form, field);
  switch (form.dataset.action) {
    case "submit-lending": {
      const view = views.Lending;
      view.form.person_name = get("person_name");
      view.form.person_department = get("person_department");
      view.form.person_phone = get("person_phone");
      view.form.remarks = get("remarks");
      view.form.lines = [...form.querySelectorAll<HTMLElement>(".form-line")].map(
        (line) => ({
          instrument_name:
            line.querySelector<HTMLInputElement>(`[data-field="instrument_name"]`)?.value ?? "",
          quantity: Number(
            line.querySelector<HTMLInputElement>(`[data-field="quantity"]`)?.value ?? "0"
          ),
          serials:
            line.querySelector<HTMLInputElement>(`[data-field="serials"]`)?.value ?? "",
        })
      );
      void run(() => view.submitNew());
      break;
    }
    case "set-range":
      void run(() => views.Stats.setRange(get("from"), get("to")));
      break;
    case "catalog-search":
      void run(() => views.Catalog.search(get("q")));
      break;
    case "compute-area": {
      views.Compute.areaForm.vertices = get("vertices");
      views.Compute.areaForm.unit = get("unit") || views.Compute.areaForm.unit;
      void run(() => views.Compute.submitArea());
      break;
    }
    case "compute-join": {
      const f = views.Compute.joinForm;
      f.fromEasting = get("fromEasting");
      f.fromNorthing = get("fromNorthing");
      f.toEasting = get("toEasting");
      f.toNorthing = get("toNorthing");
      void run(() => views.Compute.submitJoin());
      break;
    }
    case "compute-curve": {
      const f = views.Compute.curveForm;
      f.deflection = get("deflection");
      f.radius = get("radius");
      f.curveLength = get("curveLength");
      f.ipChainage = get("ipChainage");
      f.chord = get("chord");
      void run(() => views.Compute.submitCurve());
      break;
    }
    case "compute-levels": {
      const f = views.Compute.levelsForm;
      f.method = get("method");
      f.startRl = get("startRl");
      f.closingRl = get("closingRl");
      f.rows = get("rows");
      void run(() => views.Compute.submitLevels());
      break;
    }
    case "compute-detailing": {
      const f = views.Compute.detailingForm;
      f.easting = get("easting");
      f.northing = get("northing");
      f.elevation = get("elevation");
      f.instrumentHeight = get("instrumentHeight");
      f.referenceBearing = get("referenceBearing");
      f.hcrToReference = get("hcrToReference");
      f.rays = get("rays");
      void run(() => views.Compute.submitDetailing());
      break;
    }
  }
});

viewRoot.addEventListener("change", (ev) => {
  const el = (ev.target as HTMLElement).closest<HTMLSelectElement>(
    `select[data-action="area-unit"]`
  );
  if (el) {
    void run(() => views.Compute.setAreaUnit(el.value));
  }
});

viewRoot.addEventListener("click", (ev) => {
  const el = (ev.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!el) {
    return;
  }
  const id = Number(el.dataset.id ?? "0");
  switch (el.dataset.action) {
    case "select-lending":
      views.Lending.selectedId = id;
      views.Lending.lastNote = null;
      paint();
      break;
    case "return-lending":
      void run(() => views.Lending.returnSelected());
      break;
    case "delete-lending":
      void run(() => views.Lending.deleteSelected());
      break;
    case "add-line":
      views.Lending.form.lines.push({ instrument_name: "", quantity: 1, serials: "" });
      paint();
      break;
    case "restore":
      void run(() => views.RecycleBin.restore(el.dataset.kind ?? "", id));
      break;
    case "set-unit":
      void run(() => views.Beacons.setUnit(el.dataset.unit ?? "m"));
      break;
    case "toggle-mark":
      void run(() => views.Beacons.toggleMark(id));
      break;
    case "locate":
      void run(() => views.Catalog.locate(el.dataset.name ?? ""));
      break;
    case "check-job":
      void run(() => views.Catalog.checkJob(el.dataset.type ?? ""));
      break;
    case "print":
      window.print();
      break;
  }
});

void activate("Lending");
