import { describe, expect, it } from "vitest";
import type { BeaconOut, GeoJsonFC, GeoJsonFeature, JoinOut } from "../src/types.js";
import {
  BeaconMapView,
  Viewport,
  hitTest,
  renderBeaconDetail,
  renderJoinPanel,
  scaleBarSpec,
} from "../src/views/beacons.js";
import { ApiCallError } from "../src/api.js";
import beaconsM from "./fixtures/beacons_m.json";
import beaconsFt from "./fixtures/beacons_ft.json";
import geojsonFixture from "./fixtures/geojson.json";
import joinFixture from "./fixtures/join_gm1_gm2.json";
import { callsTo, stubApi } from "./helpers.js";

const geojson = geojsonFixture as GeoJsonFC;
const metres = beaconsM as BeaconOut[];
const feet = beaconsFt as BeaconOut[];
const join = joinFixture as JoinOut;

const W = 640;
const H = 420;

function fitted(): Viewport {
  const vp = new Viewport();
  vp.fitBounds(geojson.features, W, H);
  return vp;
}

describe("Viewport", () => {
  it("fits all recorded beacons inside the canvas with a margin", () => {
    const vp = fitted();
    for (const f of geojson.features) {
      const [x, y] = vp.toScreen(
        f.geometry.coordinates[0],
        f.geometry.coordinates[1],
        W,
        H
      );
      expect(x).toBeGreaterThan(W * 0.05);
      expect(x).toBeLessThan(W * 0.95);
      expect(y).toBeGreaterThan(H * 0.05);
      expect(y).toBeLessThan(H * 0.95);
    }
  });

  it("draws north up: larger northing lands higher on screen", () => {
    const vp = fitted();
    const south = vp.toScreen(1048.25, 2000, W, H);
    const north = vp.toScreen(1048.25, 2081.6, W, H);
    expect(north[1]).toBeLessThan(south[1]);
    // Due east moves right, same height.
    const west = vp.toScreen(1000, 2000, W, H);
    const east = vp.toScreen(1100, 2000, W, H);
    expect(east[0]).toBeGreaterThan(west[0]);
    expect(east[1]).toBeCloseTo(west[1], 9);
  });

  it("round-trips world to screen and back", () => {
    const vp = fitted();
    const [x, y] = vp.toScreen(1048.25, 2081.6, W, H);
    const [e, n] = vp.fromScreen(x, y, W, H);
    expect(e).toBeCloseTo(1048.25, 6);
    expect(n).toBeCloseTo(2081.6, 6);
  });

  it("keeps at least a 10 m span for a single beacon", () => {
    const vp = new Viewport();
    vp.fitBounds([geojson.features[0]], W, H);
    expect(vp.metresPerPixel).toBeGreaterThan(0);
    expect(vp.metresPerPixel * W * 0.8).toBeGreaterThanOrEqual(10);
  });

  it("zoomAt keeps the point under the cursor fixed", () => {
    const vp = fitted();
    const anchor: [number, number] = [100, 300];
    const before = vp.fromScreen(anchor[0], anchor[1], W, H);
    vp.zoomAt(2, anchor[0], anchor[1], W, H);
    const after = vp.toScreen(before[0], before[1], W, H);
    expect(after[0]).toBeCloseTo(anchor[0], 6);
    expect(after[1]).toBeCloseTo(anchor[1], 6);
  });

  it("panPixels shifts the view opposite the drag, north up", () => {
    const vp = fitted();
    const e0 = vp.centerE;
    const n0 = vp.centerN;
    vp.panPixels(50, -20);
    expect(vp.centerE).toBeLessThan(e0);
    expect(vp.centerN).toBeLessThan(n0);
  });
});

describe("scaleBarSpec", () => {
  it("picks a 1/2/5 step that fits the given width", () => {
    const vp = fitted();
    const bar = scaleBarSpec(vp.metresPerPixel, W / 4);
    expect([1, 2, 5]).toContain(bar.metres / 10 ** Math.floor(Math.log10(bar.metres)));
    expect(bar.pixels).toBeLessThanOrEqual(W / 4);
    expect(bar.label).toBe(`${bar.metres} m`);
  });

  it("labels kilometre bars as km", () => {
    const bar = scaleBarSpec(10, 160);
    expect(bar.metres).toBe(1000);
    expect(bar.label).toBe("1 km");
  });
});

describe("hitTest", () => {
  it("returns the beacon under the cursor and null elsewhere", () => {
    const vp = fitted();
    const target = geojson.features[1];
    const [x, y] = vp.toScreen(
      target.geometry.coordinates[0],
      target.geometry.coordinates[1],
      W,
      H
    );
    expect(hitTest(geojson.features, vp, x + 3, y - 2, W, H)?.properties.name).toBe(
      target.properties.name
    );
    expect(hitTest(geojson.features, vp, x + 60, y + 60, W, H)).toBeNull();
  });

  it("prefers the nearest of two candidates in range", () => {
    const vp = new Viewport();
    const at = (id: number, e: number): GeoJsonFeature =>
      ({
        type: "Feature",
        geometry: { type: "Point", coordinates: [e, 0] },
        properties: { beacon_id: id, name: `B${id}`, marked: false },
      }) as GeoJsonFeature;
    const pair = [at(1, 0), at(2, 6)];
    const [x, y] = vp.toScreen(4, 0, W, H);
    expect(hitTest(pair, vp, x, y, W, H)?.properties.beacon_id).toBe(2);
  });
});

describe("beacon rendering", () => {
  it("shows the coordinates exactly as the API sent them, with unit", () => {
    const html = renderBeaconDetail(metres[0], "/media/GM_1_face.png");
    expect(html).toContain("GM 1");
    expect(html).toContain("1000.000 m");
    expect(html).toContain("2000.000 m");
    expect(html).toContain("51.129 m");
    expect(html).toContain(`src="/media/GM_1_face.png"`);
    expect(html).toContain("Mark");
    expect(html).not.toContain("Unmark");
  });

  it("renders feet rows verbatim from the converted listing", () => {
    const html = renderBeaconDetail(feet[0], null);
    expect(html).toContain("3280.840 ft");
    expect(html).toContain("6561.680 ft");
    expect(html).not.toContain("<img");
  });

  it("flags marked beacons and offers Unmark", () => {
    const marked = metres.find((b) => b.marked)!;
    const html = renderBeaconDetail(marked, null);
    expect(html).toContain("⚑");
    expect(html).toContain("Unmark");
    expect(html).toContain(`data-id="${marked.beacon_id}"`);
  });

  it("leaves a missing elevation blank rather than printing null", () => {
    const noElev = metres.find((b) => b.elevation === null)!;
    const html = renderBeaconDetail(noElev, null);
    expect(html).not.toContain("null");
  });

  it("join panel shows the recorded bearing and distance verbatim", () => {
    const html = renderJoinPanel("GM 1", "GM 2", join);
    expect(html).toContain("90°00'00&quot;, 100.000 m");
    expect(html).toContain("GM 1 → GM 2");
  });
});

describe("BeaconMapView", () => {
  function makeView(overrides: Record<string, unknown> = {}) {
    const listReplies = [metres, feet, metres];
    return {
      ...stubApi({
        beaconsGeojson: geojson,
        listBeacons: () => listReplies.shift() ?? metres,
        joinBeacons: join,
        updateBeacon: {},
        ...overrides,
      }),
    };
  }

  it("loads the map and listing together", async () => {
    const { api, calls } = makeView();
    const view = new BeaconMapView(api);
    await view.load();
    expect(view.fc?.features).toHaveLength(3);
    expect(view.beacons).toEqual(metres);
    expect(callsTo(calls, "beaconsGeojson")).toHaveLength(1);
    expect(callsTo(calls, "listBeacons")[0].args).toEqual(["m"]);
    expect(view.render()).toContain(`id="beacon-map"`);
  });

  it("unit toggle re-queries the service; values match the recordings", async () => {
    const { api, calls } = makeView();
    const view = new BeaconMapView(api);
    await view.load();
    await view.setUnit("ft");
    expect(callsTo(calls, "listBeacons").map((c) => c.args[0])).toEqual(["m", "ft"]);
    expect(view.beacons[0].easting).toBeCloseTo(metres[0].easting! / 0.3048, 6);
    const flat = view.render().replace(/\s+/g, " ");
    expect(flat).toContain(`data-unit="ft" disabled>`);
    expect(flat).not.toContain(`data-unit="m" disabled>`);
  });

  it("two selections request the join in pick order", async () => {
    const { api, calls } = makeView();
    const view = new BeaconMapView(api);
    await view.load();
    await view.select(1);
    expect(view.join).toBeNull();
    await view.select(2);
    expect(callsTo(calls, "joinBeacons")[0].args).toEqual(["GM 1", "GM 2", "m"]);
    expect(view.join).toEqual(join);
    expect(view.render()).toContain("90°00'00&quot;, 100.000 m");
  });

  it("a third pick drops the oldest selection", async () => {
    const { api, calls } = makeView();
    const view = new BeaconMapView(api);
    await view.load();
    await view.select(1);
    await view.select(2);
    await view.select(3);
    expect(view.selectedIds).toEqual([2, 3]);
    expect(callsTo(calls, "joinBeacons")[1].args).toEqual(["GM 2", "GM 3", "m"]);
  });

  it("picking a selected beacon deselects it and clears the join", async () => {
    const { api } = makeView();
    const view = new BeaconMapView(api);
    await view.load();
    await view.select(1);
    await view.select(2);
    await view.select(2);
    expect(view.selectedIds).toEqual([1]);
    expect(view.join).toBeNull();
  });

  it("toggle mark sends the flipped flag and reloads", async () => {
    const { api, calls } = makeView();
    const view = new BeaconMapView(api);
    await view.load();
    await view.toggleMark(3);
    expect(callsTo(calls, "updateBeacon")[0].args).toEqual([3, { marked: false }]);
    expect(callsTo(calls, "beaconsGeojson")).toHaveLength(2);
  });

  it("reports a failed load instead of an empty map", async () => {
    const { api } = makeView({
      beaconsGeojson: () => {
        throw new ApiCallError(503, "NETWORK_UNREACHABLE", "api unreachable");
      },
    });
    const view = new BeaconMapView(api);
    await view.load();
    expect(view.loadError).toContain("api unreachable");
    expect(view.render()).toContain("Map failed to load");
    expect(view.render()).not.toContain("beacon-map");
  });

  it("distinguishes an empty store from a failed load", async () => {
    const { api } = makeView({
      beaconsGeojson: { type: "FeatureCollection", crs_note: "", features: [] },
      listBeacons: [],
    });
    const view = new BeaconMapView(api);
    await view.load();
    expect(view.loadError).toBeNull();
    expect(view.render()).toContain("No beacons registered.");
  });
});
