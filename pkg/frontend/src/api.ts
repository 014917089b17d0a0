/* Typed client for the store service. One method per endpoint; every
   view talks to the service through this and nothing else. */

import type {
  ApiErrorBody,
  AreaOut,
  AvailabilityRow,
  BeaconOut,
  CatalogOut,
  CurveOut,
  DailyRow,
  DetailingOut,
  GeoJsonFC,
  JobCheckOut,
  JobTemplateOut,
  JoinOut,
  LendingIn,
  LendingOut,
  LevelsOut,
  LocateOut,
  RecycleRow,
  ReturnOut,
  StockOut,
} from "./types.js";

/** A domain error surfaced by the service, keeping its stable code. */
export class ApiCallError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: Record<string, unknown> = {}
  ) {
    super(message);
    this.name = "ApiCallError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface CurveRequest {
  deflection: number | string;
  ip_chainage: number;
  standard_chord: number;
  radius?: number;
  curve_length?: number;
}

export interface LevelsRequest {
  method: string;
  start_rl: number;
  closing_rl?: number;
  rows: {
    point: string;
    backsight?: number;
    intersight?: number;
    foresight?: number;
    remarks?: string;
  }[];
}

export interface DetailingRequest {
  station: { easting: number; northing: number; elevation: number };
  instrument_height: number;
  reference_bearing: number | string;
  hcr_to_reference: number | string;
  observations: {
    point_name: string;
    hcr: number | string;
    vcr_zenith: number | string;
    slope_distance: number;
    target_height?: number;
  }[];
}

export class Api {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init)
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let res: Response;
    try {
      res = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ApiCallError(0, "NETWORK_UNREACHABLE", String(err));
    }
    if (!res.ok) {
      let payload: Partial<ApiErrorBody> = {};
      try {
        payload = (await res.json()) as ApiErrorBody;
      } catch {
        /* non-JSON error body: keep the status alone */
      }
      throw new ApiCallError(
        res.status,
        payload.code ?? `HTTP_${res.status}`,
        payload.message ?? res.statusText,
        payload.details ?? {}
      );
    }
    return (await res.json()) as T;
  }

  // -- beacons ------------------------------------------------------------

  listBeacons(unit: string, q?: string): Promise<BeaconOut[]> {
    const query = q ? `&q=${encodeURIComponent(q)}` : "";
    return this.request("GET", `/api/beacons?unit=${unit}${query}`);
  }

  updateBeacon(id: number, patch: Record<string, unknown>): Promise<BeaconOut> {
    return this.request("PUT", `/api/beacons/${id}`, patch);
  }

  joinBeacons(from: string, to: string, unit: string): Promise<JoinOut> {
    const f = encodeURIComponent(from);
    const t = encodeURIComponent(to);
    return this.request("GET", `/api/beacons/join?from=${f}&to=${t}&unit=${unit}`);
  }

  beaconsGeojson(): Promise<GeoJsonFC> {
    return this.request("GET", "/api/beacons/geojson");
  }

  /** URL for a managed photo; the browser fetches it itself. */
  mediaUrl(ref: string): string {
    return `${this.base}/media/${encodeURIComponent(ref)}`;
  }

  // -- lendings -------------------------------------------------------------

  listLendings(): Promise<LendingOut[]> {
    return this.request("GET", "/api/lendings");
  }

  createLending(body: LendingIn): Promise<LendingOut> {
    return this.request("POST", "/api/lendings", body);
  }

  returnLending(id: number): Promise<ReturnOut> {
    return this.request("POST", `/api/lendings/${id}/return`);
  }

  deleteLending(id: number): Promise<LendingOut> {
    return this.request("DELETE", `/api/lendings/${id}`);
  }

  restoreLending(id: number): Promise<LendingOut> {
    return this.request("POST", `/api/lendings/${id}/restore`);
  }

  recycleBin(): Promise<RecycleRow[]> {
    return this.request("GET", "/api/recycle-bin");
  }

  restoreBeacon(id: number): Promise<BeaconOut> {
    return this.request("POST", `/api/beacons/${id}/restore`);
  }

  // -- stock and stats ------------------------------------------------------

  stock(): Promise<StockOut[]> {
    return this.request("GET", "/api/instruments");
  }

  availability(): Promise<AvailabilityRow[]> {
    return this.request("GET", "/api/stats/availability");
  }

  daily(from: string, to: string): Promise<DailyRow[]> {
    return this.request("GET", `/api/stats/daily?from=${from}&to=${to}`);
  }

  // -- catalog ----------------------------------------------------------------

  catalog(q?: string): Promise<CatalogOut[]> {
    const query = q ? `?q=${encodeURIComponent(q)}` : "";
    return this.request("GET", `/api/catalog${query}`);
  }

  locate(name: string): Promise<LocateOut> {
    return this.request("GET", `/api/catalog/locate?name=${encodeURIComponent(name)}`);
  }

  jobTemplates(): Promise<JobTemplateOut[]> {
    return this.request("GET", "/api/catalog/jobs");
  }

  jobRequirements(type: string): Promise<JobCheckOut> {
    return this.request("GET", `/api/catalog/jobs/${encodeURIComponent(type)}`);
  }

  // -- computations -----------------------------------------------------------

  computeArea(vertices: [number, number][], unit: string): Promise<AreaOut> {
    return this.request("POST", "/api/compute/area", { vertices, unit });
  }

  computeJoin(
    from: [number, number],
    to: [number, number],
    unit: string
  ): Promise<JoinOut> {
    return this.request("POST", "/api/compute/join", { from, to, unit });
  }

  computeCurve(body: CurveRequest): Promise<CurveOut> {
    return this.request("POST", "/api/compute/curve", body);
  }

  computeLevels(body: LevelsRequest): Promise<LevelsOut> {
    return this.request("POST", "/api/compute/levels", body);
  }

  computeDetailing(body: DetailingRequest): Promise<DetailingOut> {
    return this.request("POST", "/api/compute/detailing", body);
  }
}
