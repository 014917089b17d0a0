/* API payload types, mirroring the service's response models field for
   field. The console renders these; it never derives its own numbers. */

export interface BeaconOut {
  beacon_id: number;
  beacon_name: string;
  easting: number;
  northing: number;
  elevation: number | null;
  unit: string;
  description: string;
  photo_ref: string | null;
  revision_surveyor: string;
  revision_date: string | null;
  marked: boolean;
  deleted: boolean;
}

export interface JoinOut {
  bearing_deg: number;
  bearing_dms: string;
  distance: number;
  unit: string;
}

export interface GeoJsonFeature {
  type: "Feature";
  geometry: { type: "Point"; coordinates: number[] };
  properties: {
    beacon_id: number;
    name: string;
    elevation: number | null;
    description: string;
    revision_surveyor: string;
    revision_date: string | null;
    marked: boolean;
  };
}

export interface GeoJsonFC {
  type: "FeatureCollection";
  crs_note: string;
  features: GeoJsonFeature[];
}

export interface LendingDetailOut {
  detail_id: number;
  instrument_name: string;
  quantity: number;
  serials: string[];
}

export interface LendingOut {
  lending_id: number;
  date: string;
  person_name: string;
  person_department: string;
  person_phone: string;
  is_returned: boolean;
  return_date: string | null;
  remarks: string;
  total_instru: number;
  deleted: boolean;
  details: LendingDetailOut[];
}

export interface ReturnOut {
  lending: LendingOut;
  note_text: string;
}

export interface LendingItemIn {
  instrument_name: string;
  quantity: number;
  serials?: string[];
}

export interface LendingIn {
  person_name: string;
  person_department?: string;
  person_phone?: string;
  remarks?: string;
  items: LendingItemIn[];
}

export interface StockOut {
  instrument_id: number;
  instrument_name: string;
  total: number;
  lent: number;
  faulty: number;
  remaining: number;
  description: string;
}

export interface AvailabilityRow {
  instrument_name: string;
  total: number;
  lent: number;
  faulty: number;
  remaining: number;
}

export interface DailyRow {
  date: string;
  lendings: number;
  instruments: number;
  returns: number;
}

export interface RecycleRow {
  kind: "lending" | "beacon";
  record_id: number;
  deleted_at: string;
  label: string;
}

export interface CatalogOut {
  instrument_name: string;
  description: string;
  room: string;
  shelf: string;
  media_refs: string[];
}

export interface LocateOut extends CatalogOut {
  stocked: boolean;
  remaining: number | null;
}

export interface JobLine {
  instrument_name: string;
  quantity: number;
}

export interface JobTemplateOut {
  job_type: string;
  required: JobLine[];
}

export interface JobCheckLine {
  instrument_name: string;
  required: number;
  remaining: number | null;
  covered: boolean;
}

export interface JobCheckOut {
  job_type: string;
  lines: JobCheckLine[];
  all_covered: boolean;
}

export interface AreaOut {
  area_m2: number;
  area: number;
  unit: string;
  vertex_count: number;
}

export interface CurvePegOut {
  name: string;
  chainage: number;
  chord: number;
  tangential_angle_deg: number;
  tangential_angle_dms: string;
  cumulative_angle_deg: number;
  cumulative_angle_dms: string;
}

export interface CurveOut {
  deflection_deg: number;
  deflection_dms: string;
  radius: number;
  curve_length: number;
  tangent_length: number;
  external_distance: number;
  mid_ordinate: number;
  long_chord: number;
  ip_chainage: number;
  chainage_t1: number;
  chainage_t2: number;
  standard_chord: number;
  initial_subchord: number;
  final_subchord: number;
  pegs: CurvePegOut[];
}

export interface LevelRowOut {
  point: string;
  backsight: number | null;
  intersight: number | null;
  foresight: number | null;
  rise: number | null;
  fall: number | null;
  height_of_collimation: number | null;
  reduced_level: number;
  remarks: string;
}

export interface LevelsOut {
  method: string;
  rows: LevelRowOut[];
  sum_backsight: number;
  sum_foresight: number;
  sum_rise: number;
  sum_fall: number;
  first_rl: number;
  last_rl: number;
  checks_pass: boolean;
  misclose: number | null;
  failures: string[];
}

export interface DetailPointOut {
  point_name: string;
  easting: number;
  northing: number;
  elevation: number;
  bearing_deg: number;
  bearing_dms: string;
  horizontal_distance: number;
}

export interface DetailingOut {
  station: { easting: number; northing: number; elevation: number };
  points: DetailPointOut[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: Record<string, unknown>;
}
