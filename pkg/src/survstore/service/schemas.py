"""Request and response bodies.

Angles arrive either as decimal degrees (JSON number) or as a DMS
string; responses carry both decimal degrees and a rendered DMS string
so clients never do angle arithmetic. Numbers are serialized at full
precision; rounding is a display concern.
"""

from __future__ import annotations

from datetime import date, datetime

from pydantic import BaseModel, ConfigDict, Field

AngleValue = float | str


# -- beacons ------------------------------------------------------------


class BeaconIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    easting: float
    northing: float
    elevation: float | None = None
    description: str = ""
    photo_ref: str | None = None
    revision_surveyor: str = ""
    revision_date: date | None = None
    marked: bool = False


class BeaconPatch(BaseModel):
    model_config = ConfigDict(extra="forbid")

    beacon_name: str | None = None
    easting: float | None = None
    northing: float | None = None
    elevation: float | None = None
    description: str | None = None
    photo_ref: str | None = None
    revision_surveyor: str | None = None
    revision_date: date | None = None
    marked: bool | None = None


class BeaconOut(BaseModel):
    beacon_id: int
    beacon_name: str
    easting: float
    northing: float
    elevation: float | None
    unit: str
    description: str
    photo_ref: str | None
    revision_surveyor: str
    revision_date: date | None
    marked: bool
    deleted: bool


class JoinOut(BaseModel):
    bearing_deg: float
    bearing_dms: str
    distance: float
    unit: str


# -- computations -------------------------------------------------------


class AreaIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vertices: list[tuple[float, float]]
    unit: str = "m2"


class AreaOut(BaseModel):
    area_m2: float
    area: float
    unit: str
    vertex_count: int


class JoinIn(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    from_point: tuple[float, float] = Field(alias="from")
    to_point: tuple[float, float] = Field(alias="to")
    unit: str = "m"


class StationIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    easting: float
    northing: float
    elevation: float


class RayIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    point_name: str
    hcr: AngleValue
    vcr_zenith: AngleValue
    slope_distance: float
    target_height: float = 0.0


class DetailingIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    station: StationIn
    instrument_height: float
    reference_bearing: AngleValue
    hcr_to_reference: AngleValue
    observations: list[RayIn]


class DetailPointOut(BaseModel):
    point_name: str
    easting: float
    northing: float
    elevation: float
    bearing_deg: float
    bearing_dms: str
    horizontal_distance: float


class DetailingOut(BaseModel):
    station: StationIn
    points: list[DetailPointOut]


class CurveIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    deflection: AngleValue
    ip_chainage: float
    standard_chord: float
    radius: float | None = None
    curve_length: float | None = None


class CurvePegOut(BaseModel):
    name: str
    chainage: float
    chord: float
    tangential_angle_deg: float
    tangential_angle_dms: str
    cumulative_angle_deg: float
    cumulative_angle_dms: str


class CurveOut(BaseModel):
    deflection_deg: float
    deflection_dms: str
    radius: float
    curve_length: float
    tangent_length: float
    external_distance: float
    mid_ordinate: float
    long_chord: float
    ip_chainage: float
    chainage_t1: float
    chainage_t2: float
    standard_chord: float
    initial_subchord: float
    final_subchord: float
    pegs: list[CurvePegOut]


class LevelRowIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    point: str
    backsight: float | None = None
    intersight: float | None = None
    foresight: float | None = None
    remarks: str = ""


class LevelsIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    method: str = "rise_fall"
    start_rl: float
    closing_rl: float | None = None
    rows: list[LevelRowIn]


class LevelRowOut(BaseModel):
    point: str
    backsight: float | None
    intersight: float | None
    foresight: float | None
    rise: float | None
    fall: float | None
    height_of_collimation: float | None
    reduced_level: float
    remarks: str


class LevelsOut(BaseModel):
    method: str
    rows: list[LevelRowOut]
    sum_backsight: float
    sum_foresight: float
    sum_rise: float
    sum_fall: float
    first_rl: float
    last_rl: float
    checks_pass: bool
    misclose: float | None
    failures: list[str]


# -- lending ------------------------------------------------------------


class LendingItemIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    instrument_name: str
    quantity: int
    serials: list[str] = Field(default_factory=list)


class LendingIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    person_name: str
    person_department: str = ""
    person_phone: str = ""
    remarks: str = ""
    date: datetime | None = None
    items: list[LendingItemIn]


class LendingDetailOut(BaseModel):
    detail_id: int
    instrument_name: str
    quantity: int
    serials: list[str]


class LendingOut(BaseModel):
    lending_id: int
    date: datetime
    person_name: str
    person_department: str
    person_phone: str
    is_returned: bool
    return_date: datetime | None
    remarks: str
    total_instru: int
    deleted: bool
    details: list[LendingDetailOut]


class ReturnOut(BaseModel):
    lending: LendingOut
    note_text: str


class StockUpsertIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    instrument_name: str
    total: int
    faulty: int = 0
    description: str | None = None


class StockOut(BaseModel):
    instrument_id: int
    instrument_name: str
    total: int
    lent: int
    faulty: int
    remaining: int
    description: str


# -- catalog ------------------------------------------------------------


class CatalogUpsertIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    instrument_name: str
    description: str | None = None
    room: str | None = None
    shelf: str | None = None
    media_refs: list[str] | None = None


class CatalogOut(BaseModel):
    instrument_name: str
    description: str
    room: str
    shelf: str
    media_refs: list[str]


class JobLineIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    instrument_name: str
    quantity: int


class JobTemplateIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    required: list[JobLineIn]


class JobTemplateOut(BaseModel):
    job_type: str
    required: list[JobLineIn]


# -- backup -------------------------------------------------------------


class BackupCreateIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    out_path: str | None = None


class BackupCreateOut(BaseModel):
    path: str
    size: int
    sha256: str


class BackupRestoreIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    archive_path: str
    target_dir: str
    overwrite: bool = False


class BackupUploadIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    archive_path: str | None = None
    url: str | None = None
