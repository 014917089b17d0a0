"""FastAPI application: every store operation and computation over HTTP.

The app owns (or borrows) one open store. Route handlers are plain sync
functions; FastAPI runs them on a thread pool and the store serializes
mutations internally, so requests may be served concurrently while
writes stay single-file. Domain errors surface as JSON ApiError bodies
with their mapped status.
"""

from __future__ import annotations

import hashlib
import os
from contextlib import asynccontextmanager
from datetime import date
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .. import __version__, backup, beacons, catalog, lending
from .. import records as rec
from ..compute import (
    CurveInput,
    GridPoint,
    Join,
    LevelObservation,
    LevelingMethod,
    RayObservation,
    StationSetup,
    curve_solve,
    detail_points,
    join,
    polygon_area,
    reduce_levels,
    verify_level_book,
)
from ..errors import InvalidRange, InvalidRecord, NotFound, SurvStoreError
from ..store import Store, open_store
from ..units import (
    Angle,
    AreaUnit,
    LengthUnit,
    convert_area,
    convert_length,
    format_dms,
    parse_angle,
)
from . import schemas as sc

DATA_DIR_ENV = "SURVSTORE_DATA_DIR"
PORT_ENV = "SURVSTORE_PORT"
CONSOLE_DIR_ENV = "SURVSTORE_CONSOLE_DIR"
DEFAULT_PORT = 8741
DEFAULT_DATA_DIR = "survstore-data"


def _angle(value: float | str, what: str) -> Angle:
    if isinstance(value, str):
        try:
            return parse_angle(value)
        except SurvStoreError as exc:
            raise type(exc)(f"{what}: {exc.message}", **exc.details)
    return Angle.from_degrees(float(value))


def _length_unit(value: str) -> LengthUnit:
    try:
        return LengthUnit(value)
    except ValueError:
        raise InvalidRecord(f"unknown length unit {value!r} (use m or ft)")


def _area_unit(value: str) -> AreaUnit:
    try:
        return AreaUnit(value)
    except ValueError:
        raise InvalidRecord(
            f"unknown area unit {value!r} (use m2, ha, acre or ft2)"
        )


def _beacon_out(b: rec.BeaconRecord, unit: LengthUnit) -> sc.BeaconOut:
    conv = lambda v: convert_length(v, LengthUnit.METRE, unit)  # noqa: E731
    return sc.BeaconOut(
        beacon_id=b.beacon_id,
        beacon_name=b.beacon_name,
        easting=conv(b.position.easting),
        northing=conv(b.position.northing),
        elevation=None if b.position.elevation is None else conv(b.position.elevation),
        unit=unit.value,
        description=b.description,
        photo_ref=b.photo_ref,
        revision_surveyor=b.revision_surveyor,
        revision_date=b.revision_date,
        marked=b.marked,
        deleted=b.deleted,
    )


def _join_out(j: Join, unit: LengthUnit) -> sc.JoinOut:
    return sc.JoinOut(
        bearing_deg=j.bearing.degrees,
        bearing_dms=j.bearing.dms(),
        distance=convert_length(j.distance, LengthUnit.METRE, unit),
        unit=unit.value,
    )


def _lending_out(l: rec.LendingRecord) -> sc.LendingOut:
    return sc.LendingOut(
        lending_id=l.lending_id,
        date=l.date,
        person_name=l.person_name,
        person_department=l.person_department,
        person_phone=l.person_phone,
        is_returned=l.is_returned,
        return_date=l.return_date,
        remarks=l.remarks,
        total_instru=l.total_instru,
        deleted=l.deleted,
        details=[
            sc.LendingDetailOut(
                detail_id=d.detail_id,
                instrument_name=d.instrument_name,
                quantity=d.quantity,
                serials=list(d.serials),
            )
            for d in l.details
        ],
    )


def _stock_out(s: rec.InstrumentStock) -> sc.StockOut:
    return sc.StockOut(
        instrument_id=s.instrument_id,
        instrument_name=s.instrument_name,
        total=s.total,
        lent=s.lent,
        faulty=s.faulty,
        remaining=s.remaining,
        description=s.description,
    )


def _catalog_out(e: rec.CatalogEntry) -> sc.CatalogOut:
    return sc.CatalogOut(
        instrument_name=e.instrument_name,
        description=e.description,
        room=e.room,
        shelf=e.shelf,
        media_refs=list(e.media_refs),
    )


def create_app(
    store: Store | None = None,
    *,
    data_dir: str | os.PathLike | None = None,
    console_dir: str | os.PathLike | None = None,
) -> FastAPI:
    """Build the application. A passed-in store stays owned by the caller."""

    borrowed = store is not None

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if borrowed:
            app.state.store = store
        else:
            root = data_dir or os.environ.get(DATA_DIR_ENV) or DEFAULT_DATA_DIR
            app.state.store = open_store(root)
        try:
            yield
        finally:
            if not borrowed:
                app.state.store.close()

    app = FastAPI(title="survstore", version=__version__, lifespan=lifespan)

    def st() -> Store:
        return app.state.store

    @app.exception_handler(SurvStoreError)
    async def _domain_error(request: Request, exc: SurvStoreError):
        return JSONResponse(status_code=exc.http_status, content=exc.to_payload())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        malformed = any(e.get("type") == "json_invalid" for e in errors)
        if not malformed:
            # Older pydantic reports unparseable bodies as a plain type
            # error; re-parse to tell bad JSON from bad field values.
            body = await request.body()
            if body:
                try:
                    import json as _json

                    _json.loads(body)
                except ValueError:
                    malformed = True
        payload = {
            "code": "MALFORMED_JSON" if malformed else "VALIDATION_ERROR",
            "message": "request body is not valid JSON" if malformed
            else "request failed validation",
            "details": {
                "errors": [
                    {"loc": [str(p) for p in e.get("loc", [])], "msg": e.get("msg", "")}
                    for e in errors
                ]
            },
        }
        return JSONResponse(status_code=400 if malformed else 422, content=payload)

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        code = "NOT_FOUND" if exc.status_code == 404 else "HTTP_ERROR"
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": code, "message": str(exc.detail)},
        )

    # -- health ---------------------------------------------------------

    @app.get("/api/health")
    def health() -> dict:
        s = st()
        return {
            "status": "ok",
            "version": __version__,
            "schema_version": s.schema_version,
            "generation": s.generation,
        }

    # -- beacons --------------------------------------------------------

    @app.get("/api/beacons")
    def beacons_list(
        q: str | None = None,
        include_deleted: bool = False,
        unit: Literal["m", "ft"] = "m",
    ) -> list[sc.BeaconOut]:
        u = _length_unit(unit)
        if q is not None:
            found = beacons.search_beacons(st(), q)
        else:
            found = beacons.list_beacons(st(), include_deleted=include_deleted)
        return [_beacon_out(b, u) for b in found]

    @app.post("/api/beacons", status_code=201)
    def beacons_add(body: sc.BeaconIn) -> sc.BeaconOut:
        b = beacons.add_beacon(
            st(), body.name, body.easting, body.northing, body.elevation,
            description=body.description, photo_ref=body.photo_ref,
            revision_surveyor=body.revision_surveyor,
            revision_date=body.revision_date, marked=body.marked,
        )
        return _beacon_out(b, LengthUnit.METRE)

    @app.get("/api/beacons/geojson")
    def beacons_geojson(q: str | None = None) -> dict:
        return beacons.beacons_geojson(st(), query=q)

    @app.get("/api/beacons/export.csv")
    def beacons_export(q: str | None = None, unit: Literal["m", "ft"] = "m") -> Response:
        text = beacons.export_beacons_csv(st(), _length_unit(unit), query=q)
        return Response(
            content=text,
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": 'attachment; filename="beacons.csv"'},
        )

    @app.post("/api/beacons/import")
    async def beacons_import(request: Request) -> dict:
        text = (await request.body()).decode("utf-8", errors="replace")
        added = beacons.import_beacons_csv(st(), text)
        return {"imported": len(added), "beacon_ids": [b.beacon_id for b in added]}

    @app.get("/api/beacons/join")
    def beacons_join(
        from_name: str = Query(alias="from"),
        to_name: str = Query(alias="to"),
        unit: Literal["m", "ft"] = "m",
    ) -> sc.JoinOut:
        return _join_out(beacons.beacon_join(st(), from_name, to_name), _length_unit(unit))

    @app.get("/api/beacons/{beacon_id}")
    def beacons_get(beacon_id: int, unit: Literal["m", "ft"] = "m") -> sc.BeaconOut:
        return _beacon_out(beacons.get_beacon(st(), beacon_id), _length_unit(unit))

    @app.put("/api/beacons/{beacon_id}")
    def beacons_update(beacon_id: int, body: sc.BeaconPatch) -> sc.BeaconOut:
        changes = body.model_dump(exclude_unset=True)
        b = beacons.update_beacon(st(), beacon_id, **changes)
        return _beacon_out(b, LengthUnit.METRE)

    @app.delete("/api/beacons/{beacon_id}")
    def beacons_delete(beacon_id: int) -> sc.BeaconOut:
        return _beacon_out(beacons.delete_beacon(st(), beacon_id), LengthUnit.METRE)

    @app.post("/api/beacons/{beacon_id}/restore")
    def beacons_restore(beacon_id: int) -> sc.BeaconOut:
        return _beacon_out(beacons.restore_beacon(st(), beacon_id), LengthUnit.METRE)

    # -- computations ----------------------------------------------------

    @app.post("/api/compute/area")
    def compute_area(body: sc.AreaIn) -> sc.AreaOut:
        unit = _area_unit(body.unit)
        points = [GridPoint(e, n) for e, n in body.vertices]
        area_m2 = polygon_area(points)
        return sc.AreaOut(
            area_m2=area_m2,
            area=convert_area(area_m2, AreaUnit.SQUARE_METRE, unit),
            unit=unit.value,
            vertex_count=len(points),
        )

    @app.post("/api/compute/join")
    def compute_join(body: sc.JoinIn) -> sc.JoinOut:
        unit = _length_unit(body.unit)
        j = join(GridPoint(*body.from_point), GridPoint(*body.to_point))
        return _join_out(j, unit)

    @app.post("/api/compute/detailing")
    def compute_detailing(body: sc.DetailingIn) -> sc.DetailingOut:
        from ..units import normalize_bearing

        setup = StationSetup(
            station=GridPoint(
                body.station.easting, body.station.northing, body.station.elevation
            ),
            instrument_height=body.instrument_height,
            reference_bearing=normalize_bearing(
                _angle(body.reference_bearing, "reference_bearing")
            ),
            hcr_to_reference=_angle(body.hcr_to_reference, "hcr_to_reference"),
        )
        rays = [
            RayObservation(
                point_name=o.point_name,
                hcr=_angle(o.hcr, f"observation {o.point_name!r} hcr"),
                vcr_zenith=_angle(o.vcr_zenith, f"observation {o.point_name!r} vcr"),
                slope_distance=o.slope_distance,
                target_height=o.target_height,
            )
            for o in body.observations
        ]
        points = detail_points(setup, rays)
        out = []
        for ray, p in zip(rays, points):
            j = join(setup.station, p)
            out.append(sc.DetailPointOut(
                point_name=ray.point_name,
                easting=p.easting,
                northing=p.northing,
                elevation=p.elevation,
                bearing_deg=j.bearing.degrees,
                bearing_dms=j.bearing.dms(),
                horizontal_distance=j.distance,
            ))
        return sc.DetailingOut(station=body.station, points=out)

    @app.post("/api/compute/curve")
    def compute_curve(body: sc.CurveIn) -> sc.CurveOut:
        deflection = _angle(body.deflection, "deflection")
        solution = curve_solve(CurveInput(
            deflection=deflection,
            ip_chainage=body.ip_chainage,
            standard_chord=body.standard_chord,
            radius=body.radius,
            curve_length=body.curve_length,
        ))
        return sc.CurveOut(
            deflection_deg=deflection.degrees,
            deflection_dms=format_dms(deflection),
            radius=solution.radius,
            curve_length=solution.curve_length,
            tangent_length=solution.tangent_length,
            external_distance=solution.external_distance,
            mid_ordinate=solution.mid_ordinate,
            long_chord=solution.long_chord,
            ip_chainage=body.ip_chainage,
            chainage_t1=solution.chainage_t1,
            chainage_t2=solution.chainage_t2,
            standard_chord=body.standard_chord,
            initial_subchord=solution.initial_subchord,
            final_subchord=solution.final_subchord,
            pegs=[
                sc.CurvePegOut(
                    name=p.name,
                    chainage=p.chainage,
                    chord=p.chord,
                    tangential_angle_deg=p.tangential_angle.degrees,
                    tangential_angle_dms=format_dms(p.tangential_angle),
                    cumulative_angle_deg=p.cumulative_angle.degrees,
                    cumulative_angle_dms=format_dms(p.cumulative_angle),
                )
                for p in solution.pegs
            ],
        )

    @app.post("/api/compute/levels")
    def compute_levels(body: sc.LevelsIn) -> sc.LevelsOut:
        try:
            method = LevelingMethod(body.method)
        except ValueError:
            raise InvalidRecord(
                f"unknown method {body.method!r} "
                "(use rise_fall or height_of_collimation)"
            )
        observations = [
            LevelObservation(
                point=r.point,
                backsight=r.backsight,
                intersight=r.intersight,
                foresight=r.foresight,
                remarks=r.remarks,
            )
            for r in body.rows
        ]
        book = reduce_levels(method, observations, body.start_rl,
                             closing_rl=body.closing_rl)
        failures = verify_level_book(book)
        rows = [
            sc.LevelRowOut(
                point=r.point,
                backsight=r.backsight,
                intersight=r.intersight,
                foresight=r.foresight,
                rise=r.rise,
                fall=r.fall,
                height_of_collimation=r.height_of_collimation,
                reduced_level=r.reduced_level,
                remarks=r.remarks,
            )
            for r in book.rows
        ]
        return sc.LevelsOut(
            method=book.method.value,
            rows=rows,
            sum_backsight=book.sum_bs,
            sum_foresight=book.sum_fs,
            sum_rise=book.sum_rise,
            sum_fall=book.sum_fall,
            first_rl=book.rows[0].reduced_level,
            last_rl=book.rows[-1].reduced_level,
            checks_pass=book.checks_pass,
            misclose=book.misclose,
            failures=failures,
        )

    # -- lendings ---------------------------------------------------------

    @app.get("/api/lendings")
    def lendings_list(
        q: str | None = None,
        include_deleted: bool = False,
        open_only: bool = False,
    ) -> list[sc.LendingOut]:
        if q is not None:
            found = lending.search_transactions(st(), q, include_deleted=include_deleted)
        else:
            found = lending.list_lendings(
                st(), include_deleted=include_deleted, only_open=open_only
            )
        return [_lending_out(l) for l in found]

    @app.post("/api/lendings", status_code=201)
    def lendings_create(body: sc.LendingIn) -> sc.LendingOut:
        record = lending.create_lending(
            st(),
            body.person_name,
            [(i.instrument_name, i.quantity, i.serials) for i in body.items],
            person_department=body.person_department,
            person_phone=body.person_phone,
            remarks=body.remarks,
            when=body.date,
        )
        return _lending_out(record)

    @app.get("/api/lendings/{lending_id}")
    def lendings_get(lending_id: int, include_deleted: bool = False) -> sc.LendingOut:
        return _lending_out(
            lending.get_lending(st(), lending_id, include_deleted=include_deleted)
        )

    @app.post("/api/lendings/{lending_id}/return")
    def lendings_return(lending_id: int) -> sc.ReturnOut:
        record, note = lending.return_lending(st(), lending_id)
        return sc.ReturnOut(lending=_lending_out(record), note_text=note.render_text())

    @app.delete("/api/lendings/{lending_id}")
    def lendings_delete(lending_id: int) -> sc.LendingOut:
        return _lending_out(lending.soft_delete_lending(st(), lending_id))

    @app.post("/api/lendings/{lending_id}/restore")
    def lendings_restore(lending_id: int) -> sc.LendingOut:
        return _lending_out(lending.restore_lending(st(), lending_id))

    @app.get("/api/recycle-bin")
    def recycle_bin() -> list[dict]:
        return lending.list_recycle_bin(st())

    # -- stock & stats ------------------------------------------------------

    @app.get("/api/instruments")
    def instruments_list() -> list[sc.StockOut]:
        return [_stock_out(s) for s in lending.list_stock(st())]

    @app.put("/api/instruments")
    def instruments_upsert(body: sc.StockUpsertIn) -> sc.StockOut:
        return _stock_out(lending.upsert_instrument(
            st(), body.instrument_name, body.total,
            faulty=body.faulty, description=body.description,
        ))

    @app.get("/api/stats/availability")
    def stats_availability() -> list[dict]:
        return lending.availability_snapshot(st())

    @app.get("/api/stats/daily")
    def stats_daily(
        from_day: str = Query(alias="from"),
        to_day: str = Query(alias="to"),
    ) -> list[dict]:
        try:
            start = date.fromisoformat(from_day)
            end = date.fromisoformat(to_day)
        except ValueError as exc:
            raise InvalidRange(f"bad date range: {exc}")
        return lending.daily_series(st(), start, end)

    @app.get("/api/stats/conservation")
    def stats_conservation() -> dict:
        return lending.audit_conservation(st())

    # -- catalog ------------------------------------------------------------

    @app.get("/api/catalog")
    def catalog_list(q: str | None = None) -> list[sc.CatalogOut]:
        if q is not None:
            found = catalog.search_catalog(st(), q)
        else:
            found = catalog.list_catalog(st())
        return [_catalog_out(e) for e in found]

    @app.put("/api/catalog")
    def catalog_upsert(body: sc.CatalogUpsertIn) -> sc.CatalogOut:
        return _catalog_out(catalog.upsert_catalog_entry(
            st(), body.instrument_name,
            description=body.description, room=body.room, shelf=body.shelf,
            media_refs=body.media_refs,
        ))

    @app.post("/api/catalog/import")
    async def catalog_import(request: Request) -> dict:
        text = (await request.body()).decode("utf-8", errors="replace")
        entries = catalog.import_catalog_csv(st(), text)
        return {"imported": len(entries)}

    @app.get("/api/catalog/locate")
    def catalog_locate(name: str) -> dict:
        return catalog.locate_instrument(st(), name)

    @app.get("/api/catalog/jobs")
    def catalog_jobs() -> list[sc.JobTemplateOut]:
        return [
            sc.JobTemplateOut(
                job_type=t.job_type,
                required=[
                    sc.JobLineIn(instrument_name=n, quantity=q)
                    for n, q in t.required_instruments
                ],
            )
            for t in catalog.list_job_templates(st())
        ]

    @app.get("/api/catalog/jobs/{job_type}")
    def catalog_job(job_type: str) -> dict:
        return catalog.job_requirements(st(), job_type)

    @app.put("/api/catalog/jobs/{job_type}")
    def catalog_job_set(job_type: str, body: sc.JobTemplateIn) -> sc.JobTemplateOut:
        t = catalog.upsert_job_template(
            st(), job_type, [(l.instrument_name, l.quantity) for l in body.required]
        )
        return sc.JobTemplateOut(
            job_type=t.job_type,
            required=[
                sc.JobLineIn(instrument_name=n, quantity=q)
                for n, q in t.required_instruments
            ],
        )

    # -- media --------------------------------------------------------------

    @app.put("/api/media/{filename}")
    async def media_put(filename: str, request: Request) -> dict:
        data = await request.body()
        ref = st().add_media(filename, data)
        return {"ref": ref, "size": len(data)}

    @app.get("/media/{ref:path}")
    def media_get(ref: str) -> FileResponse:
        path = st().media_path(ref)
        if not path.is_file():
            raise NotFound(f"no media file {ref!r}", ref=ref)
        return FileResponse(path)

    # -- backup ---------------------------------------------------------------

    @app.post("/api/backup", status_code=201)
    def backup_create(body: sc.BackupCreateIn | None = None) -> sc.BackupCreateOut:
        if body and body.out_path:
            out_path = Path(body.out_path)
        else:
            out_path = st().root / "backups"
            out_path.mkdir(exist_ok=True)
        archive = backup.create_backup(st(), out_path)
        data = archive.read_bytes()
        return sc.BackupCreateOut(
            path=str(archive),
            size=len(data),
            sha256=hashlib.sha256(data).hexdigest(),
        )

    @app.post("/api/backup/restore")
    def backup_restore(body: sc.BackupRestoreIn) -> dict:
        target = backup.restore_backup(
            body.archive_path, body.target_dir, overwrite=body.overwrite
        )
        return {"restored_to": str(target)}

    @app.post("/api/backup/upload")
    def backup_upload(body: sc.BackupUploadIn | None = None) -> dict:
        body = body or sc.BackupUploadIn()
        if body.archive_path:
            archive = Path(body.archive_path)
        else:
            default_dir = st().root / "backups"
            default_dir.mkdir(exist_ok=True)
            archive = backup.create_backup(st(), default_dir)
        return backup.upload_backup(archive, body.url)

    # Console static files go last so /api and /media keep priority.
    static_root = console_dir or os.environ.get(CONSOLE_DIR_ENV)
    if static_root and Path(static_root).is_dir():
        app.mount("/", StaticFiles(directory=static_root, html=True), name="console")

    return app
