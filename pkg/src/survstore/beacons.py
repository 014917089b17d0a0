"""Beacon register: survey control points with photos and revision data.

All mutations validate first and touch the store state only once the
operation is known to succeed, so a rejected call leaves the store
byte-identical. Deleting a beacon is soft: the record is flagged and
parked in the recycle bin until restored or purged.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import replace
from datetime import date, datetime, timezone

from . import records as rec
from .compute.geometry import GridPoint, Join, join
from .errors import (
    DuplicateName,
    InvalidCoordinate,
    MalformedCsv,
    NotDeleted,
    NotFound,
)
from .store import Store
from .units import LengthUnit, convert_length

CSV_HEADER = (
    "BeaconName,Easting,Northing,Elevation,Unit,"
    "Description,RevisionSurveyor,RevisionDate"
)

GEOJSON_CRS_NOTE = (
    "Coordinates are projected grid eastings/northings in metres, "
    "not longitude/latitude."
)


def _parse_date(value: str | date | None) -> date | None:
    if value is None or isinstance(value, date):
        return value
    value = value.strip()
    if not value:
        return None
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise MalformedCsv(f"bad date {value!r}: {exc}") from exc


def get_beacon(store: Store, beacon_id: int, *, include_deleted: bool = False) -> rec.BeaconRecord:
    with store.locked() as state:
        beacon = state.beacons.get(beacon_id)
    if beacon is None or (beacon.deleted and not include_deleted):
        raise NotFound(f"no beacon with id {beacon_id}", beacon_id=beacon_id)
    return beacon


def get_beacon_by_name(store: Store, name: str) -> rec.BeaconRecord:
    with store.locked() as state:
        beacon = state.beacon_by_name(name)
    if beacon is None or beacon.deleted:
        raise NotFound(f"no beacon named {name!r}", name=name)
    return beacon


def add_beacon(
    store: Store,
    name: str,
    easting: float,
    northing: float,
    elevation: float | None = None,
    *,
    description: str = "",
    photo_ref: str | None = None,
    revision_surveyor: str = "",
    revision_date: str | date | None = None,
    marked: bool = False,
) -> rec.BeaconRecord:
    name = name.strip()
    if not name:
        raise InvalidCoordinate("beacon name must not be empty")
    position = GridPoint(easting, northing, elevation)
    if photo_ref is not None:
        rec.validate_media_ref(photo_ref, "photo")
    when = _parse_date(revision_date)
    with store.mutate("beacons") as state:
        existing = state.beacon_by_name(name)
        if existing is not None:
            raise DuplicateName(f"a beacon named {name!r} already exists",
                                beacon_id=existing.beacon_id)
        beacon = rec.BeaconRecord(
            beacon_id=state.take_id("beacons"),
            beacon_name=name,
            position=position,
            description=description,
            photo_ref=photo_ref,
            revision_surveyor=revision_surveyor,
            revision_date=when,
            marked=marked,
        )
        state.beacons[beacon.beacon_id] = beacon
    return beacon


def update_beacon(store: Store, beacon_id: int, **changes) -> rec.BeaconRecord:
    allowed = {
        "beacon_name", "easting", "northing", "elevation", "description",
        "photo_ref", "revision_surveyor", "revision_date", "marked",
    }
    unknown = set(changes) - allowed
    if unknown:
        raise NotFound(f"unknown beacon fields: {sorted(unknown)}")
    if "revision_date" in changes:
        changes["revision_date"] = _parse_date(changes["revision_date"])
    if changes.get("photo_ref") is not None:
        rec.validate_media_ref(changes["photo_ref"], "photo")
    with store.mutate("beacons") as state:
        beacon = state.beacons.get(beacon_id)
        if beacon is None or beacon.deleted:
            raise NotFound(f"no beacon with id {beacon_id}", beacon_id=beacon_id)
        if "beacon_name" in changes:
            new_name = changes["beacon_name"].strip()
            if not new_name:
                raise InvalidCoordinate("beacon name must not be empty")
            clash = state.beacon_by_name(new_name)
            if clash is not None and clash.beacon_id != beacon_id:
                raise DuplicateName(f"a beacon named {new_name!r} already exists",
                                    beacon_id=clash.beacon_id)
            changes["beacon_name"] = new_name
        pos = beacon.position
        coords = {k: changes.pop(k) for k in ("easting", "northing", "elevation")
                  if k in changes}
        if coords:
            pos = GridPoint(
                coords.get("easting", pos.easting),
                coords.get("northing", pos.northing),
                coords.get("elevation", pos.elevation),
            )
        updated = replace(beacon, position=pos, **changes)
        state.beacons[beacon_id] = updated
    return updated


def delete_beacon(store: Store, beacon_id: int) -> rec.BeaconRecord:
    """Move a beacon to the recycle bin."""
    with store.mutate("beacons", "recycle") as state:
        beacon = state.beacons.get(beacon_id)
        if beacon is None:
            raise NotFound(f"no beacon with id {beacon_id}", beacon_id=beacon_id)
        if beacon.deleted:
            raise NotFound(f"beacon {beacon_id} is already in the recycle bin",
                           beacon_id=beacon_id)
        updated = replace(beacon, deleted=True)
        state.beacons[beacon_id] = updated
        state.recycle.append(rec.RecycleEntry(
            kind="beacon", record_id=beacon_id,
            deleted_at=datetime.now(timezone.utc),
        ))
    return updated


def restore_beacon(store: Store, beacon_id: int) -> rec.BeaconRecord:
    with store.mutate("beacons", "recycle") as state:
        beacon = state.beacons.get(beacon_id)
        if beacon is None:
            raise NotFound(f"no beacon with id {beacon_id}", beacon_id=beacon_id)
        if not beacon.deleted:
            raise NotDeleted(f"beacon {beacon_id} is not in the recycle bin",
                             beacon_id=beacon_id)
        clash = state.beacon_by_name(beacon.beacon_name)
        if clash is not None and clash.beacon_id != beacon_id:
            raise DuplicateName(
                f"cannot restore: a beacon named {beacon.beacon_name!r} exists",
                beacon_id=clash.beacon_id,
            )
        updated = replace(beacon, deleted=False)
        state.beacons[beacon_id] = updated
        state.recycle = [
            e for e in state.recycle
            if not (e.kind == "beacon" and e.record_id == beacon_id)
        ]
    return updated


def list_beacons(store: Store, *, include_deleted: bool = False) -> list[rec.BeaconRecord]:
    with store.locked() as state:
        out = [b for b in state.beacons.values() if include_deleted or not b.deleted]
    out.sort(key=lambda b: b.beacon_name.casefold())
    return out


def search_beacons(store: Store, query: str) -> list[rec.BeaconRecord]:
    """Ranked search: name prefix, then name substring, then description."""
    needle = query.strip().casefold()
    if not needle:
        return []
    prefix, substring, described = [], [], []
    for b in list_beacons(store):
        name = b.beacon_name.casefold()
        if name.startswith(needle):
            prefix.append(b)
        elif needle in name:
            substring.append(b)
        elif needle in b.description.casefold():
            described.append(b)
    return prefix + substring + described


def beacon_join(store: Store, from_name: str, to_name: str) -> Join:
    """Bearing and distance from one beacon to another."""
    a = get_beacon_by_name(store, from_name)
    b = get_beacon_by_name(store, to_name)
    return join(a.position, b.position)


def export_beacons_csv(
    store: Store,
    unit: LengthUnit = LengthUnit.METRE,
    *,
    query: str | None = None,
) -> str:
    """Fixed-header CSV export with coordinates to the millimetre."""
    beacons = search_beacons(store, query) if query else list_beacons(store)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for b in beacons:
        easting = convert_length(b.position.easting, LengthUnit.METRE, unit)
        northing = convert_length(b.position.northing, LengthUnit.METRE, unit)
        if b.position.elevation is None:
            elevation = ""
        else:
            elevation = f"{convert_length(b.position.elevation, LengthUnit.METRE, unit):.3f}"
        writer.writerow([
            b.beacon_name,
            f"{easting:.3f}",
            f"{northing:.3f}",
            elevation,
            unit.value,
            b.description,
            b.revision_surveyor,
            b.revision_date.isoformat() if b.revision_date else "",
        ])
    return buf.getvalue()


def import_beacons_csv(store: Store, text: str) -> list[rec.BeaconRecord]:
    """Load beacons from CSV produced by :func:`export_beacons_csv`."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv("CSV is empty")
    if header != CSV_HEADER.split(","):
        raise MalformedCsv(
            f"unexpected CSV header {','.join(header)!r} (want {CSV_HEADER!r})"
        )
    parsed = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 8:
            raise MalformedCsv(f"line {lineno}: expected 8 fields, got {len(row)}")
        name, easting, northing, elevation, unit_s, desc, surveyor, rev = row
        try:
            unit = LengthUnit(unit_s)
        except ValueError:
            raise MalformedCsv(f"line {lineno}: unknown unit {unit_s!r}")
        try:
            e = convert_length(float(easting), unit, LengthUnit.METRE)
            n = convert_length(float(northing), unit, LengthUnit.METRE)
            z = (convert_length(float(elevation), unit, LengthUnit.METRE)
                 if elevation.strip() else None)
        except ValueError as exc:
            raise MalformedCsv(f"line {lineno}: bad coordinate: {exc}")
        try:
            when = _parse_date(rev)
        except MalformedCsv as exc:
            raise MalformedCsv(f"line {lineno}: {exc}")
        parsed.append((name, e, n, z, desc, surveyor, when))

    # Clash check up front so a rejected file adds nothing at all.
    seen: set[str] = set()
    with store.locked() as state:
        for name, *_ in parsed:
            key = name.casefold()
            if key in seen or state.beacon_by_name(name) is not None:
                raise DuplicateName(f"a beacon named {name!r} already exists",
                                    beacon_name=name)
            seen.add(key)

    added = []
    for name, e, n, z, desc, surveyor, when in parsed:
        added.append(add_beacon(
            store, name, e, n, z,
            description=desc, revision_surveyor=surveyor, revision_date=when,
        ))
    return added


def beacons_geojson(store: Store, *, query: str | None = None) -> dict:
    """GeoJSON FeatureCollection of the live beacons (grid coordinates)."""
    beacons = search_beacons(store, query) if query else list_beacons(store)
    features = []
    for b in beacons:
        features.append({
            "type": "Feature",
            "geometry": {
                "type": "Point",
                "coordinates": [b.position.easting, b.position.northing],
            },
            "properties": {
                "beacon_id": b.beacon_id,
                "name": b.beacon_name,
                "elevation": b.position.elevation,
                "description": b.description,
                "revision_surveyor": b.revision_surveyor,
                "revision_date": (b.revision_date.isoformat()
                                  if b.revision_date else None),
                "marked": b.marked,
            },
        })
    return {
        "type": "FeatureCollection",
        "crs_note": GEOJSON_CRS_NOTE,
        "features": features,
    }


def beacons_geojson_text(store: Store, *, query: str | None = None) -> str:
    return json.dumps(beacons_geojson(store, query=query), indent=2) + "\n"
