"""Instrument catalog: what an instrument is, where it lives, what a
field job needs.

Catalog entries are keyed by case-insensitive instrument name and are
independent of stock counts; an entry may describe an instrument the
store does not currently hold. Job templates list required instruments
per job type and are joined against live stock on demand.
"""

from __future__ import annotations

import csv
import io
from dataclasses import replace

from . import records as rec
from .errors import MalformedCsv, NegativeCount, NotFound, UnknownInstrument
from .store import Store

CATALOG_CSV_HEADER = "InstrumentName,Description,Room,Shelf"


def list_catalog(store: Store) -> list[rec.CatalogEntry]:
    with store.locked() as state:
        out = list(state.catalog.values())
    out.sort(key=lambda e: e.instrument_name.casefold())
    return out


def get_catalog_entry(store: Store, name: str) -> rec.CatalogEntry:
    with store.locked() as state:
        entry = state.catalog.get(name.strip().casefold())
    if entry is None:
        raise NotFound(f"no catalog entry for {name!r}", name=name)
    return entry


def upsert_catalog_entry(
    store: Store,
    instrument_name: str,
    *,
    description: str | None = None,
    room: str | None = None,
    shelf: str | None = None,
    media_refs: list[str] | None = None,
) -> rec.CatalogEntry:
    instrument_name = instrument_name.strip()
    if not instrument_name:
        raise NotFound("catalog entry needs an instrument name")
    if media_refs is not None:
        for ref in media_refs:
            rec.validate_media_ref(ref)
    key = instrument_name.casefold()
    with store.mutate("catalog") as state:
        existing = state.catalog.get(key)
        if existing is None:
            entry = rec.CatalogEntry(
                instrument_name=instrument_name,
                description=description or "",
                room=(room or "").strip() or "unassigned",
                shelf=(shelf or "").strip(),
                media_refs=media_refs or [],
            )
        else:
            entry = replace(
                existing,
                description=existing.description if description is None else description,
                room=existing.room if room is None else (room.strip() or "unassigned"),
                shelf=existing.shelf if shelf is None else shelf.strip(),
                media_refs=existing.media_refs if media_refs is None else media_refs,
            )
        state.catalog[key] = entry
    return entry


def locate_instrument(store: Store, name: str) -> dict:
    """Room/shelf plus live stock counts when the instrument is stocked."""
    entry = get_catalog_entry(store, name)
    with store.locked() as state:
        stock = state.instrument_by_name(entry.instrument_name)
    out = {
        "instrument_name": entry.instrument_name,
        "description": entry.description,
        "room": entry.room,
        "shelf": entry.shelf,
        "media_refs": list(entry.media_refs),
        "stocked": stock is not None,
        "remaining": stock.remaining if stock is not None else None,
    }
    return out


def search_catalog(store: Store, query: str) -> list[rec.CatalogEntry]:
    """Name matches first, then description matches."""
    needle = query.strip().casefold()
    if not needle:
        return []
    by_name, by_description = [], []
    for entry in list_catalog(store):
        if needle in entry.instrument_name.casefold():
            by_name.append(entry)
        elif needle in entry.description.casefold():
            by_description.append(entry)
    return by_name + by_description


def import_catalog_csv(store: Store, text: str) -> list[rec.CatalogEntry]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv("CSV is empty")
    if header != CATALOG_CSV_HEADER.split(","):
        raise MalformedCsv(
            f"unexpected CSV header {','.join(header)!r} (want {CATALOG_CSV_HEADER!r})"
        )
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise MalformedCsv(f"line {lineno}: expected 4 fields, got {len(row)}")
        name, description, room, shelf = (f.strip() for f in row)
        if not name:
            raise MalformedCsv(f"line {lineno}: empty instrument name")
        rows.append((name, description, room, shelf))
    return [
        upsert_catalog_entry(store, name, description=description, room=room, shelf=shelf)
        for name, description, room, shelf in rows
    ]


# -- job templates ------------------------------------------------------


def list_job_templates(store: Store) -> list[rec.JobTemplate]:
    with store.locked() as state:
        out = list(state.job_templates.values())
    out.sort(key=lambda t: t.job_type.casefold())
    return out


def upsert_job_template(
    store: Store, job_type: str, required: list[tuple[str, int]]
) -> rec.JobTemplate:
    """Define what a job type needs. Every name must be in the catalog."""
    job_type = job_type.strip()
    if not job_type:
        raise NotFound("job template needs a job type name")
    if not required:
        raise NotFound(f"job template {job_type!r} lists no instruments")
    cleaned: list[tuple[str, int]] = []
    with store.mutate("job_templates") as state:
        seen: set[str] = set()
        for name, quantity in required:
            entry = state.catalog.get(name.strip().casefold())
            if entry is None:
                raise UnknownInstrument(
                    f"job template {job_type!r} names {name!r}, "
                    "which is not in the catalog",
                    name=name,
                )
            if quantity < 1:
                raise NegativeCount(
                    f"quantity for {entry.instrument_name!r} must be >= 1, got {quantity}"
                )
            key = entry.instrument_name.casefold()
            if key in seen:
                raise NotFound(f"{entry.instrument_name!r} is listed twice")
            seen.add(key)
            cleaned.append((entry.instrument_name, quantity))
        template = rec.JobTemplate(job_type=job_type, required_instruments=cleaned)
        state.job_templates[job_type.casefold()] = template
    return template


def job_requirements(store: Store, job_type: str) -> dict:
    """Template joined with live stock; flags shortfalls per line."""
    with store.locked() as state:
        template = state.job_templates.get(job_type.strip().casefold())
        if template is None:
            raise NotFound(f"no job template for {job_type!r}", job_type=job_type)
        lines = []
        all_covered = True
        for name, quantity in template.required_instruments:
            stock = state.instrument_by_name(name)
            remaining = stock.remaining if stock is not None else None
            covered = remaining is not None and remaining >= quantity
            all_covered = all_covered and covered
            lines.append({
                "instrument_name": name,
                "required": quantity,
                "remaining": remaining,
                "covered": covered,
            })
    return {"job_type": template.job_type, "lines": lines, "all_covered": all_covered}
