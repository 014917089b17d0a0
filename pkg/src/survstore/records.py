"""Persistent record types for every table in the store.

Each record knows how to convert to and from the plain-dict form used
in the table documents on disk. ``validate_state`` re-checks every
invariant, including the cross-table ones, and is run on every load.
"""

from __future__ import annotations

import math
import posixpath
from dataclasses import dataclass, field, replace
from datetime import date, datetime

from .compute.geometry import GridPoint
from .errors import BadPhotoPath, CorruptTable

_ = replace  # re-exported for registry modules


def validate_media_ref(ref: str, what: str = "media reference") -> str:
    """Reject refs that could escape the store's media directory."""
    if not isinstance(ref, str) or not ref.strip():
        raise BadPhotoPath(f"{what} must be a non-empty relative path")
    if "\\" in ref or ref.startswith("/") or posixpath.isabs(ref):
        raise BadPhotoPath(f"{what} must be relative, got {ref!r}")
    parts = ref.split("/")
    if any(p in ("", ".", "..") for p in parts):
        raise BadPhotoPath(f"{what} may not traverse directories: {ref!r}")
    if any(":" in p for p in parts):
        raise BadPhotoPath(f"{what} may not carry drive or scheme markers: {ref!r}")
    return ref


@dataclass(frozen=True)
class BeaconRecord:
    """One survey beacon: grid position, photo, revision metadata."""

    beacon_id: int
    beacon_name: str
    position: GridPoint
    description: str = ""
    photo_ref: str | None = None
    revision_surveyor: str = ""
    revision_date: date | None = None
    marked: bool = False
    deleted: bool = False

    def to_dict(self) -> dict:
        return {
            "beacon_id": self.beacon_id,
            "beacon_name": self.beacon_name,
            "easting": self.position.easting,
            "northing": self.position.northing,
            "elevation": self.position.elevation,
            "description": self.description,
            "photo_ref": self.photo_ref,
            "revision_surveyor": self.revision_surveyor,
            "revision_date": self.revision_date.isoformat() if self.revision_date else None,
            "marked": self.marked,
            "deleted": self.deleted,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BeaconRecord":
        return cls(
            beacon_id=int(d["beacon_id"]),
            beacon_name=str(d["beacon_name"]),
            position=GridPoint(
                easting=float(d["easting"]),
                northing=float(d["northing"]),
                elevation=None if d.get("elevation") is None else float(d["elevation"]),
            ),
            description=str(d.get("description", "")),
            photo_ref=d.get("photo_ref"),
            revision_surveyor=str(d.get("revision_surveyor", "")),
            revision_date=(
                date.fromisoformat(d["revision_date"]) if d.get("revision_date") else None
            ),
            marked=bool(d.get("marked", False)),
            deleted=bool(d.get("deleted", False)),
        )


@dataclass(frozen=True)
class InstrumentStock:
    """Per-instrument-type inventory counts; remaining is derived."""

    instrument_id: int
    instrument_name: str
    total: int
    lent: int = 0
    faulty: int = 0
    description: str = ""

    @property
    def remaining(self) -> int:
        return self.total - self.lent - self.faulty

    def to_dict(self) -> dict:
        return {
            "instrument_id": self.instrument_id,
            "instrument_name": self.instrument_name,
            "total": self.total,
            "lent": self.lent,
            "faulty": self.faulty,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InstrumentStock":
        return cls(
            instrument_id=int(d["instrument_id"]),
            instrument_name=str(d["instrument_name"]),
            total=int(d["total"]),
            lent=int(d.get("lent", 0)),
            faulty=int(d.get("faulty", 0)),
            description=str(d.get("description", "")),
        )


@dataclass(frozen=True)
class LendingDetail:
    """One instrument line of a lending transaction."""

    detail_id: int
    instrument_name: str
    quantity: int
    serials: list[str] = field(default_factory=list)

    def to_dict(self, lending_id: int) -> dict:
        return {
            "detail_id": self.detail_id,
            "lending_id": lending_id,
            "instrument_name": self.instrument_name,
            "quantity": self.quantity,
            "serials": list(self.serials),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LendingDetail":
        return cls(
            detail_id=int(d["detail_id"]),
            instrument_name=str(d["instrument_name"]),
            quantity=int(d["quantity"]),
            serials=[str(s) for s in d.get("serials", [])],
        )


@dataclass(frozen=True)
class LendingRecord:
    """One lending transaction with its per-instrument lines."""

    lending_id: int
    date: datetime
    person_name: str
    person_department: str = ""
    person_phone: str = ""
    is_returned: bool = False
    return_date: datetime | None = None
    remarks: str = ""
    total_instru: int = 0
    deleted: bool = False
    details: list[LendingDetail] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lending_id": self.lending_id,
            "date": self.date.isoformat(),
            "person_name": self.person_name,
            "person_department": self.person_department,
            "person_phone": self.person_phone,
            "is_returned": self.is_returned,
            "return_date": self.return_date.isoformat() if self.return_date else None,
            "remarks": self.remarks,
            "total_instru": self.total_instru,
            "deleted": self.deleted,
        }

    @classmethod
    def from_dict(cls, d: dict, details: list[LendingDetail]) -> "LendingRecord":
        return cls(
            lending_id=int(d["lending_id"]),
            date=datetime.fromisoformat(d["date"]),
            person_name=str(d["person_name"]),
            person_department=str(d.get("person_department", "")),
            person_phone=str(d.get("person_phone", "")),
            is_returned=bool(d.get("is_returned", False)),
            return_date=(
                datetime.fromisoformat(d["return_date"]) if d.get("return_date") else None
            ),
            remarks=str(d.get("remarks", "")),
            total_instru=int(d.get("total_instru", 0)),
            deleted=bool(d.get("deleted", False)),
            details=details,
        )


@dataclass(frozen=True)
class ReturnNote:
    """Receipt issued when all instruments of a lending come back."""

    lending_id: int
    issued_at: datetime
    person_name: str
    lines: list[tuple[str, int]]
    remarks: str = ""

    def render_text(self) -> str:
        """Fixed plain-text layout for the console's print view."""
        out = [
            "RETURN NOTE",
            "===========",
            f"Lending:   #{self.lending_id}",
            f"Borrower:  {self.person_name}",
            f"Issued at: {self.issued_at.isoformat()}",
            "",
            "Returned instruments:",
        ]
        for name, qty in self.lines:
            out.append(f"  {qty:>4} x {name}")
        if self.remarks:
            out.append("")
            out.append(f"Remarks: {self.remarks}")
        return "\n".join(out) + "\n"


@dataclass(frozen=True)
class CatalogEntry:
    """Where an instrument lives in the store, and what it is."""

    instrument_name: str
    description: str = ""
    room: str = ""
    shelf: str = ""
    media_refs: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "instrument_name": self.instrument_name,
            "description": self.description,
            "room": self.room,
            "shelf": self.shelf,
            "media_refs": list(self.media_refs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CatalogEntry":
        return cls(
            instrument_name=str(d["instrument_name"]),
            description=str(d.get("description", "")),
            room=str(d.get("room", "")),
            shelf=str(d.get("shelf", "")),
            media_refs=[str(m) for m in d.get("media_refs", [])],
        )


@dataclass(frozen=True)
class JobTemplate:
    """Instruments needed for one survey job type."""

    job_type: str
    required_instruments: list[tuple[str, int]]

    def to_dict(self) -> dict:
        return {
            "job_type": self.job_type,
            "required_instruments": [
                {"instrument_name": n, "quantity": q} for n, q in self.required_instruments
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JobTemplate":
        return cls(
            job_type=str(d["job_type"]),
            required_instruments=[
                (str(r["instrument_name"]), int(r["quantity"]))
                for r in d.get("required_instruments", [])
            ],
        )


@dataclass(frozen=True)
class RecycleEntry:
    """Recycle-bin bookkeeping for a soft-deleted record."""

    kind: str  # "lending" or "beacon"
    record_id: int
    deleted_at: datetime

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "record_id": self.record_id,
            "deleted_at": self.deleted_at.isoformat(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RecycleEntry":
        return cls(
            kind=str(d["kind"]),
            record_id=int(d["record_id"]),
            deleted_at=datetime.fromisoformat(d["deleted_at"]),
        )


@dataclass
class StoreState:
    """The whole in-memory database, keyed by primary key."""

    beacons: dict[int, BeaconRecord] = field(default_factory=dict)
    instruments: dict[int, InstrumentStock] = field(default_factory=dict)
    lendings: dict[int, LendingRecord] = field(default_factory=dict)
    catalog: dict[str, CatalogEntry] = field(default_factory=dict)  # key: casefolded name
    job_templates: dict[str, JobTemplate] = field(default_factory=dict)  # key: casefolded type
    recycle: list[RecycleEntry] = field(default_factory=list)
    next_ids: dict[str, int] = field(
        default_factory=lambda: {
            "beacons": 1,
            "instruments": 1,
            "lendings": 1,
            "lending_details": 1,
        }
    )

    def take_id(self, table: str) -> int:
        nid = self.next_ids[table]
        self.next_ids[table] = nid + 1
        return nid

    def instrument_by_name(self, name: str) -> InstrumentStock | None:
        wanted = name.casefold().strip()
        for stock in self.instruments.values():
            if stock.instrument_name.casefold() == wanted:
                return stock
        return None

    def beacon_by_name(self, name: str) -> BeaconRecord | None:
        wanted = name.casefold().strip()
        for b in self.beacons.values():
            if b.beacon_name.casefold() == wanted:
                return b
        return None


def _fail(table: str, message: str, **details) -> CorruptTable:
    return CorruptTable(f"table {table!r}: {message}", table=table, **details)


def validate_state(state: StoreState) -> None:
    """Re-check every stored invariant; raises CorruptTable on violation."""
    seen_names: dict[str, int] = {}
    for bid, b in state.beacons.items():
        if bid != b.beacon_id:
            raise _fail("beacons", f"key {bid} does not match record id {b.beacon_id}")
        if not b.beacon_name.strip():
            raise _fail("beacons", f"beacon {bid} has an empty name", record_id=bid)
        if not (math.isfinite(b.position.easting) and math.isfinite(b.position.northing)):
            raise _fail("beacons", f"beacon {bid} has non-finite coordinates", record_id=bid)
        key = b.beacon_name.casefold()
        if key in seen_names:
            raise _fail(
                "beacons",
                f"duplicate beacon name {b.beacon_name!r} (ids {seen_names[key]}, {bid})",
                record_id=bid,
            )
        seen_names[key] = bid
        if b.photo_ref is not None:
            try:
                validate_media_ref(b.photo_ref, "photo reference")
            except BadPhotoPath as exc:
                raise _fail("beacons", f"beacon {bid}: {exc.message}", record_id=bid)
        if bid >= state.next_ids["beacons"]:
            raise _fail("beacons", f"id {bid} is not below next_id", record_id=bid)

    seen_instr: dict[str, int] = {}
    for iid, s in state.instruments.items():
        if iid != s.instrument_id:
            raise _fail("instruments", f"key {iid} does not match record id {s.instrument_id}")
        if not s.instrument_name.strip():
            raise _fail("instruments", f"instrument {iid} has an empty name", record_id=iid)
        key = s.instrument_name.casefold()
        if key in seen_instr:
            raise _fail(
                "instruments",
                f"duplicate instrument name {s.instrument_name!r}",
                record_id=iid,
            )
        seen_instr[key] = iid
        if s.total < 0 or s.lent < 0 or s.faulty < 0 or s.remaining < 0:
            raise _fail(
                "instruments",
                f"instrument {s.instrument_name!r} breaks conservation: "
                f"total={s.total} lent={s.lent} faulty={s.faulty}",
                record_id=iid,
            )
        if iid >= state.next_ids["instruments"]:
            raise _fail("instruments", f"id {iid} is not below next_id", record_id=iid)

    seen_details: set[int] = set()
    for lid, rec in state.lendings.items():
        if lid != rec.lending_id:
            raise _fail("lendings", f"key {lid} does not match record id {rec.lending_id}")
        if not rec.details:
            raise _fail("lendings", f"lending {lid} has no detail lines", record_id=lid)
        if rec.total_instru != sum(d.quantity for d in rec.details):
            raise _fail(
                "lendings",
                f"lending {lid}: total_instru {rec.total_instru} does not equal "
                "the sum of its detail quantities",
                record_id=lid,
            )
        if rec.is_returned:
            if rec.return_date is None:
                raise _fail("lendings", f"lending {lid} returned without a date", record_id=lid)
            if rec.return_date < rec.date:
                raise _fail(
                    "lendings", f"lending {lid} returned before it was lent", record_id=lid
                )
        for d in rec.details:
            if d.detail_id in seen_details:
                raise _fail(
                    "lending_details", f"duplicate detail id {d.detail_id}",
                    record_id=d.detail_id,
                )
            seen_details.add(d.detail_id)
            if d.quantity < 1:
                raise _fail(
                    "lending_details",
                    f"lending {lid}: quantity must be >= 1, got {d.quantity}",
                    record_id=d.detail_id,
                )
            if d.instrument_name.casefold() not in seen_instr:
                raise _fail(
                    "lending_details",
                    f"lending {lid} names unknown instrument {d.instrument_name!r}",
                    record_id=d.detail_id,
                )
            if d.detail_id >= state.next_ids["lending_details"]:
                raise _fail(
                    "lending_details",
                    f"id {d.detail_id} is not below next_id",
                    record_id=d.detail_id,
                )
        if lid >= state.next_ids["lendings"]:
            raise _fail("lendings", f"id {lid} is not below next_id", record_id=lid)
        if rec.deleted and not rec.is_returned:
            raise _fail(
                "lendings",
                f"lending {lid} is deleted while its instruments are still out",
                record_id=lid,
            )

    open_counts: dict[str, int] = {}
    for rec in state.lendings.values():
        if rec.is_returned:
            continue
        for d in rec.details:
            key = d.instrument_name.casefold()
            open_counts[key] = open_counts.get(key, 0) + d.quantity
    for key, iid in seen_instr.items():
        stock = state.instruments[iid]
        expected = open_counts.get(key, 0)
        if stock.lent != expected:
            raise _fail(
                "instruments",
                f"instrument {stock.instrument_name!r}: lent count {stock.lent} "
                f"does not match the {expected} currently out on loan",
                record_id=iid,
            )

    for key, entry in state.catalog.items():
        if key != entry.instrument_name.casefold():
            raise _fail("catalog", f"key {key!r} does not match {entry.instrument_name!r}")
        if not entry.instrument_name.strip():
            raise _fail("catalog", "entry has an empty instrument name")
        if not entry.room.strip():
            raise _fail("catalog", f"{entry.instrument_name!r} has an empty room")
        for ref in entry.media_refs:
            try:
                validate_media_ref(ref)
            except BadPhotoPath as exc:
                raise _fail("catalog", f"{entry.instrument_name!r}: {exc.message}")

    for key, tpl in state.job_templates.items():
        if key != tpl.job_type.casefold():
            raise _fail("job_templates", f"key {key!r} does not match {tpl.job_type!r}")
        if not tpl.job_type.strip():
            raise _fail("job_templates", "template has an empty job type")
        if not tpl.required_instruments:
            raise _fail("job_templates", f"{tpl.job_type!r} requires no instruments")
        for name, qty in tpl.required_instruments:
            if qty < 1:
                raise _fail(
                    "job_templates",
                    f"{tpl.job_type!r}: quantity for {name!r} must be >= 1, got {qty}",
                )

    deleted_expected = {("beacon", bid) for bid, b in state.beacons.items() if b.deleted}
    deleted_expected |= {("lending", lid) for lid, r in state.lendings.items() if r.deleted}
    seen_recycle: set[tuple[str, int]] = set()
    for entry in state.recycle:
        if entry.kind not in ("beacon", "lending"):
            raise _fail("recycle", f"unknown kind {entry.kind!r}")
        key2 = (entry.kind, entry.record_id)
        if key2 in seen_recycle:
            raise _fail("recycle", f"duplicate entry for {entry.kind} {entry.record_id}")
        seen_recycle.add(key2)
        if key2 not in deleted_expected:
            raise _fail(
                "recycle",
                f"{entry.kind} {entry.record_id} is in the bin but not flagged deleted",
            )
    missing = deleted_expected - seen_recycle
    if missing:
        kind, rid = sorted(missing)[0]
        raise _fail("recycle", f"deleted {kind} {rid} has no recycle-bin entry")
