"""Lending ledger: stock counts, transactions, returns, recycle bin.

Conservation rule: for every instrument type, the recorded ``lent``
count equals the summed quantities of all unreturned transactions, and
``total - lent - faulty`` never goes negative. Every operation either
upholds the rule or is rejected before the state changes. Transactions
must be returned before they can be deleted, so recycle-bin moves never
touch stock.
"""

from __future__ import annotations

from dataclasses import replace
from datetime import date, datetime, timedelta, timezone

from . import records as rec
from .errors import (
    AlreadyDeleted,
    AlreadyReturned,
    Deleted,
    EmptyDetails,
    InsufficientStock,
    InvalidRange,
    InvalidRecord,
    NegativeCount,
    NotDeleted,
    NotFound,
    UnknownInstrument,
    WouldBreakConservation,
)
from .store import Store

MAX_SERIES_DAYS = 1830  # five years is plenty for one chart


def _now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


def _as_utc(when: datetime) -> datetime:
    """Ledger timestamps are UTC; naive input is taken as already UTC.

    Callers (the API among them) may hand in naive datetimes, and mixing
    them with the aware module clock would make date comparisons blow up.
    """
    if when.tzinfo is None:
        return when.replace(tzinfo=timezone.utc)
    return when.astimezone(timezone.utc)


# -- stock --------------------------------------------------------------


def list_stock(store: Store) -> list[rec.InstrumentStock]:
    with store.locked() as state:
        out = list(state.instruments.values())
    out.sort(key=lambda s: s.instrument_name.casefold())
    return out


def get_stock(store: Store, name: str) -> rec.InstrumentStock:
    with store.locked() as state:
        stock = state.instrument_by_name(name)
    if stock is None:
        raise UnknownInstrument(f"no instrument named {name!r}", name=name)
    return stock


def upsert_instrument(
    store: Store,
    name: str,
    total: int,
    *,
    faulty: int = 0,
    description: str | None = None,
) -> rec.InstrumentStock:
    """Create an instrument type or adjust its total/faulty counts.

    The lent count is never set directly; it only moves through lending
    and return operations, so the books cannot be cooked here.
    """
    name = name.strip()
    if not name:
        raise InvalidRecord("instrument name must not be empty")
    if total < 0 or faulty < 0:
        raise NegativeCount(f"counts must be >= 0 (total={total}, faulty={faulty})")
    with store.mutate("instruments") as state:
        existing = state.instrument_by_name(name)
        if existing is not None:
            if total - existing.lent - faulty < 0:
                raise WouldBreakConservation(
                    f"{existing.lent} {existing.instrument_name!r} out on loan; "
                    f"total={total} with faulty={faulty} would leave "
                    f"{total - existing.lent - faulty} remaining",
                    name=existing.instrument_name, lent=existing.lent,
                )
            updated = replace(
                existing, total=total, faulty=faulty,
                description=existing.description if description is None else description,
            )
            state.instruments[existing.instrument_id] = updated
            return updated
        if total - faulty < 0:
            raise WouldBreakConservation(
                f"faulty={faulty} exceeds total={total} for a new instrument"
            )
        stock = rec.InstrumentStock(
            instrument_id=state.take_id("instruments"),
            instrument_name=name,
            total=total,
            faulty=faulty,
            description=description or "",
        )
        state.instruments[stock.instrument_id] = stock
        return stock


def availability_snapshot(store: Store) -> list[dict]:
    """Per-instrument counts for the stock table and charts."""
    return [
        {
            "instrument_name": s.instrument_name,
            "total": s.total,
            "lent": s.lent,
            "faulty": s.faulty,
            "remaining": s.remaining,
        }
        for s in list_stock(store)
    ]


# -- transactions -------------------------------------------------------


def get_lending(
    store: Store, lending_id: int, *, include_deleted: bool = False
) -> rec.LendingRecord:
    with store.locked() as state:
        lending = state.lendings.get(lending_id)
    if lending is None:
        raise NotFound(f"no lending with id {lending_id}", lending_id=lending_id)
    if lending.deleted and not include_deleted:
        raise Deleted(f"lending {lending_id} is in the recycle bin", lending_id=lending_id)
    return lending


def create_lending(
    store: Store,
    person_name: str,
    items: list[tuple[str, int, list[str]]],
    *,
    person_department: str = "",
    person_phone: str = "",
    remarks: str = "",
    when: datetime | None = None,
) -> rec.LendingRecord:
    """Record a lending. All lines are checked before any stock moves."""
    person_name = person_name.strip()
    if not person_name:
        raise InvalidRecord("borrower name must not be empty")
    if not items:
        raise EmptyDetails("a lending needs at least one instrument line")
    when = _as_utc(when) if when else _now()

    with store.mutate("lendings", "lending_details", "instruments") as state:
        seen: set[str] = set()
        resolved: list[tuple[rec.InstrumentStock, int, list[str]]] = []
        for name, quantity, serials in items:
            stock = state.instrument_by_name(name)
            if stock is None:
                raise UnknownInstrument(f"no instrument named {name!r}", name=name)
            key = stock.instrument_name.casefold()
            if key in seen:
                raise InvalidRecord(
                    f"instrument {stock.instrument_name!r} is listed twice"
                )
            seen.add(key)
            if quantity < 1:
                raise NegativeCount(
                    f"quantity for {stock.instrument_name!r} must be >= 1, got {quantity}"
                )
            if quantity > stock.remaining:
                raise InsufficientStock(
                    f"only {stock.remaining} of {stock.instrument_name!r} in store, "
                    f"asked for {quantity}",
                    name=stock.instrument_name,
                    requested=quantity, remaining=stock.remaining,
                )
            resolved.append((stock, quantity, [s.strip() for s in serials if s.strip()]))

        details = [
            rec.LendingDetail(
                detail_id=state.take_id("lending_details"),
                instrument_name=stock.instrument_name,
                quantity=quantity,
                serials=serials,
            )
            for stock, quantity, serials in resolved
        ]
        lending = rec.LendingRecord(
            lending_id=state.take_id("lendings"),
            date=when,
            person_name=person_name,
            person_department=person_department.strip(),
            person_phone=person_phone.strip(),
            remarks=remarks,
            total_instru=sum(q for _, q, _ in resolved),
            details=details,
        )
        for stock, quantity, _ in resolved:
            state.instruments[stock.instrument_id] = replace(
                stock, lent=stock.lent + quantity
            )
        state.lendings[lending.lending_id] = lending
    return lending


def return_lending(
    store: Store, lending_id: int, *, when: datetime | None = None
) -> tuple[rec.LendingRecord, rec.ReturnNote]:
    """Book all instruments of a transaction back in and issue a note."""
    when = _as_utc(when) if when else _now()
    with store.mutate("lendings", "instruments") as state:
        lending = state.lendings.get(lending_id)
        if lending is None:
            raise NotFound(f"no lending with id {lending_id}", lending_id=lending_id)
        if lending.deleted:
            raise Deleted(f"lending {lending_id} is in the recycle bin",
                          lending_id=lending_id)
        if lending.is_returned:
            raise AlreadyReturned(f"lending {lending_id} was already returned",
                                  lending_id=lending_id)
        if when < _as_utc(lending.date):
            raise InvalidRecord(
                f"return date {when.isoformat()} is before the lending date"
            )
        for d in lending.details:
            stock = state.instrument_by_name(d.instrument_name)
            if stock is None or stock.lent < d.quantity:
                raise WouldBreakConservation(
                    f"stock for {d.instrument_name!r} does not cover this return"
                )
        for d in lending.details:
            stock = state.instrument_by_name(d.instrument_name)
            state.instruments[stock.instrument_id] = replace(
                stock, lent=stock.lent - d.quantity
            )
        updated = replace(lending, is_returned=True, return_date=when)
        state.lendings[lending_id] = updated
    note = rec.ReturnNote(
        lending_id=lending_id,
        issued_at=when,
        person_name=updated.person_name,
        lines=[(d.instrument_name, d.quantity) for d in updated.details],
        remarks=updated.remarks,
    )
    return updated, note


def soft_delete_lending(store: Store, lending_id: int) -> rec.LendingRecord:
    """Park a returned transaction in the recycle bin."""
    with store.mutate("lendings", "recycle") as state:
        lending = state.lendings.get(lending_id)
        if lending is None:
            raise NotFound(f"no lending with id {lending_id}", lending_id=lending_id)
        if lending.deleted:
            raise AlreadyDeleted(f"lending {lending_id} is already in the recycle bin",
                                 lending_id=lending_id)
        if not lending.is_returned:
            raise WouldBreakConservation(
                f"lending {lending_id} still has instruments out; "
                "book the return before deleting it",
                lending_id=lending_id,
            )
        updated = replace(lending, deleted=True)
        state.lendings[lending_id] = updated
        state.recycle.append(rec.RecycleEntry(
            kind="lending", record_id=lending_id, deleted_at=_now(),
        ))
    return updated


def restore_lending(store: Store, lending_id: int) -> rec.LendingRecord:
    with store.mutate("lendings", "recycle") as state:
        lending = state.lendings.get(lending_id)
        if lending is None:
            raise NotFound(f"no lending with id {lending_id}", lending_id=lending_id)
        if not lending.deleted:
            raise NotDeleted(f"lending {lending_id} is not in the recycle bin",
                             lending_id=lending_id)
        updated = replace(lending, deleted=False)
        state.lendings[lending_id] = updated
        state.recycle = [
            e for e in state.recycle
            if not (e.kind == "lending" and e.record_id == lending_id)
        ]
    return updated


def list_lendings(
    store: Store,
    *,
    include_deleted: bool = False,
    only_open: bool = False,
) -> list[rec.LendingRecord]:
    with store.locked() as state:
        out = [
            l for l in state.lendings.values()
            if (include_deleted or not l.deleted)
            and (not only_open or not l.is_returned)
        ]
    out.sort(key=lambda l: (l.date, l.lending_id), reverse=True)
    return out


def list_recycle_bin(store: Store) -> list[dict]:
    """Recycle-bin contents with enough context to pick what to restore."""
    with store.locked() as state:
        out = []
        for e in sorted(state.recycle, key=lambda e: e.deleted_at, reverse=True):
            label = ""
            if e.kind == "lending" and e.record_id in state.lendings:
                label = state.lendings[e.record_id].person_name
            elif e.kind == "beacon" and e.record_id in state.beacons:
                label = state.beacons[e.record_id].beacon_name
            out.append({
                "kind": e.kind,
                "record_id": e.record_id,
                "deleted_at": e.deleted_at.isoformat(),
                "label": label,
            })
    return out


def search_transactions(
    store: Store, query: str, *, include_deleted: bool = False
) -> list[rec.LendingRecord]:
    """Substring match over borrower, department, instruments and serials."""
    needle = query.strip().casefold()
    if not needle:
        return []
    hits = []
    for lending in list_lendings(store, include_deleted=include_deleted):
        hay = [
            lending.person_name, lending.person_department,
            lending.person_phone, lending.remarks,
        ]
        for d in lending.details:
            hay.append(d.instrument_name)
            hay.extend(d.serials)
        if any(needle in h.casefold() for h in hay):
            hits.append(lending)
    return hits


# -- statistics ---------------------------------------------------------


def daily_series(store: Store, start: date, end: date) -> list[dict]:
    """Zero-filled per-day lending/return counts over [start, end]."""
    if end < start:
        raise InvalidRange(f"end {end.isoformat()} is before start {start.isoformat()}")
    days = (end - start).days + 1
    if days > MAX_SERIES_DAYS:
        raise InvalidRange(f"range of {days} days exceeds the {MAX_SERIES_DAYS}-day cap")
    series = {
        start + timedelta(days=i): {"lendings": 0, "instruments": 0, "returns": 0}
        for i in range(days)
    }
    with store.locked() as state:
        for lending in state.lendings.values():
            if lending.deleted:
                continue
            day = lending.date.date()
            if day in series:
                series[day]["lendings"] += 1
                series[day]["instruments"] += lending.total_instru
            if lending.return_date is not None:
                rday = lending.return_date.date()
                if rday in series:
                    series[rday]["returns"] += 1
    return [
        {"date": day.isoformat(), **counts}
        for day, counts in sorted(series.items())
    ]


def audit_conservation(store: Store) -> dict:
    """Recompute lent counts from open transactions and compare to stock."""
    with store.locked() as state:
        expected: dict[str, int] = {}
        for lending in state.lendings.values():
            if lending.is_returned:
                continue
            for d in lending.details:
                key = d.instrument_name.casefold()
                expected[key] = expected.get(key, 0) + d.quantity
        rows = []
        ok = True
        for stock in sorted(state.instruments.values(),
                            key=lambda s: s.instrument_name.casefold()):
            want = expected.pop(stock.instrument_name.casefold(), 0)
            row_ok = stock.lent == want and stock.remaining >= 0
            ok = ok and row_ok
            rows.append({
                "instrument_name": stock.instrument_name,
                "lent_recorded": stock.lent,
                "lent_expected": want,
                "remaining": stock.remaining,
                "ok": row_ok,
            })
        if expected:  # open loans naming unknown stock
            ok = False
    return {"ok": ok, "instruments": rows}
