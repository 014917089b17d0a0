"""Durable document store for all registries and ledgers.

On-disk layout (documented field-by-field in FORMATS.md):

    <root>/
      CURRENT              small JSON pointer naming the live table files
      tables/              one JSON document per table, generation-suffixed
      media/               managed photo/video files
      .lock                single-owner lock

A commit writes the dirty tables to files of a fresh generation, then
atomically replaces CURRENT. The CURRENT replacement is the single
commit point: a crash anywhere before it leaves the previous state; a
crash after it leaves the new state. Either way the store reopens
consistent. Old-generation files are swept opportunistically.

One process owns a store directory at a time (lock file); within the
process all mutations serialize on one lock, and reads take the same
lock briefly, so every operation sees a consistent snapshot.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator

from filelock import FileLock, Timeout

from . import records as rec
from .errors import (
    BadMediaPath,
    CorruptTable,
    Inaccessible,
    IoFailure,
    SchemaMismatch,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CURRENT_NAME = "CURRENT"
TABLES = (
    "beacons",
    "instruments",
    "lendings",
    "lending_details",
    "catalog",
    "job_templates",
    "recycle",
)

_TABLE_FILE_RE = re.compile(r"^([a-z_]+)\.(\d{8})\.json$")
_MEDIA_NAME_RE = re.compile(r"[^A-Za-z0-9._-]+")


def _serialize_table(state: rec.StoreState, table: str) -> dict:
    if table == "beacons":
        recs = [state.beacons[k].to_dict() for k in sorted(state.beacons)]
        return {"table": table, "next_id": state.next_ids["beacons"], "records": recs}
    if table == "instruments":
        recs = [state.instruments[k].to_dict() for k in sorted(state.instruments)]
        return {"table": table, "next_id": state.next_ids["instruments"], "records": recs}
    if table == "lendings":
        recs = [state.lendings[k].to_dict() for k in sorted(state.lendings)]
        return {"table": table, "next_id": state.next_ids["lendings"], "records": recs}
    if table == "lending_details":
        recs = [
            d.to_dict(lid)
            for lid in sorted(state.lendings)
            for d in state.lendings[lid].details
        ]
        return {
            "table": table,
            "next_id": state.next_ids["lending_details"],
            "records": recs,
        }
    if table == "catalog":
        recs = [state.catalog[k].to_dict() for k in sorted(state.catalog)]
        return {"table": table, "records": recs}
    if table == "job_templates":
        recs = [state.job_templates[k].to_dict() for k in sorted(state.job_templates)]
        return {"table": table, "records": recs}
    if table == "recycle":
        recs = [e.to_dict() for e in sorted(state.recycle, key=lambda e: (e.kind, e.record_id))]
        return {"table": table, "records": recs}
    raise ValueError(f"unknown table {table!r}")


def _table_bytes(doc: dict) -> bytes:
    # Compact form: indent pushes json onto its pure-Python encoder,
    # which dominates commit time once the ledger has a few hundred rows.
    return (json.dumps(doc, sort_keys=True, ensure_ascii=False,
                       separators=(",", ":")) + "\n").encode("utf-8")


class Store:
    """An open store directory. Use :func:`open_store` to obtain one."""

    def __init__(self, root: Path, *, durable: bool = True):
        self.root = Path(root)
        self.durable = durable
        self._mutex = threading.RLock()
        self._flock: FileLock | None = None
        self._state = rec.StoreState()
        self._generation = 0
        self._table_files: dict[str, str] = {}
        self._closed = False
        # Test hook: called with a step label before each commit step.
        self.failpoint: Callable[[str], None] | None = None

    # -- paths --------------------------------------------------------

    @property
    def tables_dir(self) -> Path:
        return self.root / "tables"

    @property
    def media_dir(self) -> Path:
        return self.root / "media"

    @property
    def current_path(self) -> Path:
        return self.root / CURRENT_NAME

    # -- lifecycle ----------------------------------------------------

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        if self._flock is not None:
            self._flock.release()
            self._flock = None

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- access -------------------------------------------------------

    @contextmanager
    def locked(self) -> Iterator[rec.StoreState]:
        """Consistent read snapshot; hold only while reading."""
        with self._mutex:
            yield self._state

    @contextmanager
    def mutate(self, *tables: str) -> Iterator[rec.StoreState]:
        """Mutate the named tables and commit atomically on exit.

        Callers must validate before touching the state: a domain error
        raised inside the block must leave the state unmodified. An IO
        failure during commit reloads the last committed state from
        disk, so memory never drifts from disk.
        """
        if self._closed:
            raise Inaccessible("store is closed")
        unknown = set(tables) - set(TABLES)
        if unknown:
            raise ValueError(f"unknown tables: {sorted(unknown)}")
        with self._mutex:
            yield self._state
            self._commit(tables)

    def _fail(self, step: str) -> None:
        if self.failpoint is not None:
            self.failpoint(step)

    def _fsync(self, fd: int) -> None:
        if self.durable:
            os.fsync(fd)

    def _write_file(self, path: Path, data: bytes, label: str) -> None:
        self._fail(f"write:{label}")
        with open(path, "wb") as fh:
            fh.write(data)
            self._fail(f"fsync:{label}")
            self._fsync(fh.fileno())

    def _sync_dir(self, path: Path) -> None:
        if not self.durable:
            return
        fd = os.open(path, os.O_RDONLY)
        try:
            os.fsync(fd)
        finally:
            os.close(fd)

    def _commit(self, tables: tuple[str, ...]) -> None:
        """Write dirty tables under a new generation and swing CURRENT."""
        gen = self._generation + 1
        new_files = dict(self._table_files)
        try:
            for table in sorted(tables):
                name = f"{table}.{gen:08d}.json"
                self._write_file(
                    self.tables_dir / name, _table_bytes(_serialize_table(self._state, table)),
                    table,
                )
                new_files[table] = name
            current_doc = {
                "schema_version": SCHEMA_VERSION,
                "generation": gen,
                "tables": new_files,
            }
            tmp = self.root / (CURRENT_NAME + ".tmp")
            self._write_file(tmp, _table_bytes(current_doc), "current")
            self._fail("rename:current")
            os.replace(tmp, self.current_path)
        except Exception as exc:
            # Nothing before the CURRENT replacement is visible; reload
            # so the in-memory state matches the last committed one.
            self._reload()
            raise IoFailure(f"commit failed, previous state kept: {exc}") from exc
        try:
            self._fail("dirsync")
            self._sync_dir(self.root)
        except Exception as exc:  # commit point already passed
            logger.warning("directory sync after commit failed: %s", exc)
        self._generation = gen
        self._table_files = new_files
        self._sweep_orphans()

    def _reload(self) -> None:
        if not self.current_path.exists():
            # Initial commit failed before anything became visible.
            self._generation, self._table_files, self._state = 0, {}, rec.StoreState()
            return
        try:
            self._generation, self._table_files, self._state = _load_dir(self.root)
        except Exception:
            logger.exception("reload after failed commit did not succeed")
            raise

    def _sweep_orphans(self) -> None:
        live = set(self._table_files.values())
        try:
            for p in self.tables_dir.iterdir():
                if p.name not in live and (_TABLE_FILE_RE.match(p.name) or p.suffix == ".tmp"):
                    p.unlink(missing_ok=True)
            tmp = self.root / (CURRENT_NAME + ".tmp")
            tmp.unlink(missing_ok=True)
        except OSError:
            pass

    # -- media --------------------------------------------------------

    def add_media(self, filename: str, data: bytes) -> str:
        """Store a managed media file; returns the reference to persist."""
        base = _MEDIA_NAME_RE.sub("_", Path(filename).name).strip("._")
        if not base:
            raise BadMediaPath(f"cannot derive a media name from {filename!r}")
        candidate = base
        stem, dot, suffix = base.rpartition(".")
        n = 1
        with self._mutex:
            while (self.media_dir / candidate).exists():
                n += 1
                candidate = f"{stem}-{n}{dot}{suffix}" if dot else f"{base}-{n}"
            tmp = self.media_dir / (candidate + ".tmp")
            try:
                with open(tmp, "wb") as fh:
                    fh.write(data)
                    self._fsync(fh.fileno())
                os.replace(tmp, self.media_dir / candidate)
            except OSError as exc:
                raise IoFailure(f"could not store media file: {exc}") from exc
        return candidate

    def media_path(self, ref: str) -> Path:
        rec.validate_media_ref(ref)
        return self.media_dir / ref

    def list_media(self) -> list[str]:
        out = []
        for p in sorted(self.media_dir.rglob("*")):
            if p.is_file() and not p.name.endswith(".tmp"):
                out.append(p.relative_to(self.media_dir).as_posix())
        return out

    # -- integrity ----------------------------------------------------

    def state_digest(self) -> str:
        """SHA-256 over the canonical serialization of every table."""
        with self._mutex:
            doc = {t: _serialize_table(self._state, t) for t in TABLES}
        blob = json.dumps(doc, sort_keys=True, ensure_ascii=False).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    @property
    def generation(self) -> int:
        return self._generation

    @property
    def schema_version(self) -> int:
        return SCHEMA_VERSION


def _read_json(path: Path, table: str) -> dict:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CorruptTable(f"table {table!r}: cannot read {path.name}: {exc}", table=table)
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptTable(f"table {table!r}: {path.name} is not valid JSON: {exc}", table=table)
    if not isinstance(doc, dict):
        raise CorruptTable(f"table {table!r}: {path.name} is not a JSON object", table=table)
    return doc


def _load_records(doc: dict, table: str, builder) -> list:
    out = []
    raw_records = doc.get("records")
    if not isinstance(raw_records, list):
        raise CorruptTable(f"table {table!r}: missing records array", table=table)
    for i, raw in enumerate(raw_records):
        try:
            out.append(builder(raw))
        except CorruptTable:
            raise
        except Exception as exc:
            raise CorruptTable(
                f"table {table!r}: record {i} is malformed: {exc}", table=table, record=i
            )
    return out


def _load_dir(root: Path) -> tuple[int, dict[str, str], rec.StoreState]:
    current = _read_json(root / CURRENT_NAME, "_current")
    version = current.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"store schema version {version!r} is not supported (expected {SCHEMA_VERSION})"
        )
    generation = int(current.get("generation", 0))
    table_files = current.get("tables", {})
    missing = [t for t in TABLES if t not in table_files]
    if missing:
        raise CorruptTable(
            f"table {missing[0]!r}: not referenced by {CURRENT_NAME}", table=missing[0]
        )

    docs = {t: _read_json(root / "tables" / table_files[t], t) for t in TABLES}
    state = rec.StoreState()

    for b in _load_records(docs["beacons"], "beacons", rec.BeaconRecord.from_dict):
        if b.beacon_id in state.beacons:
            raise CorruptTable(
                f"table 'beacons': duplicate id {b.beacon_id}", table="beacons",
                record_id=b.beacon_id,
            )
        state.beacons[b.beacon_id] = b
    for s in _load_records(docs["instruments"], "instruments", rec.InstrumentStock.from_dict):
        if s.instrument_id in state.instruments:
            raise CorruptTable(
                f"table 'instruments': duplicate id {s.instrument_id}", table="instruments",
                record_id=s.instrument_id,
            )
        state.instruments[s.instrument_id] = s

    details_by_lending: dict[int, list[rec.LendingDetail]] = {}

    def detail_builder(raw: dict) -> rec.LendingDetail:
        d = rec.LendingDetail.from_dict(raw)
        details_by_lending.setdefault(int(raw["lending_id"]), []).append(d)
        return d

    _load_records(docs["lending_details"], "lending_details", detail_builder)
    for raw in docs["lendings"].get("records", []):
        try:
            lid = int(raw["lending_id"])
            details = sorted(details_by_lending.pop(lid, []), key=lambda d: d.detail_id)
            lending = rec.LendingRecord.from_dict(raw, details)
        except CorruptTable:
            raise
        except Exception as exc:
            raise CorruptTable(f"table 'lendings': malformed record: {exc}", table="lendings")
        if lending.lending_id in state.lendings:
            raise CorruptTable(
                f"table 'lendings': duplicate id {lending.lending_id}", table="lendings",
                record_id=lending.lending_id,
            )
        state.lendings[lending.lending_id] = lending
    if details_by_lending:
        orphan = sorted(details_by_lending)[0]
        raise CorruptTable(
            f"table 'lending_details': details reference unknown lending {orphan}",
            table="lending_details", record_id=orphan,
        )

    for e in _load_records(docs["catalog"], "catalog", rec.CatalogEntry.from_dict):
        state.catalog[e.instrument_name.casefold()] = e
    for t in _load_records(docs["job_templates"], "job_templates", rec.JobTemplate.from_dict):
        state.job_templates[t.job_type.casefold()] = t
    state.recycle = _load_records(docs["recycle"], "recycle", rec.RecycleEntry.from_dict)

    for table in ("beacons", "instruments", "lendings", "lending_details"):
        raw_next = docs[table].get("next_id")
        if not isinstance(raw_next, int) or raw_next < 1:
            raise CorruptTable(f"table {table!r}: missing or bad next_id", table=table)
        state.next_ids[table] = raw_next

    rec.validate_state(state)
    return generation, dict(table_files), state


def open_store(root_dir: str | os.PathLike, *, durable: bool = True) -> Store:
    """Open (or initialize) the store directory and validate all tables."""
    root = Path(root_dir)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise Inaccessible(f"cannot create store directory {root}: {exc}")

    store = Store(root, durable=durable)
    flock = FileLock(str(root / ".lock"))
    try:
        flock.acquire(timeout=0)
    except Timeout:
        raise Inaccessible(f"store directory {root} is locked by another process")
    except OSError as exc:
        raise Inaccessible(f"cannot lock store directory {root}: {exc}")
    store._flock = flock

    try:
        if not store.current_path.exists():
            leftovers = [
                p.name for p in root.iterdir() if p.name not in (".lock", "tables", "media")
            ]
            if leftovers or any((root / d).exists() and any((root / d).iterdir())
                                for d in ("tables", "media")):
                raise Inaccessible(
                    f"{root} is not empty and carries no {CURRENT_NAME}; refusing to initialize"
                )
            store.tables_dir.mkdir(exist_ok=True)
            store.media_dir.mkdir(exist_ok=True)
            store._commit(TABLES)
        else:
            store.tables_dir.mkdir(exist_ok=True)
            store.media_dir.mkdir(exist_ok=True)
            store._generation, store._table_files, store._state = _load_dir(root)
            store._sweep_orphans()
    except BaseException:
        store.close()
        raise
    return store
