"""Backup archives: create, verify, restore, upload.

A backup is a tar.gz holding a MANIFEST.json, the CURRENT pointer, one
JSON document per table and every managed media file. The manifest
records a SHA-256 digest per archived file; creation re-reads the
finished archive against the manifest before reporting success, and
restore verifies every digest before touching the target directory.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import shutil
import tarfile
import time
from datetime import datetime, timezone
from pathlib import Path

import httpx

from . import store as store_mod
from .errors import (
    BadArchive,
    DigestMismatch,
    IoFailure,
    NetworkUnreachable,
    NoBackupUrl,
    RemoteRejected,
    TargetNotEmpty,
)
from .store import Store

BACKUP_URL_ENV = "SURVSTORE_BACKUP_URL"
MANIFEST_NAME = "MANIFEST.json"
DIGEST_HEADER = "X-Content-SHA256"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _archive_members(store: Store) -> dict[str, bytes]:
    """Snapshot the live state as archive member name -> bytes."""
    with store.locked() as state:
        gen = store.generation
        table_files = {
            t: f"{t}.{gen:08d}.json" for t in store_mod.TABLES
        }
        members: dict[str, bytes] = {}
        for table, fname in table_files.items():
            doc = store_mod._serialize_table(state, table)
            members[f"tables/{fname}"] = store_mod._table_bytes(doc)
        current_doc = {
            "schema_version": store.schema_version,
            "generation": gen,
            "tables": table_files,
        }
        members[store_mod.CURRENT_NAME] = store_mod._table_bytes(current_doc)
        counts = {
            "beacons": len(state.beacons),
            "instruments": len(state.instruments),
            "lendings": len(state.lendings),
            "lending_details": sum(len(l.details) for l in state.lendings.values()),
            "catalog": len(state.catalog),
            "job_templates": len(state.job_templates),
            "recycle": len(state.recycle),
        }
        media_refs = store.list_media()
        for ref in media_refs:
            try:
                members[f"media/{ref}"] = (store.media_dir / ref).read_bytes()
            except OSError as exc:
                raise IoFailure(f"cannot read media file {ref!r}: {exc}") from exc
    counts["media"] = len(media_refs)
    manifest = {
        "kind": "survstore-backup",
        "schema_version": store.schema_version,
        "generation": gen,
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "counts": counts,
        "files": {name: {"sha256": _sha256(data), "size": len(data)}
                  for name, data in members.items()},
    }
    members[MANIFEST_NAME] = (
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    ).encode("utf-8")
    return members


def create_backup(store: Store, out_path: str | os.PathLike) -> Path:
    """Write a verified backup archive of the store to ``out_path``."""
    out = Path(out_path)
    if out.is_dir():
        stamp = time.strftime("%Y%m%d-%H%M%S")
        out = out / f"survstore-backup-{stamp}.tar.gz"
    out.parent.mkdir(parents=True, exist_ok=True)

    members = _archive_members(store)
    tmp = out.with_name(out.name + ".tmp")
    try:
        with tarfile.open(tmp, "w:gz") as tar:
            for name in sorted(members):
                info = tarfile.TarInfo(name)
                info.size = len(members[name])
                info.mtime = int(time.time())
                tar.addfile(info, io.BytesIO(members[name]))
        with open(tmp, "rb") as fh:
            os.fsync(fh.fileno())
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise IoFailure(f"cannot write backup archive: {exc}") from exc

    # Verify pass: re-read the finished archive before calling it done.
    try:
        read_back = _read_archive(tmp)
        _verify_members(read_back)
    except Exception:
        tmp.unlink(missing_ok=True)
        raise
    expected = {n: _sha256(b) for n, b in members.items()}
    actual = {n: _sha256(b) for n, b in read_back.items()}
    if expected != actual:
        tmp.unlink(missing_ok=True)
        raise DigestMismatch("archive read-back does not match what was written")

    os.replace(tmp, out)
    return out


def _read_archive(path: str | os.PathLike) -> dict[str, bytes]:
    members: dict[str, bytes] = {}
    try:
        with tarfile.open(path, "r:gz") as tar:
            for info in tar:
                if not info.isfile():
                    raise BadArchive(f"archive member {info.name!r} is not a regular file")
                name = info.name
                parts = Path(name).parts
                if Path(name).is_absolute() or ".." in parts or not parts:
                    raise BadArchive(f"archive member {info.name!r} has an unsafe path")
                fh = tar.extractfile(info)
                if fh is None:
                    raise BadArchive(f"archive member {info.name!r} cannot be read")
                members[name] = fh.read()
    except (tarfile.TarError, EOFError, OSError) as exc:
        raise BadArchive(f"cannot read backup archive: {exc}") from exc
    return members


def _verify_members(members: dict[str, bytes]) -> dict:
    if MANIFEST_NAME not in members:
        raise BadArchive(f"archive has no {MANIFEST_NAME}")
    try:
        manifest = json.loads(members[MANIFEST_NAME].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadArchive(f"{MANIFEST_NAME} is not valid JSON: {exc}") from exc
    if manifest.get("kind") != "survstore-backup":
        raise BadArchive("archive manifest is not a backup manifest")
    files = manifest.get("files")
    if not isinstance(files, dict):
        raise BadArchive("archive manifest lists no files")
    listed = set(files)
    present = set(members) - {MANIFEST_NAME}
    if listed != present:
        missing = sorted(listed - present)
        extra = sorted(present - listed)
        raise BadArchive(
            f"archive members do not match manifest (missing={missing}, extra={extra})"
        )
    for name, meta in files.items():
        digest = _sha256(members[name])
        if digest != meta.get("sha256"):
            raise DigestMismatch(
                f"archive member {name!r} digest mismatch", member=name,
                expected=meta.get("sha256"), actual=digest,
            )
    return manifest


def restore_backup(
    archive_path: str | os.PathLike,
    target_dir: str | os.PathLike,
    *,
    overwrite: bool = False,
) -> Path:
    """Rebuild a store directory from a backup archive.

    Every digest is checked before the target is touched. A non-empty
    target is refused unless ``overwrite`` is set.
    """
    target = Path(target_dir)
    members = _read_archive(archive_path)
    _verify_members(members)

    if target.exists() and any(target.iterdir()):
        if not overwrite:
            raise TargetNotEmpty(f"target directory {target} is not empty")

    staging = target.parent / (target.name + ".restore-tmp")
    if staging.exists():
        shutil.rmtree(staging)
    try:
        staging.mkdir(parents=True)
        (staging / "tables").mkdir()
        (staging / "media").mkdir()
        for name, data in members.items():
            if name == MANIFEST_NAME:
                continue
            dest = staging / name
            dest.parent.mkdir(parents=True, exist_ok=True)
            dest.write_bytes(data)
        if target.exists():
            shutil.rmtree(target)
        os.rename(staging, target)
    except OSError as exc:
        shutil.rmtree(staging, ignore_errors=True)
        raise IoFailure(f"cannot restore into {target}: {exc}") from exc
    return target


def upload_backup(
    archive_path: str | os.PathLike,
    url: str | None = None,
    *,
    client: httpx.Client | None = None,
) -> dict:
    """PUT the archive to the configured backup endpoint.

    The upload counts as accepted only when the server answers 2xx and
    echoes the archive's SHA-256 digest back (header or JSON body).
    """
    url = url or os.environ.get(BACKUP_URL_ENV)
    if not url:
        raise NoBackupUrl(
            f"no backup URL given and {BACKUP_URL_ENV} is not set"
        )
    path = Path(archive_path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read archive {path}: {exc}") from exc
    digest = _sha256(data)

    own_client = client is None
    client = client or httpx.Client(timeout=30.0)
    try:
        response = client.put(
            url,
            content=data,
            headers={
                "Content-Type": "application/gzip",
                DIGEST_HEADER: digest,
                "X-Backup-Filename": path.name,
            },
        )
    except httpx.HTTPError as exc:
        raise NetworkUnreachable(f"backup upload failed: {exc}") from exc
    finally:
        if own_client:
            client.close()

    if response.status_code < 200 or response.status_code >= 300:
        raise RemoteRejected(
            f"backup endpoint answered {response.status_code}",
            status=response.status_code,
        )
    echoed = response.headers.get(DIGEST_HEADER)
    if echoed is None:
        try:
            echoed = response.json().get("sha256")
        except Exception:
            echoed = None
    if echoed != digest:
        raise RemoteRejected(
            "backup endpoint did not confirm the archive digest",
            expected=digest, echoed=echoed,
        )
    return {"url": url, "sha256": digest, "size": len(data), "status": response.status_code}
