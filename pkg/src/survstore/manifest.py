"""Operation manifest: one row per public operation.

Each domain operation is reachable through exactly one HTTP endpoint
and one CLI subcommand; this table is the authoritative mapping and a
test checks it against the live FastAPI routes and the click command
tree. `serve` (process entry) and static/media GET serving are
infrastructure, not domain operations, so they are not listed.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class OpRoute:
    operation: str          # "module.function"
    method: str             # HTTP verb
    path: str               # FastAPI route path
    query: tuple[str, ...]  # required query params distinguishing the op
    cli: tuple[str, ...]    # click command path


MANIFEST: tuple[OpRoute, ...] = (
    OpRoute("beacons.add_beacon", "POST", "/api/beacons", (), ("beacon", "add")),
    OpRoute("beacons.list_beacons", "GET", "/api/beacons", (), ("beacon", "list")),
    OpRoute("beacons.search_beacons", "GET", "/api/beacons", ("q",), ("beacon", "search")),
    OpRoute("beacons.get_beacon", "GET", "/api/beacons/{beacon_id}", (), ("beacon", "show")),
    OpRoute("beacons.update_beacon", "PUT", "/api/beacons/{beacon_id}", (), ("beacon", "update")),
    OpRoute("beacons.delete_beacon", "DELETE", "/api/beacons/{beacon_id}", (),
            ("beacon", "delete")),
    OpRoute("beacons.restore_beacon", "POST", "/api/beacons/{beacon_id}/restore", (),
            ("beacon", "restore")),
    OpRoute("beacons.beacon_join", "GET", "/api/beacons/join", ("from", "to"),
            ("beacon", "join")),
    OpRoute("beacons.export_beacons_csv", "GET", "/api/beacons/export.csv", (),
            ("beacon", "export")),
    OpRoute("beacons.import_beacons_csv", "POST", "/api/beacons/import", (),
            ("beacon", "import")),
    OpRoute("beacons.beacons_geojson", "GET", "/api/beacons/geojson", (),
            ("beacon", "geojson")),

    OpRoute("compute.polygon_area", "POST", "/api/compute/area", (), ("compute", "area")),
    OpRoute("compute.join", "POST", "/api/compute/join", (), ("compute", "join")),
    OpRoute("compute.detail_points", "POST", "/api/compute/detailing", (),
            ("compute", "detailing")),
    OpRoute("compute.curve_solve", "POST", "/api/compute/curve", (), ("compute", "curve")),
    OpRoute("compute.reduce_levels", "POST", "/api/compute/levels", (),
            ("compute", "levels")),

    OpRoute("lending.create_lending", "POST", "/api/lendings", (), ("lend", "new")),
    OpRoute("lending.list_lendings", "GET", "/api/lendings", (), ("lend", "list")),
    OpRoute("lending.search_transactions", "GET", "/api/lendings", ("q",),
            ("lend", "search")),
    OpRoute("lending.get_lending", "GET", "/api/lendings/{lending_id}", (),
            ("lend", "show")),
    OpRoute("lending.return_lending", "POST", "/api/lendings/{lending_id}/return", (),
            ("lend", "return")),
    OpRoute("lending.soft_delete_lending", "DELETE", "/api/lendings/{lending_id}", (),
            ("lend", "delete")),
    OpRoute("lending.restore_lending", "POST", "/api/lendings/{lending_id}/restore", (),
            ("lend", "restore")),
    OpRoute("lending.list_recycle_bin", "GET", "/api/recycle-bin", (), ("recycle",)),
    OpRoute("lending.list_stock", "GET", "/api/instruments", (), ("stock", "list")),
    OpRoute("lending.upsert_instrument", "PUT", "/api/instruments", (),
            ("stock", "upsert")),
    OpRoute("lending.availability_snapshot", "GET", "/api/stats/availability", (),
            ("stats", "availability")),
    OpRoute("lending.daily_series", "GET", "/api/stats/daily", ("from", "to"),
            ("stats", "daily")),
    OpRoute("lending.audit_conservation", "GET", "/api/stats/conservation", (),
            ("stats", "conservation")),

    OpRoute("catalog.list_catalog", "GET", "/api/catalog", (), ("catalog", "list")),
    OpRoute("catalog.search_catalog", "GET", "/api/catalog", ("q",),
            ("catalog", "search")),
    OpRoute("catalog.upsert_catalog_entry", "PUT", "/api/catalog", (),
            ("catalog", "upsert")),
    OpRoute("catalog.import_catalog_csv", "POST", "/api/catalog/import", (),
            ("catalog", "import")),
    OpRoute("catalog.locate_instrument", "GET", "/api/catalog/locate", ("name",),
            ("catalog", "locate")),
    OpRoute("catalog.job_requirements", "GET", "/api/catalog/jobs/{job_type}", (),
            ("catalog", "job")),
    OpRoute("catalog.list_job_templates", "GET", "/api/catalog/jobs", (),
            ("catalog", "jobs")),
    OpRoute("catalog.upsert_job_template", "PUT", "/api/catalog/jobs/{job_type}", (),
            ("catalog", "job-set")),

    OpRoute("store.add_media", "PUT", "/api/media/{filename}", (), ("media", "put")),

    OpRoute("backup.create_backup", "POST", "/api/backup", (), ("backup", "create")),
    OpRoute("backup.restore_backup", "POST", "/api/backup/restore", (),
            ("backup", "restore")),
    OpRoute("backup.upload_backup", "POST", "/api/backup/upload", (),
            ("backup", "upload")),
)
