#!/usr/bin/env python3
"""Record API fixtures for the console contract tests.

Seeds a throwaway store, walks one deterministic clerk session against
the real service, and snapshots selected responses into
tests/fixtures/*.json. Re-run after changing seed data or response
shapes; the diffs show exactly what the console will see.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from survstore.service.app import create_app
from survstore.store import open_store

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

PNG_STUB = bytes.fromhex(
    "89504e470d0a1a0a0000000d49484452000000010000000108060000001f15c489"
    "0000000a49444154789c63000100000500010d0a2db40000000049454e44ae426082"
)


def record(name: str, payload) -> None:
    out = FIXTURES / f"{name}.json"
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out.relative_to(Path.cwd())}")


def expect(response, status: int):
    if response.status_code != status:
        sys.exit(f"{response.request.method} {response.request.url}: "
                 f"{response.status_code} != {status}: {response.text}")
    return response.json()


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        store = open_store(Path(tmp) / "data", durable=False)
        app = create_app(store)
        with TestClient(app) as client:
            run_session(client)
        store.close()


def run_session(client: TestClient) -> None:
    # Stock the shelves.
    for name, total, faulty, description in (
        ("Total Station", 6, 0, "reflectorless"),
        ("Automatic Level", 10, 0, ""),
        ("Steel Tape 50m", 12, 2, ""),
        ("GPS Receiver", 4, 0, "dual frequency"),
    ):
        expect(client.put("/api/instruments", json={
            "instrument_name": name, "total": total,
            "faulty": faulty, "description": description,
        }), 200)

    # Register beacons; GM 1 and GM 2 sit 100 m apart due east.
    beacon_ids = {}
    for name, easting, northing, elevation, marked in (
        ("GM 1", 1000.0, 2000.0, 51.129, False),
        ("GM 2", 1100.0, 2000.0, 50.877, False),
        ("GM 3", 1048.25, 2081.6, None, True),
    ):
        body = {"name": name, "easting": easting, "northing": northing,
                "elevation": elevation, "marked": marked,
                "revision_surveyor": "A. Owusu", "revision_date": "2025-01-20"}
        beacon_ids[name] = expect(client.post("/api/beacons", json=body), 201)["beacon_id"]

    ref = expect(client.put("/api/media/GM_1_face.png", content=PNG_STUB), 200)["ref"]
    expect(client.put(f"/api/beacons/{beacon_ids['GM 1']}",
                      json={"photo_ref": ref}), 200)

    record("beacons_m", expect(client.get("/api/beacons?unit=m"), 200))
    record("beacons_ft", expect(client.get("/api/beacons?unit=ft"), 200))
    record("geojson", expect(client.get("/api/beacons/geojson"), 200))
    record("join_gm1_gm2", expect(
        client.get("/api/beacons/join?from=GM 1&to=GM 2&unit=m"), 200))

    # Catalog locations and one job template.
    for name, description, room, shelf in (
        ("Total Station", "reflectorless", "Instrument Room", "S1"),
        ("Automatic Level", "", "Instrument Room", "S2"),
        ("Steel Tape 50m", "", "Field Store", "S4"),
        ("GPS Receiver", "dual frequency", "Instrument Room", "S3"),
    ):
        expect(client.put("/api/catalog", json={
            "instrument_name": name, "description": description,
            "room": room, "shelf": shelf,
        }), 200)
    expect(client.put("/api/catalog/jobs/road survey", json={"required": [
        {"instrument_name": "Total Station", "quantity": 1},
        {"instrument_name": "Steel Tape 50m", "quantity": 2},
        {"instrument_name": "GPS Receiver", "quantity": 5},
    ]}), 200)
    record("catalog", expect(client.get("/api/catalog"), 200))
    record("locate_total_station", expect(
        client.get("/api/catalog/locate?name=Total Station"), 200))
    record("job_templates", expect(client.get("/api/catalog/jobs"), 200))
    record("job_road_survey", expect(
        client.get("/api/catalog/jobs/road survey"), 200))

    # Two lendings on fixed dates; the second is returned then cycled
    # through the recycle bin.
    first = expect(client.post("/api/lendings", json={
        "person_name": "K. Mensah", "person_department": "Geomatic",
        "person_phone": "024 000 0000", "date": "2025-03-10T09:30:00",
        "items": [{"instrument_name": "Automatic Level", "quantity": 3}],
    }), 201)
    second = expect(client.post("/api/lendings", json={
        "person_name": "Y. Boateng", "person_department": "Geological",
        "date": "2025-03-11T14:00:00", "remarks": "practical session",
        "items": [
            {"instrument_name": "Total Station", "quantity": 1,
             "serials": ["ts-009"]},
            {"instrument_name": "Steel Tape 50m", "quantity": 2},
        ],
    }), 201)
    assert first["lending_id"] != second["lending_id"]

    record("return_second", expect(
        client.post(f"/api/lendings/{second['lending_id']}/return"), 200))
    record("availability", expect(client.get("/api/stats/availability"), 200))
    record("stock", expect(client.get("/api/instruments"), 200))
    record("daily", expect(
        client.get("/api/stats/daily?from=2025-03-09&to=2025-03-12"), 200))

    over = client.post("/api/lendings", json={
        "person_name": "T. Adu",
        "items": [{"instrument_name": "GPS Receiver", "quantity": 11}],
    })
    record("error_insufficient_stock",
           {"status": over.status_code, "body": expect_error(over, 409)})

    # Delete/restore cycle on the returned lending, snapshotting the
    # main list and the bin at every step.
    steps = {}
    steps["created"] = snapshot(client)
    expect(client.delete(f"/api/lendings/{second['lending_id']}"), 200)
    steps["deleted"] = snapshot(client)
    expect(client.post(f"/api/lendings/{second['lending_id']}/restore"), 200)
    steps["restored"] = snapshot(client)
    record("lending_cycle", {"lending_id": second["lending_id"], "steps": steps})

    # Computation answers the compute view renders.
    record("curve", expect(client.post("/api/compute/curve", json={
        "deflection": 30, "radius": 500,
        "ip_chainage": 2000.0, "standard_chord": 20,
    }), 200))
    record("area_m2", expect(client.post("/api/compute/area", json={
        "vertices": [[0, 0], [4, 0], [4, 3], [0, 3]], "unit": "m2",
    }), 200))
    record("area_ha", expect(client.post("/api/compute/area", json={
        "vertices": [[0, 0], [4, 0], [4, 3], [0, 3]], "unit": "ha",
    }), 200))
    record("levels", expect(client.post("/api/compute/levels", json={
        "method": "rise_fall", "start_rl": 100.0,
        "rows": [
            {"point": "A", "backsight": 1.502, "remarks": "BM A"},
            {"point": "B", "intersight": 1.322},
            {"point": "C", "foresight": 0.792, "remarks": "close"},
        ],
    }), 200))
    record("levels_hpc", expect(client.post("/api/compute/levels", json={
        "method": "height_of_collimation", "start_rl": 100.0,
        "rows": [
            {"point": "A", "backsight": 1.502, "remarks": "BM A"},
            {"point": "B", "intersight": 1.322},
            {"point": "C", "foresight": 0.792, "remarks": "close"},
        ],
    }), 200))
    record("detailing", expect(client.post("/api/compute/detailing", json={
        "station": {"easting": 1000.0, "northing": 2000.0, "elevation": 100.0},
        "instrument_height": 1.55,
        "reference_bearing": 60,
        "hcr_to_reference": 15,
        "observations": [
            {"point_name": "D1", "hcr": 75, "vcr_zenith": 90,
             "slope_distance": 120.0},
            {"point_name": "D2", "hcr": 135, "vcr_zenith": 85,
             "slope_distance": 96.25, "target_height": 1.4},
        ],
    }), 200))
    record("compute_join", expect(client.post("/api/compute/join", json={
        "from": [1000.0, 2000.0], "to": [1100.0, 2000.0], "unit": "m",
    }), 200))


def snapshot(client: TestClient) -> dict:
    return {
        "lendings": expect(client.get("/api/lendings"), 200),
        "recycle": expect(client.get("/api/recycle-bin"), 200),
    }


def expect_error(response, status: int):
    if response.status_code != status:
        sys.exit(f"expected {status}, got {response.status_code}: {response.text}")
    return response.json()


if __name__ == "__main__":
    main()
