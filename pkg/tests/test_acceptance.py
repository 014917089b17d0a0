"""Acceptance gate.

One test per acceptance criterion, each at its stated tolerance and
runtime budget. Every oracle here is computed independently of the code
under test (closed-form formulas, fan triangulation, telescoped sums)
or frozen from hand-checked arithmetic. A failure in this file means
the criterion is not met; do not loosen a tolerance to make it pass.
"""

from __future__ import annotations

import hashlib
import math
import random
import time
from dataclasses import replace

import pytest

from survstore import beacons, catalog, lending
from survstore.backup import create_backup, restore_backup
from survstore.compute.curves import CurveInput, curve_solve
from survstore.compute.detailing import RayObservation, StationSetup, detail_points
from survstore.compute.geometry import GridPoint, join, polygon_area
from survstore.compute.leveling import (
    LevelBook,
    LevelingMethod,
    LevelObservation,
    reduce_levels,
    verify_level_book,
)
from survstore.errors import IoFailure, SurvStoreError
from survstore.store import open_store
from survstore.units import Angle, LengthUnit, normalize_bearing

MM = 1e-3
ARCSECOND_DEG = 1.0 / 3600.0


def close(a: float, b: float, tol: float = 1e-9) -> bool:
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)


def bearing_diff_deg(a: float, b: float) -> float:
    """Smallest absolute angular separation of two bearings, degrees."""
    return abs(math.fmod(a - b + 540.0, 360.0) - 180.0)


class TestCurveOracleSuite:
    REFERENCE = {
        "tangent_length": 133.975,
        "curve_length": 261.799,
        "external_distance": 17.638,
        "mid_ordinate": 17.037,
        "long_chord": 258.819,
        "chainage_t1": 1866.025,
        "chainage_t2": 2127.824,
        "initial_subchord": 13.975,
        "final_subchord": 7.824,
    }

    def test_curve_oracle_suite(self):
        t0 = time.perf_counter()

        sol = curve_solve(CurveInput(
            deflection=Angle.from_degrees(30.0),
            ip_chainage=2000.0,
            standard_chord=20.0,
            radius=500.0,
        ))
        for field, expected in self.REFERENCE.items():
            got = getattr(sol, field)
            assert abs(got - expected) <= MM, f"{field}: {got} vs {expected}"
        full = next(p for p in sol.pegs if close(p.chord, 20.0))
        assert abs(full.tangential_angle.degrees
                   - (1 + 8 / 60 + 45 / 3600)) <= ARCSECOND_DEG
        assert abs(sol.pegs[-1].cumulative_angle.degrees - 15.0) <= ARCSECOND_DEG

        rng = random.Random(5021)
        for _ in range(200):
            delta = Angle.from_degrees(rng.uniform(1.0, 179.0))
            radius = rng.uniform(30.0, 2000.0)
            tangent = radius * math.tan(delta.radians / 2.0)
            sol = curve_solve(CurveInput(
                deflection=delta,
                ip_chainage=tangent + rng.uniform(10.0, 10_000.0),
                standard_chord=rng.uniform(2.0, 25.0),
                radius=radius,
            ))
            half = delta.radians / 2.0
            # The five closed-form identities.
            assert close(sol.external_distance,
                         sol.tangent_length * math.tan(delta.radians / 4.0))
            assert close(sol.mid_ordinate,
                         sol.external_distance * math.cos(half))
            assert close(sol.long_chord,
                         2.0 * sol.tangent_length * math.cos(half))
            assert close(sol.curve_length, radius * delta.radians)
            assert close(sol.chainage_t2 - sol.chainage_t1, sol.curve_length)
            # Peg schedule closes the curve: chords telescope to the arc
            # and the cumulative tangential angle reaches delta/2.
            assert close(sum(p.chord for p in sol.pegs), sol.curve_length)
            assert close(sol.pegs[-1].cumulative_angle.radians,
                         delta.radians / 2.0)

        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0, f"curve suite took {elapsed:.3f}s"


def random_level_rows(rng: random.Random) -> list[LevelObservation]:
    n = rng.randint(2, 12)
    reading = lambda: round(rng.uniform(0.105, 3.895), 3)
    rows = [LevelObservation("BM", backsight=reading())]
    for i in range(1, n - 1):
        if rng.random() < 0.3:
            rows.append(LevelObservation(f"CP{i}", backsight=reading(),
                                         foresight=reading()))
        else:
            rows.append(LevelObservation(f"P{i}", intersight=reading()))
    rows.append(LevelObservation("END", foresight=reading()))
    return rows


class TestLevelingEquivalence:
    def test_leveling_equivalence(self):
        t0 = time.perf_counter()
        rng = random.Random(1409)
        books = []
        for _ in range(500):
            rows = random_level_rows(rng)
            start_rl = round(rng.uniform(50.0, 500.0), 3)
            rf = reduce_levels(LevelingMethod.RISE_FALL, rows, start_rl)
            hc = reduce_levels(LevelingMethod.HEIGHT_OF_COLLIMATION, rows,
                               start_rl)
            for a, b in zip(rf.rows, hc.rows):
                assert abs(a.reduced_level - b.reduced_level) <= 1e-9
            assert rf.checks_pass and hc.checks_pass
            assert verify_level_book(rf) == []
            assert verify_level_book(hc) == []
            # The closing identity, checked directly at 1e-9.
            drop = rf.rows[-1].reduced_level - rf.rows[0].reduced_level
            assert abs((rf.sum_bs - rf.sum_fs) - drop) <= 1e-9
            assert abs((rf.sum_rise - rf.sum_fall) - drop) <= 1e-9
            books.append((rf, hc))

        # Any single perturbed reading in a completed book is caught.
        for rf, hc in books[:40]:
            for book in (rf, hc):
                for i, row in enumerate(book.rows):
                    for field in ("backsight", "intersight", "foresight"):
                        value = getattr(row, field)
                        if value is None:
                            continue
                        tampered = list(book.rows)
                        tampered[i] = replace(row, **{field: value + 0.013})
                        bad = LevelBook(
                            method=book.method, rows=tampered,
                            sum_bs=book.sum_bs, sum_fs=book.sum_fs,
                            sum_rise=book.sum_rise, sum_fall=book.sum_fall,
                            checks_pass=True, misclose=book.misclose,
                        )
                        assert verify_level_book(bad), (
                            f"perturbed {field} of row {i} went unnoticed")

        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0, f"leveling suite took {elapsed:.3f}s"


def random_convex_polygon(rng: random.Random) -> list[GridPoint]:
    """Vertices in angular order on a circle are in convex position."""
    n = rng.randint(3, 40)
    cx, cy = rng.uniform(500.0, 5000.0), rng.uniform(500.0, 5000.0)
    r = rng.uniform(20.0, 400.0)
    angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(n))
    if min(b - a for a, b in zip(angles, angles[1:])) < 1e-6:
        return random_convex_polygon(rng)  # degenerate spacing, redraw
    return [GridPoint(cx + r * math.cos(t), cy + r * math.sin(t))
            for t in angles]


def fan_area(vertices: list[GridPoint]) -> float:
    """Fan triangulation from vertex 0; valid for convex rings."""
    origin = vertices[0]
    total = 0.0
    for a, b in zip(vertices[1:], vertices[2:]):
        total += abs((a.easting - origin.easting) * (b.northing - origin.northing)
                     - (b.easting - origin.easting) * (a.northing - origin.northing))
    return total / 2.0


class TestAreaJoinOracles:
    def test_area_join_oracles(self):
        pentagon = [GridPoint(0, 0), GridPoint(6, 0), GridPoint(8, 4),
                    GridPoint(3, 7), GridPoint(-1, 3)]
        assert polygon_area(pentagon) == 42.0

        rng = random.Random(77)
        for _ in range(500):
            ring = random_convex_polygon(rng)
            got = polygon_area(ring)
            oracle = fan_area(ring)
            assert abs(got - oracle) <= 1e-6 * oracle

        for _ in range(1000):
            a = GridPoint(rng.uniform(-1e5, 1e5), rng.uniform(-1e5, 1e5))
            b = GridPoint(rng.uniform(-1e5, 1e5), rng.uniform(-1e5, 1e5))
            fwd, rev = join(a, b), join(b, a)
            assert fwd.distance == rev.distance
            assert bearing_diff_deg(fwd.bearing.degrees,
                                    rev.bearing.degrees + 180.0) <= 1e-9


class TestDetailingClosure:
    def test_detailing_closure(self):
        rng = random.Random(4242)
        for _ in range(500):
            station = GridPoint(rng.uniform(1e3, 9e4), rng.uniform(1e3, 9e4),
                                rng.uniform(50.0, 400.0))
            setup = StationSetup(
                station=station,
                instrument_height=rng.uniform(1.2, 1.8),
                reference_bearing=normalize_bearing(
                    Angle.from_degrees(rng.uniform(0.0, 360.0))),
                hcr_to_reference=Angle.from_degrees(rng.uniform(0.0, 360.0)),
            )
            ray = RayObservation(
                point_name="D",
                hcr=Angle.from_degrees(rng.uniform(0.0, 360.0)),
                vcr_zenith=Angle.from_degrees(rng.uniform(10.0, 170.0)),
                slope_distance=rng.uniform(20.0, 1000.0),
                target_height=rng.uniform(0.0, 2.0),
            )
            point = detail_points(setup, [ray])[0]
            back = join(station, point)

            want_bearing = normalize_bearing(Angle(
                setup.reference_bearing.radians
                + (ray.hcr.radians - setup.hcr_to_reference.radians)))
            want_distance = ray.slope_distance * math.sin(ray.vcr_zenith.radians)
            assert bearing_diff_deg(back.bearing.degrees,
                                    want_bearing.degrees) <= 1e-9
            assert abs(back.distance - want_distance) <= 1e-9
            want_dz = ray.slope_distance * math.cos(ray.vcr_zenith.radians)
            got_dz = (point.elevation - station.elevation
                      - setup.instrument_height + ray.target_height)
            assert abs(got_dz - want_dz) <= 1e-9


STORM_STOCK = (("Total Station", 6), ("Automatic Level", 10),
               ("Steel Tape 50m", 12), ("GPS Receiver", 4))


class TestLedgerConservation:
    def test_ledger_conservation_storm(self, store):
        for name, total in STORM_STOCK:
            lending.upsert_instrument(store, name, total)
        names = [n for n, _ in STORM_STOCK]

        rng = random.Random(20240815)
        open_ids: list[int] = []
        returned_ids: list[int] = []
        deleted_ids: list[int] = []
        created, cap = 0, 300
        rejected = 0

        def remaining_of(name: str) -> int:
            row = next(r for r in lending.list_stock(store)
                       if r.instrument_name == name)
            return row.remaining

        def expect_rejected(fn) -> None:
            nonlocal rejected
            before = store.state_digest()
            with pytest.raises(SurvStoreError):
                fn()
            assert store.state_digest() == before
            rejected += 1

        t0 = time.perf_counter()
        for i in range(10_000):
            roll = rng.random()
            if roll < 0.10:
                # A deliberately invalid operation of a random kind.
                kind = rng.randrange(5)
                if kind == 0:
                    expect_rejected(lambda: lending.create_lending(
                        store, "S", [(rng.choice(names), 10_000, [])]))
                elif kind == 1 and returned_ids:
                    lid = rng.choice(returned_ids)
                    expect_rejected(lambda: lending.return_lending(store, lid))
                elif kind == 2 and open_ids:
                    lid = rng.choice(open_ids)
                    expect_rejected(
                        lambda: lending.soft_delete_lending(store, lid))
                elif kind == 3 and returned_ids:
                    lid = rng.choice(returned_ids)
                    expect_rejected(lambda: lending.restore_lending(store, lid))
                else:
                    expect_rejected(lambda: lending.upsert_instrument(
                        store, rng.choice(names), 2, faulty=5))
            elif roll < 0.32 and created < cap:
                name, qty = rng.choice(names), rng.randint(1, 4)
                if qty > remaining_of(name):
                    expect_rejected(lambda: lending.create_lending(
                        store, "S", [(name, qty, [])]))
                else:
                    record = lending.create_lending(store, "S", [(name, qty, [])])
                    open_ids.append(record.lending_id)
                    created += 1
            elif roll < 0.55 and open_ids:
                lid = open_ids.pop(rng.randrange(len(open_ids)))
                lending.return_lending(store, lid)
                returned_ids.append(lid)
            elif roll < 0.72 and returned_ids:
                lid = returned_ids.pop(rng.randrange(len(returned_ids)))
                lending.soft_delete_lending(store, lid)
                deleted_ids.append(lid)
            elif roll < 0.90 and deleted_ids:
                lid = deleted_ids.pop(rng.randrange(len(deleted_ids)))
                lending.restore_lending(store, lid)
                returned_ids.append(lid)
            else:
                name = rng.choice(names)
                row = next(r for r in lending.list_stock(store)
                           if r.instrument_name == name)
                faulty = rng.randint(0, 2)
                lending.upsert_instrument(
                    store, name, row.lent + faulty + rng.randint(1, 8),
                    faulty=faulty)

            for row in lending.list_stock(store):
                assert row.total == row.remaining + row.lent + row.faulty
            if i % 200 == 0:
                assert lending.audit_conservation(store)["ok"]

        assert lending.audit_conservation(store)["ok"]
        assert created == cap
        assert rejected > 500
        elapsed = time.perf_counter() - t0
        assert elapsed < 30.0, f"storm took {elapsed:.1f}s"


def mutate_randomly(store, rng: random.Random, tag: str) -> None:
    beacons.add_beacon(
        store, f"GM {tag}",
        rng.uniform(1e5, 9e5), rng.uniform(1e5, 9e5),
        rng.uniform(50, 400) if rng.random() < 0.7 else None,
        description="storm beacon", revision_surveyor="QA",
        marked=rng.random() < 0.5,
    )
    lending.upsert_instrument(store, f"Kit {tag}", rng.randint(1, 9))
    record = lending.create_lending(store, f"Borrower {tag}",
                                    [(f"Kit {tag}", 1, [f"sn-{tag}"])])
    if rng.random() < 0.5:
        lending.return_lending(store, record.lending_id)
    catalog.upsert_catalog_entry(store, f"Kit {tag}", room=f"Room {tag}")
    store.add_media(f"photo {tag}.jpg", rng.randbytes(64))


def media_digests(store) -> dict[str, str]:
    return {
        ref: hashlib.sha256(store.media_path(ref).read_bytes()).hexdigest()
        for ref in store.list_media()
    }


class TestPersistence:
    def test_persistence_suite(self, tmp_path):
        rng = random.Random(606)

        # Write/reopen equality over randomized mutation rounds.
        root = tmp_path / "a"
        store = open_store(root, durable=False)
        for round_no in range(8):
            mutate_randomly(store, rng, str(round_no))
            digest = store.state_digest()
            generation = store.generation
            store.close()
            store = open_store(root, durable=False)
            assert store.state_digest() == digest
            assert store.generation == generation

        # Backup -> restore is the identity, media bytes included.
        archive = create_backup(store, tmp_path / "out")
        restored_root = restore_backup(archive, tmp_path / "b")
        twin = open_store(restored_root, durable=False)
        assert twin.state_digest() == store.state_digest()
        assert media_digests(twin) == media_digests(store)
        twin.close()

        # Fault injection at every commit step reopens to the last
        # committed state.
        for step in ("write:beacons", "fsync:beacons", "write:current",
                     "fsync:current", "rename:current"):
            before = store.state_digest()
            generation = store.generation

            def tripwire(label, step=step):
                if label == step:
                    raise OSError(f"injected failure at {label}")

            store.failpoint = tripwire
            with pytest.raises(IoFailure):
                beacons.add_beacon(store, f"DOOMED {step}", 1.0, 2.0)
            store.failpoint = None
            assert store.state_digest() == before
            store.close()
            store = open_store(root, durable=False)
            assert store.state_digest() == before
            assert store.generation == generation
        store.close()


class TestFormatContracts:
    def test_format_contracts(self, store, app):
        rng = random.Random(31)
        originals = []
        for i in range(100):
            unit = LengthUnit.METRE if i % 2 == 0 else LengthUnit.INTERNATIONAL_FOOT
            record = beacons.add_beacon(
                store, f"GM {i}",
                rng.uniform(1e4, 9e5), rng.uniform(1e4, 9e5),
                rng.uniform(-50, 900) if rng.random() < 0.8 else None,
                description=f"round-trip {i}",
            )
            originals.append((record, unit))

        # CSV round-trips to 0.001 of the chosen unit.
        for unit in (LengthUnit.METRE, LengthUnit.INTERNATIONAL_FOOT):
            text = beacons.export_beacons_csv(store, unit=unit)
            twin_root = store.root.parent / f"csv-{unit.value}"
            twin = open_store(twin_root, durable=False)
            try:
                imported = beacons.import_beacons_csv(twin, text)
                assert len(imported) == 100
                by_name = {b.beacon_name: b for b in imported}
                factor = 1.0 if unit is LengthUnit.METRE else 1 / 0.3048
                for record, _ in originals:
                    got = by_name[record.beacon_name]
                    for field in ("easting", "northing", "elevation"):
                        want = getattr(record.position, field)
                        have = getattr(got.position, field)
                        if want is None:
                            assert have is None
                        else:
                            assert abs(have - want) * factor <= 1e-3
            finally:
                twin.close()

        # GeoJSON is structurally sound and counts the live beacons.
        doc = beacons.beacons_geojson(store)
        assert doc["type"] == "FeatureCollection"
        assert len(doc["features"]) == 100
        for feature in doc["features"]:
            assert feature["type"] == "Feature"
            geom = feature["geometry"]
            assert geom["type"] == "Point"
            assert len(geom["coordinates"]) == 2
            assert all(math.isfinite(c) for c in geom["coordinates"])
            assert feature["properties"]["name"]
        queried = beacons.beacons_geojson(store, query="GM 1")
        matches = beacons.search_beacons(store, "GM 1")
        assert len(queried["features"]) == len(matches)

        # Route-manifest parity, both directions.
        from test_manifest import (
            INFRASTRUCTURE_COMMANDS,
            INFRASTRUCTURE_ROUTES,
            api_routes,
            cli_leaves,
        )
        from survstore.manifest import MANIFEST

        live = api_routes(app)
        for op in MANIFEST:
            assert (op.method, op.path) in live, op.operation
            assert op.cli in cli_leaves(), op.operation
        assert live - {(op.method, op.path) for op in MANIFEST} \
            - INFRASTRUCTURE_ROUTES == set()
        assert cli_leaves() - {op.cli for op in MANIFEST} \
            - INFRASTRUCTURE_COMMANDS == set()
