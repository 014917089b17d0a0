from __future__ import annotations

from dataclasses import replace
from datetime import date, datetime

import pytest

from survstore.compute.geometry import GridPoint
from survstore.errors import BadPhotoPath, CorruptTable
from survstore.records import (
    BeaconRecord,
    CatalogEntry,
    InstrumentStock,
    JobTemplate,
    LendingDetail,
    LendingRecord,
    RecycleEntry,
    ReturnNote,
    StoreState,
    validate_media_ref,
    validate_state,
)

LENT_AT = datetime(2024, 3, 4, 9, 30)


def valid_state() -> StoreState:
    state = StoreState()
    state.beacons[1] = BeaconRecord(
        beacon_id=1,
        beacon_name="Campus GM 1",
        position=GridPoint(easting=652300.0, northing=738200.0, elevation=261.5),
        description="concrete pillar",
        revision_surveyor="K. Owusu",
        revision_date=date(2023, 11, 2),
        marked=True,
    )
    state.instruments[1] = InstrumentStock(1, "Total Station", total=6, lent=2)
    state.lendings[1] = LendingRecord(
        lending_id=1,
        date=LENT_AT,
        person_name="Ama Mensah",
        person_department="Geomatic",
        total_instru=2,
        details=[LendingDetail(1, "Total Station", 2, serials=["TS-011", "TS-014"])],
    )
    state.catalog["total station"] = CatalogEntry(
        "Total Station", description="reflectorless", room="Store B", shelf="3"
    )
    state.job_templates["topographic survey"] = JobTemplate(
        "Topographic Survey", [("Total Station", 1)]
    )
    state.next_ids = {
        "beacons": 2,
        "instruments": 2,
        "lendings": 2,
        "lending_details": 2,
    }
    return state


class TestMediaRefs:
    @pytest.mark.parametrize("ref", [
        "photo.jpg",
        "beacons/gm1.png",
        "a/b/c.dat",
        "file with spaces.jpg",
    ])
    def test_accepts_relative_refs(self, ref):
        assert validate_media_ref(ref) == ref

    @pytest.mark.parametrize("ref", [
        "",
        "   ",
        "/etc/passwd",
        "a/../b.jpg",
        "./a.jpg",
        "a//b.jpg",
        "a\\b.jpg",
        "c:stream.jpg",
        "trailing/",
    ])
    def test_rejects_escaping_refs(self, ref):
        with pytest.raises(BadPhotoPath):
            validate_media_ref(ref)

    def test_rejects_non_string(self):
        with pytest.raises(BadPhotoPath):
            validate_media_ref(None)  # type: ignore[arg-type]


class TestRoundTrips:
    def test_beacon(self):
        b = valid_state().beacons[1]
        assert BeaconRecord.from_dict(b.to_dict()) == b
        bare = BeaconRecord(2, "B2", GridPoint(1.0, 2.0))
        assert BeaconRecord.from_dict(bare.to_dict()) == bare

    def test_instrument_stock(self):
        s = InstrumentStock(3, "Steel Tape 50m", total=12, lent=4, faulty=2,
                            description="two under repair")
        assert InstrumentStock.from_dict(s.to_dict()) == s
        assert s.remaining == 6

    def test_lending_with_details(self):
        rec = valid_state().lendings[1]
        doc = rec.to_dict()
        details = [LendingDetail.from_dict(d.to_dict(rec.lending_id)) for d in rec.details]
        assert LendingRecord.from_dict(doc, details) == rec
        assert doc["date"] == LENT_AT.isoformat()

    def test_detail_dict_carries_lending_fk(self):
        d = LendingDetail(7, "Automatic Level", 3)
        assert d.to_dict(12)["lending_id"] == 12

    def test_catalog_entry(self):
        e = CatalogEntry("GPS Receiver", room="Store A", shelf="1",
                         media_refs=["gps/front.jpg"])
        assert CatalogEntry.from_dict(e.to_dict()) == e

    def test_job_template(self):
        t = JobTemplate("Cadastral Survey", [("Total Station", 1), ("Steel Tape 50m", 2)])
        assert JobTemplate.from_dict(t.to_dict()) == t

    def test_recycle_entry(self):
        e = RecycleEntry("lending", 5, datetime(2024, 6, 1, 8, 0))
        assert RecycleEntry.from_dict(e.to_dict()) == e


class TestReturnNote:
    def test_render_layout(self):
        note = ReturnNote(
            lending_id=9,
            issued_at=datetime(2024, 5, 2, 14, 0),
            person_name="Kofi Boateng",
            lines=[("Total Station", 1), ("Steel Tape 50m", 2)],
            remarks="one tape kinked",
        )
        text = note.render_text()
        assert text.startswith("RETURN NOTE\n===========\n")
        assert "Lending:   #9" in text
        assert "   1 x Total Station" in text
        assert "   2 x Steel Tape 50m" in text
        assert text.endswith("Remarks: one tape kinked\n")

    def test_render_without_remarks(self):
        note = ReturnNote(1, datetime(2024, 5, 2), "A", [("Level", 1)])
        assert "Remarks" not in note.render_text()


class TestStoreState:
    def test_take_id_advances(self):
        state = StoreState()
        assert state.take_id("beacons") == 1
        assert state.take_id("beacons") == 2
        assert state.next_ids["beacons"] == 3

    def test_lookup_by_name_is_casefolded(self):
        state = valid_state()
        assert state.instrument_by_name("  TOTAL station ").instrument_id == 1
        assert state.beacon_by_name("campus gm 1").beacon_id == 1
        assert state.instrument_by_name("Theodolite") is None


def expect_corrupt(state: StoreState, table: str, fragment: str) -> None:
    with pytest.raises(CorruptTable) as err:
        validate_state(state)
    assert err.value.details.get("table") == table
    assert fragment in str(err.value)


class TestValidateState:
    def test_valid_state_passes(self):
        validate_state(valid_state())

    def test_empty_state_passes(self):
        validate_state(StoreState())

    def test_beacon_key_mismatch(self):
        state = valid_state()
        state.beacons[9] = state.beacons.pop(1)
        expect_corrupt(state, "beacons", "does not match record id")

    def test_beacon_empty_name(self):
        state = valid_state()
        state.beacons[1] = replace(state.beacons[1], beacon_name="  ")
        expect_corrupt(state, "beacons", "empty name")

    def test_beacon_non_finite_position(self):
        state = valid_state()
        pos = GridPoint.__new__(GridPoint)
        object.__setattr__(pos, "easting", float("nan"))
        object.__setattr__(pos, "northing", 0.0)
        object.__setattr__(pos, "elevation", None)
        state.beacons[1] = replace(state.beacons[1], position=pos)
        expect_corrupt(state, "beacons", "non-finite")

    def test_duplicate_beacon_name_casefold(self):
        state = valid_state()
        state.beacons[2] = replace(state.beacons[1], beacon_id=2, beacon_name="campus gm 1")
        state.next_ids["beacons"] = 3
        expect_corrupt(state, "beacons", "duplicate beacon name")

    def test_beacon_bad_photo_ref(self):
        state = valid_state()
        state.beacons[1] = replace(state.beacons[1], photo_ref="../escape.jpg")
        expect_corrupt(state, "beacons", "photo reference")

    def test_beacon_id_beyond_next_id(self):
        state = valid_state()
        state.next_ids["beacons"] = 1
        expect_corrupt(state, "beacons", "not below next_id")

    def test_stock_negative_remaining(self):
        state = valid_state()
        state.instruments[1] = replace(state.instruments[1], faulty=5)
        expect_corrupt(state, "instruments", "breaks conservation")

    def test_lending_without_details(self):
        state = valid_state()
        state.lendings[1] = replace(state.lendings[1], details=[])
        expect_corrupt(state, "lendings", "no detail lines")

    def test_lending_total_mismatch(self):
        state = valid_state()
        state.lendings[1] = replace(state.lendings[1], total_instru=5)
        expect_corrupt(state, "lendings", "total_instru")

    def test_returned_without_date(self):
        state = valid_state()
        state.lendings[1] = replace(state.lendings[1], is_returned=True)
        state.instruments[1] = replace(state.instruments[1], lent=0)
        expect_corrupt(state, "lendings", "without a date")

    def test_returned_before_lent(self):
        state = valid_state()
        state.lendings[1] = replace(
            state.lendings[1], is_returned=True, return_date=datetime(2024, 3, 3)
        )
        state.instruments[1] = replace(state.instruments[1], lent=0)
        expect_corrupt(state, "lendings", "before it was lent")

    def test_duplicate_detail_id(self):
        state = valid_state()
        rec = state.lendings[1]
        state.lendings[1] = replace(
            rec,
            details=rec.details + [LendingDetail(1, "Total Station", 1)],
            total_instru=3,
        )
        expect_corrupt(state, "lending_details", "duplicate detail id")

    def test_detail_quantity_floor(self):
        state = valid_state()
        state.lendings[1] = replace(
            state.lendings[1], details=[LendingDetail(1, "Total Station", 0)], total_instru=0
        )
        expect_corrupt(state, "lending_details", ">= 1")

    def test_detail_unknown_instrument(self):
        state = valid_state()
        state.lendings[1] = replace(
            state.lendings[1], details=[LendingDetail(1, "Plumb Bob", 2)]
        )
        expect_corrupt(state, "lending_details", "unknown instrument")

    def test_deleted_lending_must_be_returned(self):
        state = valid_state()
        state.lendings[1] = replace(state.lendings[1], deleted=True)
        state.recycle.append(RecycleEntry("lending", 1, datetime(2024, 3, 5)))
        expect_corrupt(state, "lendings", "still out")

    def test_lent_count_must_match_open_loans(self):
        state = valid_state()
        state.instruments[1] = replace(state.instruments[1], lent=1)
        expect_corrupt(state, "instruments", "out on loan")

    def test_lent_nonzero_with_no_open_loans(self):
        state = valid_state()
        state.lendings[1] = replace(
            state.lendings[1], is_returned=True, return_date=datetime(2024, 3, 5)
        )
        expect_corrupt(state, "instruments", "out on loan")

    def test_catalog_key_mismatch(self):
        state = valid_state()
        state.catalog["theodolite"] = state.catalog.pop("total station")
        expect_corrupt(state, "catalog", "does not match")

    def test_catalog_empty_room(self):
        state = valid_state()
        state.catalog["total station"] = replace(state.catalog["total station"], room=" ")
        expect_corrupt(state, "catalog", "empty room")

    def test_catalog_bad_media_ref(self):
        state = valid_state()
        state.catalog["total station"] = replace(
            state.catalog["total station"], media_refs=["/abs.jpg"]
        )
        expect_corrupt(state, "catalog", "relative")

    def test_template_requires_instruments(self):
        state = valid_state()
        state.job_templates["topographic survey"] = JobTemplate("Topographic Survey", [])
        expect_corrupt(state, "job_templates", "requires no instruments")

    def test_template_quantity_floor(self):
        state = valid_state()
        state.job_templates["topographic survey"] = JobTemplate(
            "Topographic Survey", [("Total Station", 0)]
        )
        expect_corrupt(state, "job_templates", ">= 1")

    def test_recycle_unknown_kind(self):
        state = valid_state()
        state.recycle.append(RecycleEntry("instrument", 1, datetime(2024, 1, 1)))
        expect_corrupt(state, "recycle", "unknown kind")

    def test_recycle_entry_without_deleted_flag(self):
        state = valid_state()
        state.recycle.append(RecycleEntry("beacon", 1, datetime(2024, 1, 1)))
        expect_corrupt(state, "recycle", "not flagged deleted")

    def test_deleted_record_needs_recycle_entry(self):
        state = valid_state()
        state.beacons[1] = replace(state.beacons[1], deleted=True)
        expect_corrupt(state, "recycle", "no recycle-bin entry")

    def test_recycle_duplicate_entry(self):
        state = valid_state()
        state.beacons[1] = replace(state.beacons[1], deleted=True)
        state.recycle.extend([
            RecycleEntry("beacon", 1, datetime(2024, 1, 1)),
            RecycleEntry("beacon", 1, datetime(2024, 1, 2)),
        ])
        expect_corrupt(state, "recycle", "duplicate entry")
