from __future__ import annotations

import random
from datetime import date, datetime, timezone

import pytest

from survstore import lending
from survstore.errors import (
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

from conftest import seed_stock


def at(day: int, hour: int = 9) -> datetime:
    return datetime(2024, 5, day, hour, tzinfo=timezone.utc)


def lend(store, name="Ama Mensah", items=None, **kw):
    items = items or [("Total Station", 2, ["TS-011", "TS-014"])]
    return lending.create_lending(store, name, items, **kw)


class TestStock:
    def test_upsert_creates_and_updates(self, store):
        created = lending.upsert_instrument(store, "Theodolite", 3)
        assert (created.total, created.lent, created.faulty) == (3, 0, 0)
        updated = lending.upsert_instrument(store, "theodolite", 5, faulty=1)
        assert updated.instrument_id == created.instrument_id
        assert (updated.total, updated.faulty, updated.remaining) == (5, 1, 4)

    def test_description_survives_count_updates(self, store):
        lending.upsert_instrument(store, "Theodolite", 3, description="1-second")
        updated = lending.upsert_instrument(store, "Theodolite", 4)
        assert updated.description == "1-second"

    def test_negative_counts_rejected(self, store):
        with pytest.raises(NegativeCount):
            lending.upsert_instrument(store, "Theodolite", -1)
        with pytest.raises(NegativeCount):
            lending.upsert_instrument(store, "Theodolite", 3, faulty=-2)

    def test_faulty_beyond_total_rejected(self, store):
        with pytest.raises(WouldBreakConservation):
            lending.upsert_instrument(store, "Theodolite", 2, faulty=3)

    def test_cannot_shrink_total_below_open_loans(self, store):
        seed_stock(store)
        lend(store, items=[("Total Station", 4, [])])
        with pytest.raises(WouldBreakConservation):
            lending.upsert_instrument(store, "Total Station", 3)
        # Shrinking to exactly the open count is allowed.
        ok = lending.upsert_instrument(store, "Total Station", 4)
        assert ok.remaining == 0

    def test_availability_snapshot(self, store):
        seed_stock(store)
        lend(store)
        snapshot = {r["instrument_name"]: r for r in lending.availability_snapshot(store)}
        assert snapshot["Total Station"] == {
            "instrument_name": "Total Station",
            "total": 6, "lent": 2, "faulty": 0, "remaining": 4,
        }
        assert snapshot["Steel Tape 50m"]["remaining"] == 10


class TestCreate:
    def test_moves_stock_and_records_lines(self, store):
        seed_stock(store)
        rec_ = lend(store, items=[("Total Station", 2, ["TS-011", "TS-014"]),
                                  ("Steel Tape 50m", 1, [])])
        assert rec_.lending_id == 1
        assert rec_.total_instru == 3
        assert [d.instrument_name for d in rec_.details] == [
            "Total Station", "Steel Tape 50m",
        ]
        assert lending.get_stock(store, "Total Station").lent == 2
        assert lending.get_stock(store, "Steel Tape 50m").lent == 1

    def test_insufficient_stock_carries_counts(self, store):
        seed_stock(store)
        with pytest.raises(InsufficientStock) as err:
            lend(store, items=[("GPS Receiver", 5, [])])
        assert err.value.details["requested"] == 5
        assert err.value.details["remaining"] == 4

    def test_faulty_units_are_not_lendable(self, store):
        seed_stock(store)  # Steel Tape 50m: total 12, faulty 2
        with pytest.raises(InsufficientStock):
            lend(store, items=[("Steel Tape 50m", 11, [])])
        lend(store, items=[("Steel Tape 50m", 10, [])])

    def test_all_lines_checked_before_any_stock_moves(self, store):
        seed_stock(store)
        with pytest.raises(InsufficientStock):
            lend(store, items=[("Total Station", 1, []), ("GPS Receiver", 99, [])])
        assert lending.get_stock(store, "Total Station").lent == 0

    def test_duplicate_line_rejected(self, store):
        seed_stock(store)
        with pytest.raises(InvalidRecord):
            lend(store, items=[("Total Station", 1, []), ("total station", 1, [])])

    def test_unknown_instrument(self, store):
        seed_stock(store)
        with pytest.raises(UnknownInstrument):
            lend(store, items=[("Plumb Bob", 1, [])])

    def test_empty_lines_rejected(self, store):
        seed_stock(store)
        with pytest.raises(EmptyDetails):
            lending.create_lending(store, "Ama Mensah", [])

    def test_blank_borrower_rejected(self, store):
        seed_stock(store)
        with pytest.raises(InvalidRecord):
            lend(store, name="  ")

    def test_zero_quantity_rejected(self, store):
        seed_stock(store)
        with pytest.raises(NegativeCount):
            lend(store, items=[("Total Station", 0, [])])


class TestReturn:
    def test_return_restores_stock_and_issues_note(self, store):
        seed_stock(store)
        rec_ = lend(store, when=at(2))
        returned, note = lending.return_lending(store, rec_.lending_id, when=at(9))
        assert returned.is_returned
        assert returned.return_date == at(9)
        assert lending.get_stock(store, "Total Station").lent == 0
        text = note.render_text()
        assert "RETURN NOTE" in text
        assert "   2 x Total Station" in text
        assert "Ama Mensah" in text

    def test_double_return_rejected(self, store):
        seed_stock(store)
        rec_ = lend(store)
        lending.return_lending(store, rec_.lending_id)
        with pytest.raises(AlreadyReturned):
            lending.return_lending(store, rec_.lending_id)

    def test_return_before_lending_date_rejected(self, store):
        seed_stock(store)
        rec_ = lend(store, when=at(9))
        with pytest.raises(InvalidRecord):
            lending.return_lending(store, rec_.lending_id, when=at(2))
        assert lending.get_stock(store, "Total Station").lent == 2

    def test_return_missing_lending(self, store):
        with pytest.raises(NotFound):
            lending.return_lending(store, 404)

    def test_naive_lending_date_is_taken_as_utc(self, store):
        seed_stock(store)
        rec_ = lend(store, when=datetime(2024, 5, 2, 9))
        assert rec_.date == at(2)
        returned, _ = lending.return_lending(store, rec_.lending_id)
        assert returned.is_returned

    def test_naive_return_date_is_taken_as_utc(self, store):
        seed_stock(store)
        rec_ = lend(store, when=at(2))
        returned, _ = lending.return_lending(
            store, rec_.lending_id, when=datetime(2024, 5, 9, 9)
        )
        assert returned.return_date == at(9)


class TestRecycleBin:
    def test_open_lending_cannot_be_deleted(self, store):
        seed_stock(store)
        rec_ = lend(store)
        with pytest.raises(WouldBreakConservation):
            lending.soft_delete_lending(store, rec_.lending_id)

    def test_delete_restore_cycle(self, store):
        seed_stock(store)
        rec_ = lend(store)
        lending.return_lending(store, rec_.lending_id)
        lending.soft_delete_lending(store, rec_.lending_id)

        with pytest.raises(Deleted):
            lending.get_lending(store, rec_.lending_id)
        assert lending.get_lending(store, rec_.lending_id, include_deleted=True).deleted
        assert [l.lending_id for l in lending.list_lendings(store)] == []

        bin_rows = lending.list_recycle_bin(store)
        assert [(r["kind"], r["record_id"], r["label"]) for r in bin_rows] == [
            ("lending", rec_.lending_id, "Ama Mensah"),
        ]

        restored = lending.restore_lending(store, rec_.lending_id)
        assert not restored.deleted
        assert lending.list_recycle_bin(store) == []
        assert [l.lending_id for l in lending.list_lendings(store)] == [rec_.lending_id]

    def test_delete_twice_rejected(self, store):
        seed_stock(store)
        rec_ = lend(store)
        lending.return_lending(store, rec_.lending_id)
        lending.soft_delete_lending(store, rec_.lending_id)
        with pytest.raises(AlreadyDeleted):
            lending.soft_delete_lending(store, rec_.lending_id)

    def test_restore_requires_deletion(self, store):
        seed_stock(store)
        rec_ = lend(store)
        with pytest.raises(NotDeleted):
            lending.restore_lending(store, rec_.lending_id)

    def test_deleted_lending_cannot_be_returned_again(self, store):
        seed_stock(store)
        rec_ = lend(store)
        lending.return_lending(store, rec_.lending_id)
        lending.soft_delete_lending(store, rec_.lending_id)
        with pytest.raises(Deleted):
            lending.return_lending(store, rec_.lending_id)


class TestListingAndSearch:
    def fill(self, store):
        seed_stock(store)
        first = lend(store, "Ama Mensah", [("Total Station", 1, ["TS-011"])], when=at(2))
        second = lend(store, "Kofi Boateng", [("Automatic Level", 2, [])],
                      when=at(3), person_department="Geomatic",
                      person_phone="0244000000")
        third = lend(store, "Esi Arthur", [("GPS Receiver", 1, [])],
                     when=at(3, hour=15), remarks="field camp")
        return first, second, third

    def test_list_orders_newest_first(self, store):
        first, second, third = self.fill(store)
        got = [l.lending_id for l in lending.list_lendings(store)]
        assert got == [third.lending_id, second.lending_id, first.lending_id]

    def test_only_open_filter(self, store):
        first, second, third = self.fill(store)
        lending.return_lending(store, second.lending_id)
        got = [l.lending_id for l in lending.list_lendings(store, only_open=True)]
        assert got == [third.lending_id, first.lending_id]

    def test_search_by_borrower_serial_and_remarks(self, store):
        first, second, third = self.fill(store)
        assert [l.lending_id for l in lending.search_transactions(store, "kofi")] == [
            second.lending_id
        ]
        assert [l.lending_id for l in lending.search_transactions(store, "ts-011")] == [
            first.lending_id
        ]
        assert [l.lending_id for l in lending.search_transactions(store, "field camp")] == [
            third.lending_id
        ]
        assert lending.search_transactions(store, "   ") == []

    def test_search_skips_deleted_by_default(self, store):
        first, _, _ = self.fill(store)
        lending.return_lending(store, first.lending_id)
        lending.soft_delete_lending(store, first.lending_id)
        assert lending.search_transactions(store, "Ama") == []
        got = lending.search_transactions(store, "Ama", include_deleted=True)
        assert [l.lending_id for l in got] == [first.lending_id]


class TestDailySeries:
    def test_zero_filled_and_counted(self, store):
        seed_stock(store)
        a = lend(store, when=at(2))
        lend(store, "Kofi", [("Automatic Level", 3, [])], when=at(2, hour=16))
        lending.return_lending(store, a.lending_id, when=at(4))
        series = lending.daily_series(store, date(2024, 5, 1), date(2024, 5, 5))
        assert [r["date"] for r in series] == [
            "2024-05-01", "2024-05-02", "2024-05-03", "2024-05-04", "2024-05-05",
        ]
        assert series[0] == {"date": "2024-05-01", "lendings": 0,
                             "instruments": 0, "returns": 0}
        assert series[1] == {"date": "2024-05-02", "lendings": 2,
                             "instruments": 5, "returns": 0}
        assert series[3]["returns"] == 1

    def test_deleted_lendings_do_not_count(self, store):
        seed_stock(store)
        a = lend(store, when=at(2))
        lending.return_lending(store, a.lending_id, when=at(2, hour=17))
        lending.soft_delete_lending(store, a.lending_id)
        series = lending.daily_series(store, date(2024, 5, 2), date(2024, 5, 2))
        assert series[0]["lendings"] == 0
        assert series[0]["returns"] == 0

    def test_reversed_range_rejected(self, store):
        with pytest.raises(InvalidRange):
            lending.daily_series(store, date(2024, 5, 5), date(2024, 5, 1))

    def test_oversized_range_rejected(self, store):
        with pytest.raises(InvalidRange):
            lending.daily_series(store, date(2020, 1, 1), date(2026, 1, 1))


class TestConservation:
    def test_audit_reports_clean_books(self, store):
        seed_stock(store)
        lend(store)
        audit = lending.audit_conservation(store)
        assert audit["ok"]
        row = next(r for r in audit["instruments"]
                   if r["instrument_name"] == "Total Station")
        assert row == {"instrument_name": "Total Station", "lent_recorded": 2,
                       "lent_expected": 2, "remaining": 4, "ok": True}

    def test_random_operation_storm_conserves_stock(self, store):
        seed_stock(store)
        rng = random.Random(42)
        names = ["Total Station", "Automatic Level", "Steel Tape 50m", "GPS Receiver"]
        open_ids, returned_ids, deleted_ids = [], [], []
        for _ in range(400):
            roll = rng.random()
            if roll < 0.45:
                items = [(rng.choice(names), rng.randint(1, 3), [])]
                try:
                    rec_ = lending.create_lending(store, "Storm Tester", items)
                    open_ids.append(rec_.lending_id)
                except InsufficientStock:
                    pass
            elif roll < 0.75 and open_ids:
                lid = open_ids.pop(rng.randrange(len(open_ids)))
                lending.return_lending(store, lid)
                returned_ids.append(lid)
            elif roll < 0.9 and returned_ids:
                lid = returned_ids.pop(rng.randrange(len(returned_ids)))
                lending.soft_delete_lending(store, lid)
                deleted_ids.append(lid)
            elif deleted_ids:
                lid = deleted_ids.pop(rng.randrange(len(deleted_ids)))
                lending.restore_lending(store, lid)
                returned_ids.append(lid)
            audit = lending.audit_conservation(store)
            assert audit["ok"], audit
