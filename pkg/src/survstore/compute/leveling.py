"""Differential leveling reduction.

Reduces a book of staff readings to reduced levels by either the
rise-and-fall method or the height-of-collimation method, and verifies
the finished table arithmetically.

Row shapes follow field practice: the book opens on a back-sight row,
interior rows are inter-sights or change points (fore-sight plus
back-sight), and a book of more than one row closes on a fore-sight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from ..errors import MalformedRow, NoBackSightFirst

# Tolerance for the arithmetic verification of a completed book.
CHECK_TOLERANCE_M = 1e-9


class LevelingMethod(Enum):
    RISE_FALL = "rise_fall"
    HEIGHT_OF_COLLIMATION = "height_of_collimation"


@dataclass(frozen=True)
class LevelObservation:
    """One field-book row: the staff readings taken at a point."""

    point: str = ""
    backsight: float | None = None
    intersight: float | None = None
    foresight: float | None = None
    remarks: str = ""


@dataclass(frozen=True)
class LevelBookRow:
    point: str
    backsight: float | None
    intersight: float | None
    foresight: float | None
    rise: float | None
    fall: float | None
    height_of_collimation: float | None
    reduced_level: float
    remarks: str = ""


@dataclass(frozen=True)
class LevelBook:
    method: LevelingMethod
    rows: list[LevelBookRow]
    sum_bs: float
    sum_fs: float
    sum_rise: float
    sum_fall: float
    checks_pass: bool
    misclose: float | None = None


def _row_shape(obs: LevelObservation, index: int, last_index: int) -> str:
    """Classify a row, enforcing shape and position rules."""
    has = (obs.backsight is not None, obs.intersight is not None, obs.foresight is not None)
    for name, reading in (
        ("back-sight", obs.backsight),
        ("inter-sight", obs.intersight),
        ("fore-sight", obs.foresight),
    ):
        if reading is not None and not math.isfinite(reading):
            raise MalformedRow(f"row {index}: {name} must be finite, got {reading!r}")
    if index == 0:
        if not has[0]:
            raise NoBackSightFirst("first row must carry a back-sight")
        if has[1] or has[2]:
            raise MalformedRow("first row must be a back-sight only")
        return "BS"
    if has == (False, True, False):
        if index == last_index and last_index > 0:
            raise MalformedRow(f"row {index}: book must close on a fore-sight")
        return "IS"
    if has == (False, False, True):
        if index != last_index:
            raise MalformedRow(
                f"row {index}: fore-sight-only row ends the book but more rows follow"
            )
        return "FS"
    if has == (True, False, True):
        if index == last_index:
            raise MalformedRow(f"row {index}: book must close on a fore-sight only")
        return "CP"
    raise MalformedRow(
        f"row {index}: needs exactly one of back-sight, inter-sight, fore-sight, "
        "or a change point's fore-sight plus back-sight"
    )


def reduce_levels(
    method: LevelingMethod,
    rows: list[LevelObservation],
    start_rl: float,
    closing_rl: float | None = None,
) -> LevelBook:
    """Reduce a level book from the first point's known reduced level.

    Both methods produce identical reduced levels; they differ only in
    the working columns carried in the book. The returned book has been
    re-verified arithmetically (``checks_pass``); if ``closing_rl`` is
    given, the misclose against it is reported but never adjusted.
    """
    if not rows:
        raise MalformedRow("level book has no rows")
    if not math.isfinite(start_rl):
        raise MalformedRow(f"starting reduced level must be finite, got {start_rl!r}")
    last = len(rows) - 1
    for i, obs in enumerate(rows):
        _row_shape(obs, i, last)

    rls = [start_rl]
    for i in range(1, len(rows)):
        prev, cur = rows[i - 1], rows[i]
        prev_reading = prev.backsight if prev.backsight is not None else prev.intersight
        cur_reading = cur.foresight if cur.foresight is not None else cur.intersight
        rls.append(rls[-1] + (prev_reading - cur_reading))  # type: ignore[operator]

    out: list[LevelBookRow] = []
    hpc = None
    for i, obs in enumerate(rows):
        rise = fall = collimation = None
        if method is LevelingMethod.RISE_FALL:
            if i > 0:
                diff = rls[i] - rls[i - 1]
                if diff >= 0:
                    rise = diff
                else:
                    fall = -diff
        else:
            # Collimation in effect after this row: a back-sight resets it.
            if obs.backsight is not None:
                hpc = rls[i] + obs.backsight
            collimation = hpc
        out.append(
            LevelBookRow(
                point=obs.point,
                backsight=obs.backsight,
                intersight=obs.intersight,
                foresight=obs.foresight,
                rise=rise,
                fall=fall,
                height_of_collimation=collimation,
                reduced_level=rls[i],
                remarks=obs.remarks,
            )
        )

    book = LevelBook(
        method=method,
        rows=out,
        sum_bs=sum(r.backsight for r in out if r.backsight is not None),
        sum_fs=sum(r.foresight for r in out if r.foresight is not None),
        sum_rise=sum(r.rise for r in out if r.rise is not None),
        sum_fall=sum(r.fall for r in out if r.fall is not None),
        checks_pass=True,
        misclose=None if closing_rl is None else rls[-1] - closing_rl,
    )
    discrepancies = verify_level_book(book)
    if discrepancies:
        book = LevelBook(
            method=book.method,
            rows=book.rows,
            sum_bs=book.sum_bs,
            sum_fs=book.sum_fs,
            sum_rise=book.sum_rise,
            sum_fall=book.sum_fall,
            checks_pass=False,
            misclose=book.misclose,
        )
    return book


def verify_level_book(book: LevelBook, tolerance: float = CHECK_TOLERANCE_M) -> list[str]:
    """Independently re-check the arithmetic of a completed book.

    Recomputes every working column from the raw readings, re-sums the
    columns, and checks the closing identities. Returns a list of
    discrepancy descriptions; an empty list means the book checks out.
    This guards a finished table: any single perturbed cell is caught.
    """
    problems: list[str] = []
    rows = book.rows
    if not rows:
        return ["book has no rows"]

    def off(a: float | None, b: float | None) -> bool:
        if a is None or b is None:
            return a is not b
        return abs(a - b) > tolerance

    hpc = None
    if book.method is LevelingMethod.HEIGHT_OF_COLLIMATION:
        if rows[0].backsight is None:
            problems.append("row 0: missing back-sight")
        elif off(rows[0].height_of_collimation, rows[0].reduced_level + rows[0].backsight):
            problems.append("row 0: collimation height disagrees with RL + BS")
        hpc = rows[0].height_of_collimation

    for i in range(1, len(rows)):
        prev, cur = rows[i - 1], rows[i]
        prev_reading = prev.backsight if prev.backsight is not None else prev.intersight
        cur_reading = cur.foresight if cur.foresight is not None else cur.intersight
        if prev_reading is None or cur_reading is None:
            problems.append(f"row {i}: missing reading")
            continue
        diff = prev_reading - cur_reading
        if book.method is LevelingMethod.RISE_FALL:
            stated = (cur.rise if cur.rise is not None else 0.0) - (
                cur.fall if cur.fall is not None else 0.0
            )
            if cur.rise is not None and cur.fall is not None:
                problems.append(f"row {i}: carries both a rise and a fall")
            if abs(stated - diff) > tolerance:
                problems.append(f"row {i}: rise/fall disagrees with the readings")
            if off(cur.reduced_level, prev.reduced_level + stated):
                problems.append(f"row {i}: RL does not carry the rise/fall forward")
        else:
            if hpc is None:
                problems.append(f"row {i}: no collimation height in effect")
            elif off(cur.reduced_level, hpc - cur_reading):
                problems.append(f"row {i}: RL disagrees with collimation minus reading")
            if cur.backsight is not None:
                if off(cur.height_of_collimation, cur.reduced_level + cur.backsight):
                    problems.append(f"row {i}: new collimation disagrees with RL + BS")
            elif off(cur.height_of_collimation, hpc):
                problems.append(f"row {i}: collimation changed without a back-sight")
            hpc = cur.height_of_collimation

    if off(book.sum_bs, sum(r.backsight for r in rows if r.backsight is not None)):
        problems.append("back-sight column sum is wrong")
    if off(book.sum_fs, sum(r.foresight for r in rows if r.foresight is not None)):
        problems.append("fore-sight column sum is wrong")
    if book.method is LevelingMethod.RISE_FALL:
        if off(book.sum_rise, sum(r.rise for r in rows if r.rise is not None)):
            problems.append("rise column sum is wrong")
        if off(book.sum_fall, sum(r.fall for r in rows if r.fall is not None)):
            problems.append("fall column sum is wrong")

    # Closing identities hold for any book that closes on a fore-sight;
    # a single back-sight-only row is trivially consistent.
    rl_diff = rows[-1].reduced_level - rows[0].reduced_level
    if len(rows) > 1:
        if abs((book.sum_bs - book.sum_fs) - rl_diff) > tolerance:
            problems.append("sum BS - sum FS does not equal last RL - first RL")
        if book.method is LevelingMethod.RISE_FALL:
            if abs((book.sum_rise - book.sum_fall) - rl_diff) > tolerance:
                problems.append("sum rise - sum fall does not equal last RL - first RL")
    return problems
