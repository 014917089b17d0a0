from __future__ import annotations

import math
import random

import pytest

from survstore.compute import CurveInput, curve_solve
from survstore.errors import (
    DeflectionOutOfRange,
    InconsistentRadiusLength,
    InvalidCurveInput,
)
from survstore.units import Angle, format_dms

# Frozen closed-form oracle for the reference curve:
#   delta = 30 deg, R = 500 m, IP chainage 2000.000, standard chord 20 m
#   T  = R tan(delta/2)        = 133.97459621556135
#   L  = R delta               = 261.79938779914943
#   E  = R (sec(delta/2) - 1)  = 17.638090205041525
#   M  = R (1 - cos(delta/2))  = 17.037086855465855
#   LC = 2 R sin(delta/2)      = 258.8190451025207
#   T1 = 2000 - T              = 1866.0254037844386
#   T2 = T1 + L                = 2127.824791583588
#   full-chord delta = c/(2R)  = 0.02 rad = 1°08'45"
REF = CurveInput(
    deflection=Angle.from_degrees(30.0),
    ip_chainage=2000.0,
    standard_chord=20.0,
    radius=500.0,
)


@pytest.fixture(scope="module")
def solution():
    return curve_solve(REF)


class TestReferenceCurve:
    def test_setting_out_quantities(self, solution):
        assert solution.radius == 500.0
        assert solution.tangent_length == pytest.approx(133.97459621556135, abs=1e-9)
        assert solution.curve_length == pytest.approx(261.79938779914943, abs=1e-9)
        assert solution.external_distance == pytest.approx(17.638090205041525, abs=1e-9)
        assert solution.mid_ordinate == pytest.approx(17.037086855465855, abs=1e-9)
        assert solution.long_chord == pytest.approx(258.8190451025207, abs=1e-9)

    def test_tangent_point_chainages(self, solution):
        assert solution.chainage_t1 == pytest.approx(1866.0254037844386, abs=1e-9)
        assert solution.chainage_t2 == pytest.approx(2127.824791583588, abs=1e-9)

    def test_subchords(self, solution):
        assert solution.initial_subchord == pytest.approx(13.974596215561352, abs=1e-9)
        assert solution.final_subchord == pytest.approx(7.824791583587963, abs=1e-9)

    def test_peg_schedule_shape(self, solution):
        # Even 20 m chainages 1880..2120 inclusive, then T2.
        assert len(solution.pegs) == 14
        assert solution.pegs[0].chainage == pytest.approx(1880.0, abs=1e-9)
        assert solution.pegs[-2].chainage == pytest.approx(2120.0, abs=1e-9)
        assert solution.pegs[-1].chainage == pytest.approx(2127.824791583588, abs=1e-9)
        assert solution.pegs[-1].name == "T2"
        assert [p.name for p in solution.pegs[:3]] == ["P1", "P2", "P3"]

    def test_full_chord_tangential_angle(self, solution):
        full = solution.pegs[1]
        assert full.chord == pytest.approx(20.0, abs=1e-12)
        assert full.tangential_angle.radians == pytest.approx(0.02, abs=1e-12)
        assert format_dms(full.tangential_angle) == "1°08'45\""
        assert format_dms(full.tangential_angle, 1) == "1°08'45.3\""

    def test_cumulative_angle_closes_on_half_deflection(self, solution):
        final = solution.pegs[-1].cumulative_angle
        assert final.degrees == pytest.approx(15.0, abs=1e-9)
        assert format_dms(final) == "15°00'00\""

    def test_chords_sum_to_curve_length(self, solution):
        # Arc-definition chords: lengths along the arc sum to L.
        assert sum(p.chord for p in solution.pegs) == pytest.approx(
            solution.curve_length, abs=1e-9
        )

    def test_curve_length_input_equivalent(self, solution):
        by_length = curve_solve(CurveInput(
            deflection=Angle.from_degrees(30.0),
            ip_chainage=2000.0,
            standard_chord=20.0,
            curve_length=solution.curve_length,
        ))
        assert by_length.radius == pytest.approx(500.0, abs=1e-9)
        assert by_length.tangent_length == pytest.approx(
            solution.tangent_length, abs=1e-12
        )


class TestIdentities:
    """The five closed-form identities every solved curve satisfies."""

    def test_random_curves(self):
        rng = random.Random(1603)
        for _ in range(300):
            delta_deg = rng.uniform(1.0, 179.0)
            radius = rng.uniform(20.0, 5000.0)
            sol = curve_solve(CurveInput(
                deflection=Angle.from_degrees(delta_deg),
                ip_chainage=rng.uniform(0.0, 100_000.0),
                standard_chord=rng.uniform(5.0, 30.0),
                radius=radius,
            ))
            half = math.radians(delta_deg) / 2.0
            t, e = sol.tangent_length, sol.external_distance
            # 1. E = T tan(delta/4)
            assert e == pytest.approx(t * math.tan(half / 2.0), rel=1e-9)
            # 2. M = E cos(delta/2)
            assert sol.mid_ordinate == pytest.approx(e * math.cos(half), rel=1e-9)
            # 3. LC = 2 T cos(delta/2)
            assert sol.long_chord == pytest.approx(2.0 * t * math.cos(half), rel=1e-9)
            # 4. L = R delta
            assert sol.curve_length == pytest.approx(
                radius * math.radians(delta_deg), rel=1e-12
            )
            # 5. chainage closure: T2 - T1 = L
            assert sol.chainage_t2 - sol.chainage_t1 == pytest.approx(
                sol.curve_length, abs=1e-9
            )

    def test_cumulative_angles_monotone_and_close(self):
        rng = random.Random(99)
        for _ in range(100):
            delta_deg = rng.uniform(2.0, 120.0)
            sol = curve_solve(CurveInput(
                deflection=Angle.from_degrees(delta_deg),
                ip_chainage=rng.uniform(100.0, 10_000.0),
                standard_chord=rng.uniform(5.0, 25.0),
                radius=rng.uniform(50.0, 2000.0),
            ))
            cum = [p.cumulative_angle.radians for p in sol.pegs]
            assert all(b > a for a, b in zip(cum, cum[1:]))
            assert cum[-1] == pytest.approx(math.radians(delta_deg) / 2.0, abs=1e-9)
            assert sum(p.tangential_angle.radians for p in sol.pegs) == pytest.approx(
                cum[-1], abs=1e-9
            )


class TestPegEdgeCases:
    def test_t1_on_exact_chainage_multiple(self):
        # T = 100 exactly: T1 = 900, a multiple of the 20 m chord. The
        # first peg must fall at 920, not at T1 itself.
        delta = Angle(2.0 * math.atan(100.0 / 500.0))
        sol = curve_solve(CurveInput(
            deflection=delta, ip_chainage=1000.0, standard_chord=20.0, radius=500.0,
        ))
        assert sol.chainage_t1 == pytest.approx(900.0, abs=1e-9)
        assert sol.pegs[0].chainage == pytest.approx(920.0, abs=1e-9)
        assert sol.initial_subchord == pytest.approx(20.0, abs=1e-9)

    def test_curve_shorter_than_one_chord(self):
        # L ~ 2 m starting just past the 500 multiple: no interior peg
        # fits before T2, so only the T2 peg exists.
        tangent = 500.0 * math.tan(math.radians(0.2292) / 2.0)
        sol = curve_solve(CurveInput(
            deflection=Angle.from_degrees(0.2292), ip_chainage=500.5 + tangent,
            standard_chord=20.0, radius=500.0,
        ))
        assert sol.chainage_t1 == pytest.approx(500.5, abs=1e-9)
        assert len(sol.pegs) == 1
        assert sol.pegs[0].name == "T2"
        assert sol.pegs[0].chainage == pytest.approx(sol.chainage_t2, abs=1e-12)
        assert sol.initial_subchord == pytest.approx(sol.curve_length, abs=1e-9)
        assert sol.final_subchord == pytest.approx(sol.curve_length, abs=1e-9)

    def test_t2_never_duplicated_when_landing_on_multiple(self):
        # Build a curve whose T2 lands exactly on a chainage multiple:
        # T1 = 0 (IP = T), L = 200 with c = 20.
        radius = 200.0 / math.radians(30.0)
        sol = curve_solve(CurveInput(
            deflection=Angle.from_degrees(30.0),
            ip_chainage=radius * math.tan(math.radians(15.0)),
            standard_chord=20.0,
            radius=radius,
        ))
        assert sol.chainage_t1 == pytest.approx(0.0, abs=1e-9)
        assert sol.chainage_t2 == pytest.approx(200.0, abs=1e-9)
        chainages = [round(p.chainage, 6) for p in sol.pegs]
        assert len(chainages) == len(set(chainages))
        assert sol.pegs[-1].name == "T2"
        assert sol.pegs[-1].chainage == pytest.approx(200.0, abs=1e-9)


class TestValidation:
    @pytest.mark.parametrize("deg", [0.0, -10.0, 180.0, 359.0])
    def test_deflection_range(self, deg):
        with pytest.raises(DeflectionOutOfRange):
            CurveInput(deflection=Angle.from_degrees(deg), ip_chainage=100.0,
                       standard_chord=20.0, radius=500.0)

    def test_radius_or_length_required(self):
        with pytest.raises(InvalidCurveInput):
            CurveInput(deflection=Angle.from_degrees(30.0), ip_chainage=100.0,
                       standard_chord=20.0)

    def test_radius_length_consistency_within_millimetre(self):
        length = 500.0 * math.radians(30.0)
        CurveInput(deflection=Angle.from_degrees(30.0), ip_chainage=100.0,
                   standard_chord=20.0, radius=500.0, curve_length=length + 0.0009)
        with pytest.raises(InconsistentRadiusLength):
            CurveInput(deflection=Angle.from_degrees(30.0), ip_chainage=100.0,
                       standard_chord=20.0, radius=500.0, curve_length=length + 0.002)

    @pytest.mark.parametrize("kwargs", [
        {"radius": -500.0},
        {"radius": 0.0},
        {"curve_length": -1.0},
        {"radius": math.inf},
    ])
    def test_bad_geometry(self, kwargs):
        with pytest.raises(InvalidCurveInput):
            CurveInput(deflection=Angle.from_degrees(30.0), ip_chainage=100.0,
                       standard_chord=20.0, **kwargs)

    def test_bad_chord(self):
        with pytest.raises(InvalidCurveInput):
            CurveInput(deflection=Angle.from_degrees(30.0), ip_chainage=100.0,
                       standard_chord=0.0, radius=500.0)
