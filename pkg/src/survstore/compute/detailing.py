"""Detailing by rays: fixing new points from a total-station setup.

Each ray carries the horizontal circle reading, the vertical circle
reading as a zenith angle (0 = up, 90 degrees = horizontal), and the
measured slope distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import EmptyObservations, InvalidObservation, InvalidStationSetup
from ..units import Angle, Bearing, normalize_bearing
from .geometry import GridPoint


@dataclass(frozen=True)
class StationSetup:
    """Occupied station with its orientation to a reference direction."""

    station: GridPoint
    instrument_height: float
    reference_bearing: Bearing
    hcr_to_reference: Angle

    def __post_init__(self):
        if self.station.elevation is None:
            raise InvalidStationSetup("station must carry an elevation")
        if not math.isfinite(self.instrument_height) or self.instrument_height < 0:
            raise InvalidStationSetup(
                f"instrument height must be finite and >= 0, got {self.instrument_height!r}"
            )


@dataclass(frozen=True)
class RayObservation:
    point_name: str
    hcr: Angle
    vcr_zenith: Angle
    slope_distance: float
    target_height: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.slope_distance) or self.slope_distance <= 0:
            raise InvalidObservation(
                f"slope distance must be > 0, got {self.slope_distance!r}",
                point_name=self.point_name,
            )
        if not 0.0 < self.vcr_zenith.degrees < 180.0:
            raise InvalidObservation(
                f"zenith angle must lie in (0, 180) degrees, got {self.vcr_zenith.degrees!r}",
                point_name=self.point_name,
            )
        if not math.isfinite(self.target_height) or self.target_height < 0:
            raise InvalidObservation(
                f"target height must be finite and >= 0, got {self.target_height!r}",
                point_name=self.point_name,
            )


def detail_points(setup: StationSetup, observations: list[RayObservation]) -> list[GridPoint]:
    """Coordinate every observed ray from the given setup.

    The bearing of a ray is the reference bearing swung by the circle
    difference between the ray and the reference pointing. Horizontal
    distance comes from the slope distance reduced by the zenith angle;
    the height difference adds the instrument height and removes the
    target height.
    """
    if not observations:
        raise EmptyObservations("no observations supplied")
    station = setup.station
    points: list[GridPoint] = []
    for obs in observations:
        swing = obs.hcr - setup.hcr_to_reference
        beta = normalize_bearing(Angle(setup.reference_bearing.radians + swing.radians))
        h = obs.slope_distance * math.sin(obs.vcr_zenith.radians)
        dz = obs.slope_distance * math.cos(obs.vcr_zenith.radians)
        points.append(
            GridPoint(
                easting=station.easting + h * math.sin(beta.radians),
                northing=station.northing + h * math.cos(beta.radians),
                elevation=station.elevation + setup.instrument_height + dz - obs.target_height,
            )
        )
    return points
