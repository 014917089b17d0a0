"""Plane coordinate geometry on the projected grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import CoincidentPoints, DegenerateEdge, InvalidCoordinate, TooFewVertices
from ..units import Angle, Bearing, normalize_bearing


@dataclass(frozen=True)
class GridPoint:
    """A point in the projected grid, metres. Elevation is optional."""

    easting: float
    northing: float
    elevation: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.easting) and math.isfinite(self.northing)):
            raise InvalidCoordinate(
                f"easting/northing must be finite, got ({self.easting!r}, {self.northing!r})"
            )
        if self.elevation is not None and not math.isfinite(self.elevation):
            raise InvalidCoordinate(f"elevation must be finite, got {self.elevation!r}")


@dataclass(frozen=True)
class Join:
    """Bearing and horizontal distance between two coordinated points."""

    bearing: Bearing
    distance: float


def join(from_point: GridPoint, to_point: GridPoint) -> Join:
    """Whole-circle bearing and distance from one point to another.

    Bearing is measured clockwise from grid north, hence atan2 of the
    easting difference over the northing difference.
    """
    de = to_point.easting - from_point.easting
    dn = to_point.northing - from_point.northing
    distance = math.hypot(de, dn)
    if distance == 0.0:
        raise CoincidentPoints("points have zero horizontal separation")
    return Join(bearing=normalize_bearing(Angle(math.atan2(de, dn))), distance=distance)


def polygon_area(vertices: list[GridPoint]) -> float:
    """Area enclosed by a ring of grid points, in square metres.

    Shoelace formula with cyclic closure; the result is the absolute
    value, so vertex orientation does not matter. Self-intersecting
    rings are not detected.
    """
    n = len(vertices)
    if n < 3:
        raise TooFewVertices(f"polygon needs at least 3 vertices, got {n}")
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        if a.easting == b.easting and a.northing == b.northing:
            raise DegenerateEdge(f"consecutive vertices {i} and {(i + 1) % n} coincide")
    acc = 0.0
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        acc += a.easting * b.northing - b.easting * a.northing
    return abs(acc) / 2.0
