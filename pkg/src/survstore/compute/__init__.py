"""Field computation routines: joins, areas, detailing by rays,
horizontal circular curve setting-out, and level reduction."""

from .geometry import GridPoint, Join, join, polygon_area
from .detailing import RayObservation, StationSetup, detail_points
from .curves import CurveInput, CurvePeg, CurveSolution, curve_solve
from .leveling import (
    LevelBook,
    LevelBookRow,
    LevelObservation,
    LevelingMethod,
    reduce_levels,
    verify_level_book,
)

__all__ = [
    "GridPoint",
    "Join",
    "join",
    "polygon_area",
    "StationSetup",
    "RayObservation",
    "detail_points",
    "CurveInput",
    "CurvePeg",
    "CurveSolution",
    "curve_solve",
    "LevelingMethod",
    "LevelObservation",
    "LevelBookRow",
    "LevelBook",
    "reduce_levels",
    "verify_level_book",
]
