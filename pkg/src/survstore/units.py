"""Angles, bearings, length and area units.

Angles are held in radians internally; degrees and DMS appear only at
the IO boundary. Bearings are whole-circle, clockwise from grid north,
normalized to [0, 360) degrees.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .errors import AngleOutOfRange, MalformedAngle, NegativeArea, NonFiniteAngle

TWO_PI = 2.0 * math.pi

# Exact by definition of the international foot.
METRES_PER_FOOT = 0.3048


@dataclass(frozen=True)
class Angle:
    """A plane angle, canonical unit radians."""

    radians: float

    def __post_init__(self):
        if not math.isfinite(self.radians):
            raise NonFiniteAngle(f"angle must be finite, got {self.radians!r}")

    @classmethod
    def from_degrees(cls, degrees: float) -> "Angle":
        return cls(math.radians(degrees))

    @property
    def degrees(self) -> float:
        return math.degrees(self.radians)

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.radians + other.radians)

    def __sub__(self, other: "Angle") -> "Angle":
        return Angle(self.radians - other.radians)


@dataclass(frozen=True)
class Bearing:
    """Whole-circle bearing, clockwise from grid north, in [0, 360)."""

    angle: Angle

    def __post_init__(self):
        if not 0.0 <= self.angle.radians < TWO_PI:
            raise MalformedAngle(
                f"bearing must lie in [0, 360) degrees, got {self.angle.degrees!r}"
            )

    @property
    def radians(self) -> float:
        return self.angle.radians

    @property
    def degrees(self) -> float:
        return self.angle.degrees

    def dms(self, seconds_decimals: int = 0) -> str:
        return format_dms(self.angle, seconds_decimals)


class LengthUnit(Enum):
    METRE = "m"
    INTERNATIONAL_FOOT = "ft"


class AreaUnit(Enum):
    SQUARE_METRE = "m2"
    HECTARE = "ha"
    ACRE = "acre"
    SQUARE_FOOT = "ft2"


# Square metres per unit. The acre is the international acre,
# 43560 international square feet.
_AREA_IN_M2 = {
    AreaUnit.SQUARE_METRE: 1.0,
    AreaUnit.HECTARE: 10_000.0,
    AreaUnit.ACRE: 43_560.0 * METRES_PER_FOOT * METRES_PER_FOOT,
    AreaUnit.SQUARE_FOOT: METRES_PER_FOOT * METRES_PER_FOOT,
}

# Accepted DMS syntax: unicode markers or ASCII d/m/s fallbacks, e.g.
# 30°15'36.5"  30d15m36.5s  30°15'  30d  -5°30'
_DMS_RE = re.compile(
    r"""^\s*(?P<sign>[+-])?\s*
        (?P<deg>\d+(?:\.\d+)?)\s*(?:°|º|[dD])\s*
        (?:(?P<min>\d+(?:\.\d+)?)\s*(?:'|’|′|[mM])\s*
        (?:(?P<sec>\d+(?:\.\d+)?)\s*(?:"|”|″|[sS]))?\s*)?$""",
    re.VERBOSE,
)

_DECIMAL_RE = re.compile(r"^\s*[+-]?(\d+(\.\d+)?|\.\d+)\s*$")


def parse_angle(text: str) -> Angle:
    """Parse decimal degrees ("12.5") or DMS ("12°30'00\"", "12d30m00s")."""
    if not isinstance(text, str):
        raise MalformedAngle(f"angle must be a string, got {type(text).__name__}")
    if _DECIMAL_RE.match(text):
        return Angle.from_degrees(float(text))
    m = _DMS_RE.match(text)
    if not m:
        raise MalformedAngle(f"unrecognized angle syntax: {text!r}")
    deg = float(m.group("deg"))
    minutes = m.group("min")
    seconds = m.group("sec")
    if minutes is not None and "." in m.group("deg"):
        raise MalformedAngle(f"fractional degrees may not carry minutes: {text!r}")
    if seconds is not None and "." in minutes:
        raise MalformedAngle(f"fractional minutes may not carry seconds: {text!r}")
    value = deg
    if minutes is not None:
        mv = float(minutes)
        if not 0.0 <= mv < 60.0:
            raise AngleOutOfRange(f"minutes must lie in [0, 60): {text!r}")
        value += mv / 60.0
        if seconds is not None:
            sv = float(seconds)
            if not 0.0 <= sv < 60.0:
                raise AngleOutOfRange(f"seconds must lie in [0, 60): {text!r}")
            value += sv / 3600.0
    if m.group("sign") == "-":
        value = -value
    return Angle.from_degrees(value)


def format_dms(a: Angle, seconds_decimals: int = 0) -> str:
    """Render an angle as D°MM'SS" with the given seconds precision."""
    if seconds_decimals < 0:
        raise ValueError("seconds_decimals must be >= 0")
    total = a.degrees
    sign = "-" if total < 0 else ""
    total = abs(total)
    scale = 10 ** seconds_decimals
    # Work in integer units of the last displayed digit so the carry at
    # 60 seconds / 60 minutes is exact.
    ticks = round(total * 3600.0 * scale)
    sec_ticks = ticks % (60 * scale)
    minutes = (ticks // (60 * scale)) % 60
    degrees = ticks // (3600 * scale)
    seconds = sec_ticks / scale
    if seconds_decimals == 0:
        sec_str = f"{int(seconds):02d}"
    else:
        sec_str = f"{seconds:0{3 + seconds_decimals}.{seconds_decimals}f}"
    return f"{sign}{degrees}°{minutes:02d}'{sec_str}\""


def normalize_bearing(a: Angle) -> Bearing:
    """Reduce an angle to a whole-circle bearing in [0, 360)."""
    r = math.fmod(a.radians, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:  # fmod rounding can land exactly on 2*pi
        r = 0.0
    return Bearing(Angle(r))


def convert_length(value: float, from_unit: LengthUnit, to_unit: LengthUnit) -> float:
    if from_unit == to_unit:
        return float(value)
    if from_unit == LengthUnit.INTERNATIONAL_FOOT:
        return value * METRES_PER_FOOT
    return value / METRES_PER_FOOT


def convert_area(value: float, from_unit: AreaUnit, to_unit: AreaUnit) -> float:
    if not math.isfinite(value) or value < 0.0:
        raise NegativeArea(f"area must be finite and >= 0, got {value!r}")
    if from_unit == to_unit:
        return float(value)
    return value * _AREA_IN_M2[from_unit] / _AREA_IN_M2[to_unit]
