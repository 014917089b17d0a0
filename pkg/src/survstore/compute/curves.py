"""Horizontal circular curve setting-out.

Given the deflection angle between the tangents, the radius (or the arc
length) and the through chainage of the intersection point, computes
the standard setting-out quantities and a peg schedule with tangential
angles for setting out by theodolite and chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DeflectionOutOfRange, InconsistentRadiusLength, InvalidCurveInput
from ..units import Angle

# Both radius and arc length may be supplied; they must agree to 1 mm.
RADIUS_LENGTH_TOLERANCE_M = 0.001

# Chainage comparisons for peg generation.
_CH_EPS = 1e-9


@dataclass(frozen=True)
class CurveInput:
    deflection: Angle
    ip_chainage: float
    standard_chord: float
    radius: float | None = None
    curve_length: float | None = None

    def __post_init__(self):
        if not 0.0 < self.deflection.degrees < 180.0:
            raise DeflectionOutOfRange(
                f"deflection must lie in (0, 180) degrees, got {self.deflection.degrees!r}"
            )
        if self.radius is None and self.curve_length is None:
            raise InvalidCurveInput("supply the radius or the curve length")
        if self.radius is not None and (not math.isfinite(self.radius) or self.radius <= 0):
            raise InvalidCurveInput(f"radius must be > 0, got {self.radius!r}")
        if self.curve_length is not None and (
            not math.isfinite(self.curve_length) or self.curve_length <= 0
        ):
            raise InvalidCurveInput(f"curve length must be > 0, got {self.curve_length!r}")
        if not math.isfinite(self.ip_chainage):
            raise InvalidCurveInput(f"IP chainage must be finite, got {self.ip_chainage!r}")
        if not math.isfinite(self.standard_chord) or self.standard_chord <= 0:
            raise InvalidCurveInput(
                f"standard chord must be > 0, got {self.standard_chord!r}"
            )
        if self.radius is not None and self.curve_length is not None:
            implied = self.radius * self.deflection.radians
            if abs(implied - self.curve_length) > RADIUS_LENGTH_TOLERANCE_M:
                raise InconsistentRadiusLength(
                    "radius and curve length disagree: "
                    f"R*deflection = {implied:.4f} m but L = {self.curve_length:.4f} m"
                )


@dataclass(frozen=True)
class CurvePeg:
    name: str
    chainage: float
    chord: float
    tangential_angle: Angle
    cumulative_angle: Angle


@dataclass(frozen=True)
class CurveSolution:
    radius: float
    curve_length: float
    tangent_length: float
    external_distance: float
    mid_ordinate: float
    long_chord: float
    chainage_t1: float
    chainage_t2: float
    initial_subchord: float
    final_subchord: float
    pegs: list[CurvePeg]


def curve_solve(inp: CurveInput) -> CurveSolution:
    """Solve the curve and build the peg schedule.

    Pegs fall on whole multiples of the standard chord in through
    chainage (even-chainage convention), giving an initial sub-chord
    from the first tangent point and a final sub-chord to the second.
    Tangential angles use the arc-for-chord convention c / (2R).
    """
    delta = inp.deflection.radians
    if inp.radius is not None:
        radius = float(inp.radius)
        length = radius * delta
    else:
        length = float(inp.curve_length)  # type: ignore[arg-type]
        radius = length / delta
    half = delta / 2.0
    tangent = radius * math.tan(half)
    external = radius * (1.0 / math.cos(half) - 1.0)
    mid_ordinate = radius * (1.0 - math.cos(half))
    long_chord = 2.0 * radius * math.sin(half)
    t1 = inp.ip_chainage - tangent
    t2 = t1 + length

    c = inp.standard_chord
    # First peg: smallest whole multiple of c strictly beyond T1.
    k = math.floor(t1 / c) + 1
    while k * c <= t1 + _CH_EPS:
        k += 1
    chainages = []
    while k * c < t2 - _CH_EPS:
        chainages.append(k * c)
        k += 1
    chainages.append(t2)

    pegs: list[CurvePeg] = []
    prev = t1
    cumulative = 0.0
    for i, ch in enumerate(chainages):
        chord = ch - prev
        tangential = chord / (2.0 * radius)
        cumulative += tangential
        name = "T2" if i == len(chainages) - 1 else f"P{i + 1}"
        pegs.append(
            CurvePeg(
                name=name,
                chainage=ch,
                chord=chord,
                tangential_angle=Angle(tangential),
                cumulative_angle=Angle(cumulative),
            )
        )
        prev = ch

    return CurveSolution(
        radius=radius,
        curve_length=length,
        tangent_length=tangent,
        external_distance=external,
        mid_ordinate=mid_ordinate,
        long_chord=long_chord,
        chainage_t1=t1,
        chainage_t2=t2,
        initial_subchord=pegs[0].chord,
        final_subchord=pegs[-1].chord,
        pegs=pegs,
    )
