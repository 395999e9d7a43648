"""Exact descriptions of the two strips.

Everything here is a direct formula; nothing samples the surface.  The
sampling-based counterparts live in :mod:`moebius.oracle`.

Threshold comparisons use the correctly rounded float ``SQRT2``: callers
who mean "delta = sqrt 2" pass ``math.sqrt(2)``, whose square is slightly
above 2, so comparing ``delta**2 <= 2`` would misclassify it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    INFINITE,
    TWO_PI,
    ParamPoint,
    Point3,
    RealizationKind,
    canonicalize,
    check_delta,
    eval_simple,
)
from .errors import DomainError, SingularPointError

SQRT2 = math.sqrt(2.0)


# --------------------------------------------------------------------------
# thresholds and the sets on the vertical line x = -1, y = 0
# --------------------------------------------------------------------------

def _two_c_sqrt(c: float) -> float:
    # 2 c sqrt(1 - c^2) with the difference of squares factored
    return 2.0 * c * math.sqrt((1.0 - c) * (1.0 + c))


def s_delta(delta: float) -> float:
    """Smallest |z| of a doubled point of the simple strip (1 when there is none)."""
    delta = check_delta(delta)
    if delta <= SQRT2:
        return 1.0
    if delta >= 2.0:
        return 0.0
    return _two_c_sqrt(delta / 2.0)


def sigma_delta(delta: float) -> float:
    """Half-height of the segment the simple strip cuts out of the vertical line."""
    delta = check_delta(delta, allow_infinite=True)
    if delta >= SQRT2:
        return 1.0
    return _two_c_sqrt(delta / 2.0)


@dataclass(frozen=True)
class SelfIntersectionSet:
    """``{(-1, 0, s): s_min <= |s| < 1}``; open at ``|s| = 1``."""

    s_min: float
    empty: bool
    upper_open: bool = True

    def contains(self, p) -> bool:
        x, y, z = p
        return (not self.empty and x == -1.0 and y == 0.0
                and self.s_min <= abs(z) < 1.0)


@dataclass(frozen=True)
class AxisSegment:
    """Closed segment ``{(-1, 0, z): |z| <= sigma}``."""

    sigma: float
    closed: bool = True

    def contains(self, p) -> bool:
        x, y, z = p
        return x == -1.0 and y == 0.0 and abs(z) <= self.sigma


def self_intersection_set(delta: float) -> SelfIntersectionSet:
    s = s_delta(delta)
    return SelfIntersectionSet(s_min=s, empty=(s == 1.0))


def axis_intersection(delta: float) -> AxisSegment:
    return AxisSegment(sigma=sigma_delta(check_delta(delta)))


def is_embedding(delta: float, kind: RealizationKind) -> bool:
    """Whether the map is injective (hence a homeomorphism onto its image)."""
    delta = check_delta(delta)
    kind = RealizationKind.parse(kind)
    if kind is RealizationKind.SIMPLE:
        return delta <= SQRT2
    return delta < 2.0


# --------------------------------------------------------------------------
# glued pairs of the simple map
# --------------------------------------------------------------------------

class GluedPair(NamedTuple):
    p1: ParamPoint
    p2: ParamPoint
    k: int
    image: Point3


def glued_partner(t1: float, k: int, delta: float) -> Optional[GluedPair]:
    """The point glued to ``(t1, -2 cos(t1/2))`` on branch ``k``, if it exists in the strip.

    Returns ``None`` when ``|sin t1|`` falls outside ``[s_delta, 1)`` or either
    width coordinate leaves ``[-delta, delta]``.
    """
    delta = check_delta(delta)
    if k not in (0, 1):
        raise DomainError(f"branch index must be 0 or 1, got {k}")
    if not (math.isfinite(t1) and 0.0 <= t1 < TWO_PI):
        raise DomainError(f"t1 must lie in [0, 2pi), got {t1}")
    sin_t1 = abs(math.sin(t1))
    if not (s_delta(delta) <= sin_t1 < 1.0):
        return None
    r1 = -2.0 * math.cos(t1 / 2)
    p2 = canonicalize((2 * k + 1) * math.pi - t1, (-1.0) ** (k + 1) * 2.0 * math.sin(t1 / 2))
    # rounding slack at the ends of the admissible t1 set, where |r| == delta exactly
    bound = delta * (1.0 + 1e-12)
    if abs(r1) > bound or abs(p2.r) > bound:
        return None
    p1 = ParamPoint(t1, r1)
    image = Point3(-1.0, 0.0, -math.sin(t1))
    q1, q2 = eval_simple(p1), eval_simple(p2)
    if max(abs(a - b) for a, b in zip(q1, q2)) > 1e-12:
        raise ArithmeticError(f"glued pair images disagree: {q1} vs {q2}")
    return GluedPair(p1, p2, k, image)


# --------------------------------------------------------------------------
# the rational function and its domain
# --------------------------------------------------------------------------

def _check_regular(x, y) -> None:
    if np.any((np.asarray(x) == -1.0) & (np.asarray(y) == 0.0)):
        raise SingularPointError("(-1, 0) is excluded from the domain")


def _unpack(value):
    return float(value) if np.ndim(value) == 0 else value


def f(x, y):
    """Height of the simple strip above ``(x, y)``: ``y (x^2 + y^2 - 1) / ((x + 1)^2 + y^2)``.

    Accepts scalars or arrays.  The factored form avoids cancellation near the
    unit circle.
    """
    _check_regular(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xp = x + 1.0
    return _unpack(y * ((x - 1.0) * xp + y * y) / (xp * xp + y * y))


def f_subtraction_form(x, y):
    """``y - 2 (x + 1) y / ((x + 1)^2 + y^2)``; kept for cross-checking :func:`f`."""
    _check_regular(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xp = x + 1.0
    return _unpack(y - 2.0 * xp * y / (xp * xp + y * y))


def g(x, y):
    """``(x^2 + y^2 - 1)^2 / ((x + 1)^2 + y^2)``, the squared width coordinate over ``(x, y)``."""
    _check_regular(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xp = x + 1.0
    num = (x - 1.0) * xp + y * y
    return _unpack(num * num / (xp * xp + y * y))


def in_region(x, y, delta: float):
    """Membership in ``{g <= delta^2}`` minus the point ``(-1, 0)``."""
    delta = check_delta(delta, allow_infinite=True)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    singular = (x == -1.0) & (y == 0.0)
    if math.isinf(delta):
        out = ~singular
    else:
        xp = x + 1.0
        num = (x - 1.0) * xp + y * y
        with np.errstate(invalid="ignore", divide="ignore"):
            gv = num * num / (xp * xp + y * y)
        out = ~singular & (gv <= delta * delta)
    return bool(out) if out.ndim == 0 else out


def arccot(q: float) -> float:
    """Inverse cotangent with values in ``(0, pi)``."""
    return math.pi / 2 - math.atan(q)


def invert_graph(x: float, y: float) -> ParamPoint:
    """Parameter point of the simple strip lying over ``(x, y)``.

    ``t = 2 arccot((x + 1) / y)``; the width coordinate uses the closed form
    ``sign(y) (x^2 + y^2 - 1) / sqrt((x + 1)^2 + y^2)``, which equals
    ``(y - sin t) / sin(t/2)`` but stays accurate as ``y -> 0``.
    On the x-axis the answer is ``(0, x - 1)``.
    """
    _check_regular(x, y)
    x, y = float(x), float(y)
    if y == 0.0:
        return ParamPoint(0.0, x - 1.0)
    xp = x + 1.0
    t = 2.0 * arccot(xp / y)
    r = math.copysign(1.0, y) * ((x - 1.0) * xp + y * y) / math.hypot(xp, y)
    return ParamPoint(t, r)


# --------------------------------------------------------------------------
# vertical cross-sections
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossSection:
    """Set of heights ``z`` over a planar point.

    ``kind`` is one of ``"empty"``, ``"finite"``, ``"interval"``, ``"all_reals"``.
    """

    kind: str
    values: tuple = ()
    lo: float = math.nan
    hi: float = math.nan
    closed: bool = True

    @classmethod
    def empty(cls) -> "CrossSection":
        return cls("empty")

    @classmethod
    def finite(cls, values) -> "CrossSection":
        return cls("finite", tuple(sorted(set(float(v) for v in values))))

    @classmethod
    def interval(cls, lo: float, hi: float, closed: bool = True) -> "CrossSection":
        return cls("interval", lo=float(lo), hi=float(hi), closed=closed)

    @classmethod
    def all_reals(cls) -> "CrossSection":
        return cls("all_reals")

    @property
    def cardinality(self) -> float:
        if self.kind == "empty":
            return 0
        if self.kind == "finite":
            return len(self.values)
        if self.kind == "interval" and self.lo == self.hi:
            return 1
        return math.inf

    def contains(self, z: float) -> bool:
        if self.kind == "finite":
            return z in self.values
        if self.kind == "interval":
            return self.lo <= z <= self.hi if self.closed else self.lo < z < self.hi
        return self.kind == "all_reals"

    def to_json(self) -> dict:
        if self.kind == "finite":
            return {"finite": list(self.values)}
        if self.kind == "interval":
            return {"interval": {"lo": self.lo, "hi": self.hi, "closed": self.closed}}
        return {self.kind: True}


def cross_section_simple(x: float, y: float, delta: float = INFINITE) -> CrossSection:
    delta = check_delta(delta, allow_infinite=True)
    if x == -1.0 and y == 0.0:
        s = sigma_delta(delta)
        return CrossSection.interval(-s, s)
    if in_region(x, y, delta):
        return CrossSection.finite([f(x, y)])
    return CrossSection.empty()


class PolarCoords(NamedTuple):
    rho: float
    theta: float


def polar(x: float, y: float) -> PolarCoords:
    """Signed-radius polar coordinates with ``theta`` in ``[0, pi)``."""
    if x == 0.0 and y == 0.0:
        raise DomainError("polar coordinates are not unique at the origin")
    theta = math.atan2(y, x)
    rho = math.hypot(x, y)
    if theta < 0.0:
        theta += math.pi
        rho = -rho
    if theta >= math.pi:
        theta -= math.pi
        rho = -rho
    return PolarCoords(rho, theta)


def _half_angle_tan_cot(x: float, y: float, rho: float) -> tuple[float, float]:
    # tan(theta/2) = y / (rho + x) = (rho - x) / y; pick the branch without cancellation
    if x * rho >= 0.0:
        return y / (rho + x), (rho + x) / y
    return (rho - x) / y, y / (rho - x)


def common_preimages(x: float, y: float) -> list[ParamPoint]:
    """The (at most two) parameter points of the infinite common strip over ``(x, y)``, ``y != 0``."""
    if y == 0.0:
        raise DomainError("common_preimages needs y != 0")
    rho, theta = polar(x, y)
    return [
        ParamPoint(theta, (rho - 1.0) / math.cos(theta / 2)),
        ParamPoint(theta + math.pi, (rho + 1.0) / math.sin(theta / 2)),
    ]


def cross_section_common(x: float, y: float) -> CrossSection:
    """Heights of the infinite-width common strip over ``(x, y)``."""
    if y == 0.0:
        if x == -1.0 or x == 0.0:
            return CrossSection.all_reals()
        return CrossSection.finite([0.0])
    rho = math.copysign(math.hypot(x, y), y)
    tan_h, cot_h = _half_angle_tan_cot(x, y, rho)
    z1 = (rho - 1.0) * tan_h
    if x == -1.0:
        return CrossSection.finite([z1])
    return CrossSection.finite([z1, (rho + 1.0) * cot_h])


# --------------------------------------------------------------------------
# the cubic surface containing the common strip
# --------------------------------------------------------------------------

def cubic_residual(p):
    """``-y + x^2 y + y^3 - 2xz - 2x^2 z - 2y^2 z + yz^2`` at ``p`` (last axis = xyz)."""
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    out = -y + x * x * y + y ** 3 - 2 * x * z - 2 * x * x * z - 2 * y * y * z + y * z * z
    return _unpack(out)


def min_max_r_squared(rho: float) -> float:
    """Infimum over theta of the larger squared width coordinate of the two preimages."""
    return 2.0 + 2.0 * rho * rho
