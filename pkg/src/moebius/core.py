"""Parameter domain with its seam identification, and the two strip maps.

Both maps send the parameter rectangle ``[0, 2pi) x [-delta, delta]`` to R^3.
The edge ``t = 2pi`` is glued back onto ``t = 0`` with ``r -> -r``.

* ``COMMON``: the usual rotating-segment strip,
  ``((1 + r cos(t/2)) cos t, (1 + r cos(t/2)) sin t, r sin(t/2))``.
* ``SIMPLE``: the segment stays parallel to the plane ``y = z``,
  ``(cos t + r cos(t/2), sin t + r sin(t/2), r sin(t/2))``.

Half-widths are plain floats; ``math.inf`` stands for the infinite-width strip
and is accepted only where documented (cross-sections).
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PreconditionError

TWO_PI = 2.0 * math.pi
INFINITE = math.inf


class ParamPoint(NamedTuple):
    t: float
    r: float


class Point3(NamedTuple):
    x: float
    y: float
    z: float


class RealizationKind(enum.Enum):
    COMMON = "common"
    SIMPLE = "simple"

    @classmethod
    def parse(cls, value: "str | RealizationKind") -> "RealizationKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown realization kind {value!r}") from None


def check_delta(delta: float, allow_infinite: bool = False) -> float:
    """Validate a half-width and return it as a float."""
    delta = float(delta)
    if math.isnan(delta) or delta <= 0:
        raise PreconditionError(f"half-width must be positive, got {delta}")
    if math.isinf(delta) and not allow_infinite:
        raise PreconditionError("an infinite half-width is only accepted by cross-sections")
    return delta


def canonicalize(t: float, r: float) -> ParamPoint:
    """Reduce ``(t, r)`` to its representative with ``0 <= t < 2pi``.

    Every shift of ``t`` by a multiple of 2pi flips the sign of ``r`` once.
    """
    if not (math.isfinite(t) and math.isfinite(r)):
        raise DomainError(f"non-finite parameter point ({t}, {r})")
    k = math.floor(t / TWO_PI)
    tc = t - k * TWO_PI
    # float rounding can land exactly on 2pi (e.g. t = -1e-20)
    if tc >= TWO_PI:
        tc -= TWO_PI
        k += 1
    if tc < 0.0:
        tc = 0.0
    if k % 2:
        r = -r
    return ParamPoint(tc, r)


def in_domain(p: ParamPoint, delta: float) -> bool:
    return 0.0 <= p.t < TWO_PI and abs(p.r) <= delta


def simple_points(t, r) -> np.ndarray:
    """Vectorised simple map; returns an array of shape ``broadcast(t, r).shape + (3,)``."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    half = 0.5 * t
    rs = r * np.sin(half)
    return np.stack(np.broadcast_arrays(np.cos(t) + r * np.cos(half), np.sin(t) + rs, rs), axis=-1)


def common_points(t, r) -> np.ndarray:
    """Vectorised common map, same shape convention as :func:`simple_points`."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    half = 0.5 * t
    radial = 1.0 + r * np.cos(half)
    return np.stack(np.broadcast_arrays(radial * np.cos(t), radial * np.sin(t), r * np.sin(half)), axis=-1)


def map_points(kind: RealizationKind, t, r) -> np.ndarray:
    if kind is RealizationKind.SIMPLE:
        return simple_points(t, r)
    return common_points(t, r)


def _check_finite(p) -> None:
    if not (math.isfinite(p[0]) and math.isfinite(p[1])):
        raise DomainError(f"non-finite parameter point {tuple(p)}")


def eval_simple(p) -> Point3:
    _check_finite(p)
    t, r = float(p[0]), float(p[1])
    rs = r * math.sin(t / 2)
    return Point3(math.cos(t) + r * math.cos(t / 2), math.sin(t) + rs, rs)


def eval_common(p) -> Point3:
    _check_finite(p)
    t, r = float(p[0]), float(p[1])
    radial = 1.0 + r * math.cos(t / 2)
    return Point3(radial * math.cos(t), radial * math.sin(t), r * math.sin(t / 2))


def evaluate(kind: RealizationKind, p) -> Point3:
    if kind is RealizationKind.SIMPLE:
        return eval_simple(p)
    return eval_common(p)


def param_distance_arrays(t1, r1, t2, r2) -> np.ndarray:
    """Gluing-aware distance, vectorised. Inputs are assumed canonical."""
    t1, r1, t2, r2 = (np.asarray(a, dtype=float) for a in (t1, r1, t2, r2))
    dt = t2 - t1
    direct = np.hypot(dt, r2 - r1)
    up = np.hypot(dt + TWO_PI, -r2 - r1)
    down = np.hypot(dt - TWO_PI, -r2 - r1)
    return np.minimum(direct, np.minimum(up, down))


def param_distance(p1: ParamPoint, p2: ParamPoint) -> float:
    """Distance in the glued parameter strip.

    Minimum Euclidean distance from ``p1`` to the three representatives
    ``(t2, r2)``, ``(t2 + 2pi, -r2)`` and ``(t2 - 2pi, -r2)``, after both points
    are reduced to their canonical representatives.
    """
    a, b = canonicalize(*p1), canonicalize(*p2)
    return float(param_distance_arrays(a.t, a.r, b.t, b.r))


def moving_segment(t: float, delta: float, kind: RealizationKind) -> tuple[Point3, Point3]:
    """Endpoints ``(map(t, -delta), map(t, +delta))`` of the generating segment."""
    delta = check_delta(delta)
    return evaluate(kind, (t, -delta)), evaluate(kind, (t, delta))


def t_nodes(nt: int) -> np.ndarray:
    """Half-open angular grid ``2pi i / nt``, ``i = 0..nt-1``."""
    return TWO_PI * np.arange(nt) / nt


def r_nodes(delta: float, nr: int) -> np.ndarray:
    """Closed width grid ``-delta + 2 delta j / nr``, ``j = 0..nr``."""
    return -delta + 2.0 * delta * np.arange(nr + 1) / nr
