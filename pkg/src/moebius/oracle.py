"""Brute-force numerical checks of the closed forms.

The surface is sampled on a grid (or from a seeded stream), coincident
samples are found with a uniform spatial hash, and the results are compared
with the predictions of :mod:`moebius.closed_form`.  None of the sampling or
collision code calls into the closed forms; they are only consulted for the
final comparison.

Work may be split over threads (``MOEBIUS_THREADS``), but every reduction
is a max/min or a canonical sort, so reports do not depend on the split.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize

from . import closed_form as cf
from .core import (
    TWO_PI,
    ParamPoint,
    Point3,
    RealizationKind,
    canonicalize,
    check_delta,
    map_points,
    param_distance,
    param_distance_arrays,
    r_nodes,
    simple_points,
    t_nodes,
)
from .errors import PreconditionError
from .rng import uniforms

DEFAULT_EPS_SPACE = 1e-3
DEFAULT_EPS_PARAM = 0.1
NEAR_THRESHOLD_WINDOW = 0.02


def thread_count(threads: Optional[int] = None) -> int:
    """Explicit argument, else ``MOEBIUS_THREADS``, else 1."""
    if threads is None:
        raw = os.environ.get("MOEBIUS_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise PreconditionError(f"MOEBIUS_THREADS must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise PreconditionError(f"thread count must be positive, got {threads}")
    return threads


def _map_ordered(fn, items, threads: int):
    if threads == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# sample clouds
# --------------------------------------------------------------------------

@dataclass
class SampleCloud:
    kind: RealizationKind
    delta: float
    nt: int
    nr: int
    t: np.ndarray
    r: np.ndarray
    points: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def param(self, i: int) -> ParamPoint:
        return ParamPoint(float(self.t[i]), float(self.r[i]))

    def point(self, i: int) -> Point3:
        return Point3(*map(float, self.points[i]))


def build_cloud(kind, delta: float, nt: int, nr: int) -> SampleCloud:
    """Grid samples ``(2pi i/nt, -delta + 2 delta j/nr)``, t-major order."""
    kind = RealizationKind.parse(kind)
    delta = check_delta(delta)
    if nt < 4 or nr < 1:
        raise PreconditionError(f"cloud needs nt >= 4 and nr >= 1, got nt={nt}, nr={nr}")
    tt, rr = np.meshgrid(t_nodes(nt), r_nodes(delta, nr), indexing="ij")
    t, r = tt.ravel(), rr.ravel()
    return SampleCloud(kind, delta, nt, nr, t, r, map_points(kind, t, r))


# --------------------------------------------------------------------------
# collision detection
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CollisionPair:
    a: ParamPoint
    b: ParamPoint
    spatial_gap: float
    param_gap: float
    midpoint: Point3


class PairArrays(NamedTuple):
    """Index form of a collision list; ``ia[k] < ib[k]`` in canonical order."""

    ia: np.ndarray
    ib: np.ndarray
    spatial_gap: np.ndarray
    param_gap: np.ndarray


# the cell itself plus the 13 neighbours with a lexicographically positive offset
_HALF_OFFSETS = [(0, 0, 0)] + [o for o in itertools.product((-1, 0, 1), repeat=3) if o > (0, 0, 0)]


def _cell_candidates(order, ukeys, starts, counts, key_offset, same_cell):
    nb_keys = ukeys + key_offset
    pos = np.searchsorted(ukeys, nb_keys)
    pos_c = np.minimum(pos, len(ukeys) - 1)
    hit = ukeys[pos_c] == nb_keys
    ca = np.nonzero(hit)[0]
    cb = pos_c[hit]
    na, nb = counts[ca], counts[cb]
    m = na * nb
    total = int(m.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    rep = np.repeat(np.arange(len(ca)), m)
    local = np.arange(total) - np.repeat(np.cumsum(m) - m, m)
    ia = starts[ca][rep] + local // nb[rep]
    ib = starts[cb][rep] + local % nb[rep]
    if same_cell:
        keep = ia < ib
        ia, ib = ia[keep], ib[keep]
    return order[ia], order[ib]


def _canonical(t, r, ia, ib):
    """Orient each pair so that point ``a`` is the smaller ``(t, r)``; sort the list."""
    swap = (t[ib] < t[ia]) | ((t[ib] == t[ia]) & (r[ib] < r[ia]))
    ia, ib = np.where(swap, ib, ia), np.where(swap, ia, ib)
    order = np.lexsort((r[ib], t[ib], r[ia], t[ia]))
    return ia[order], ib[order]


def _filter_pairs(points, t, r, ia, ib, eps_space, eps_param):
    gap = np.linalg.norm(points[ia] - points[ib], axis=1)
    keep = gap <= eps_space
    ia, ib, gap = ia[keep], ib[keep], gap[keep]
    pgap = param_distance_arrays(t[ia], r[ia], t[ib], r[ib])
    keep = pgap >= eps_param
    return ia[keep], ib[keep], gap[keep], pgap[keep]


def _finish(points, t, r, ia, ib, eps_space, eps_param) -> PairArrays:
    ia, ib, gap, pgap = _filter_pairs(points, t, r, ia, ib, eps_space, eps_param)
    ia, ib = _canonical(t, r, ia, ib)
    gap = np.linalg.norm(points[ia] - points[ib], axis=1)
    pgap = param_distance_arrays(t[ia], r[ia], t[ib], r[ib])
    return PairArrays(ia, ib, gap, pgap)


def hash_pairs(points, t, r, eps_space: float, eps_param: float, threads: Optional[int] = None) -> PairArrays:
    """All sample pairs within ``eps_space`` in R^3 and at least ``eps_param`` apart in the strip.

    Points are bucketed into cubes of side ``eps_space``; each point is only
    compared with points of its own cube and the 26 around it.
    """
    if eps_space <= 0 or eps_param <= 0:
        raise PreconditionError("eps_space and eps_param must be positive")
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n < 2:
        return _finish(points, t, r, np.empty(0, np.int64), np.empty(0, np.int64), eps_space, eps_param)
    # a hair above eps so rounding in p / cell never puts a close pair two cells apart
    cell = eps_space * (1.0 + 1e-9)
    idx = np.floor(points / cell).astype(np.int64)
    idx -= idx.min(axis=0) - 1
    dims = idx.max(axis=0) + 2
    if float(dims[0]) * float(dims[1]) * float(dims[2]) >= 2.0**62:
        raise PreconditionError("point cloud too large for the hash grid at this eps_space")
    keys = (idx[:, 0] * dims[1] + idx[:, 1]) * dims[2] + idx[:, 2]
    order = np.argsort(keys, kind="stable")
    ukeys, starts, counts = np.unique(keys[order], return_index=True, return_counts=True)

    def work(offset):
        dx, dy, dz = offset
        key_offset = (dx * dims[1] + dy) * dims[2] + dz
        ia, ib = _cell_candidates(order, ukeys, starts, counts, key_offset, offset == (0, 0, 0))
        return _filter_pairs(points, t, r, ia, ib, eps_space, eps_param)[:2]

    parts = _map_ordered(work, _HALF_OFFSETS, thread_count(threads))
    ia = np.concatenate([p[0] for p in parts])
    ib = np.concatenate([p[1] for p in parts])
    return _finish(points, t, r, ia, ib, eps_space, eps_param)


def brute_force_pairs(points, t, r, eps_space: float, eps_param: float, block: int = 512) -> PairArrays:
    """Quadratic all-pairs reference for :func:`hash_pairs` (small clouds only)."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    ia_parts, ib_parts = [], []
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        d = np.linalg.norm(points[lo:hi, None, :] - points[None, :, :], axis=2)
        i, j = np.nonzero(d <= eps_space)
        i = i + lo
        keep = i < j
        ia_parts.append(i[keep])
        ib_parts.append(j[keep])
    ia = np.concatenate(ia_parts) if ia_parts else np.empty(0, np.int64)
    ib = np.concatenate(ib_parts) if ib_parts else np.empty(0, np.int64)
    return _finish(points, t, r, ia, ib, eps_space, eps_param)


def collision_arrays(cloud: SampleCloud, eps_space=DEFAULT_EPS_SPACE, eps_param=DEFAULT_EPS_PARAM,
                     threads: Optional[int] = None) -> PairArrays:
    return hash_pairs(cloud.points, cloud.t, cloud.r, eps_space, eps_param, threads)


def detect_collisions(cloud: SampleCloud, eps_space: float = DEFAULT_EPS_SPACE,
                      eps_param: float = DEFAULT_EPS_PARAM, threads: Optional[int] = None) -> list[CollisionPair]:
    """Spatially coincident, parametrically distinct sample pairs, canonically sorted."""
    pa = collision_arrays(cloud, eps_space, eps_param, threads)
    mids = 0.5 * (cloud.points[pa.ia] + cloud.points[pa.ib])
    return [
        CollisionPair(cloud.param(i), cloud.param(j), float(gap), float(pgap), Point3(*map(float, mid)))
        for i, j, gap, pgap, mid in zip(pa.ia, pa.ib, pa.spatial_gap, pa.param_gap, mids)
    ]


class ZProfile(NamedTuple):
    count: int
    z_min_abs: float
    z_max_abs: float
    max_axis_deviation: float

    @property
    def is_empty(self) -> bool:
        return self.count == 0


EMPTY_PROFILE = ZProfile(0, math.nan, math.nan, math.nan)


def collision_z_profile(pairs: Sequence[CollisionPair]) -> ZProfile:
    """Range of ``|z|`` over pair midpoints and their largest distance from the line x=-1, y=0."""
    if not pairs:
        return EMPTY_PROFILE
    mids = np.array([p.midpoint for p in pairs])
    absz = np.abs(mids[:, 2])
    dev = np.hypot(mids[:, 0] + 1.0, mids[:, 1])
    return ZProfile(len(pairs), float(absz.min()), float(absz.max()), float(dev.max()))


def _family_points(t1: np.ndarray, k: int):
    """Exact glued pairs along branch ``k`` for an array of first angles, partner canonicalised."""
    r1 = -2.0 * np.cos(t1 / 2)
    t2 = (2 * k + 1) * math.pi - t1
    r2 = (-1.0) ** (k + 1) * 2.0 * np.sin(t1 / 2)
    shift = np.floor(t2 / TWO_PI)
    t2 = t2 - shift * TWO_PI
    r2 = np.where(shift % 2 == 1, -r2, r2)
    return r1, t2, r2


def glued_family_residual(a: ParamPoint, b: ParamPoint, window: float = 0.05, n: int = 2001) -> float:
    """Distance in the strip from a detected pair to the curve of exact glued pairs.

    Minimises ``max(d(a, p1(s)), d(b, p2(s)))`` over first angles ``s`` within
    ``window`` of either point's angle, for both roles and both branches.  A grid
    minimum over-estimates the true one, so the result is conservative.
    """
    best = math.inf
    for p1, p2 in ((a, b), (b, a)):
        s = p1.t + np.linspace(-window, window, n)
        s = s[(s >= 0.0) & (s < TWO_PI)]
        for k in (0, 1):
            r1, t2, r2 = _family_points(s, k)
            d1 = param_distance_arrays(p1.t, p1.r, s, r1)
            d2 = param_distance_arrays(p2.t, p2.r, t2, r2)
            best = min(best, float(np.maximum(d1, d2).min()))
    return best


def family_tolerance(delta: float, nt: int, nr: int) -> float:
    """Three grid-cell diagonals of the sampling grid in the strip."""
    return 3.0 * math.hypot(TWO_PI / nt, 2.0 * delta / nr)


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

@dataclass
class VerificationReport:
    check: str
    passed: bool
    worst_residual: float
    params: dict
    n_samples: int
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "pass": bool(self.passed),
            "worst_residual": _json_float(self.worst_residual),
            "params": {k: _json_float(v) for k, v in self.params.items()},
            "n_samples": int(self.n_samples),
            "details": {k: _json_float(v) for k, v in self.details.items()},
        }


def _json_float(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (list, tuple)):
        return [_json_float(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_float(x) for k, x in v.items()}
    return v


# --------------------------------------------------------------------------
# verification routines
# --------------------------------------------------------------------------

GRAPH_TOL = 1e-9
GRAPH_SKIP = 1e-6


def sample_strip(delta: float, seed: int, start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Samples ``start .. start+count-1`` of the seeded uniform stream over the strip.

    Sample ``i`` uses draws ``2i`` (angle) and ``2i + 1`` (width).
    """
    u = uniforms(seed, 2 * start, 2 * count)
    return TWO_PI * u[0::2], -delta + 2.0 * delta * u[1::2]


def _graph_residuals(delta: float, t: np.ndarray, r: np.ndarray):
    xyz = simple_points(t, r)
    x, y, z = xyz[:, 0], xyz[:, 1], xyz[:, 2]
    keep = np.abs(x + 1.0) + np.abs(y) >= GRAPH_SKIP
    x, y, z = x[keep], y[keep], z[keep]
    if len(x) == 0:
        return 0.0, 0.0, int((~keep).sum())
    fres = np.abs(cf.f(x, y) - z) / (1.0 + np.abs(z))
    excess = np.maximum(cf.g(x, y) - delta * delta, 0.0)
    return float(fres.max()), float(excess.max()), int((~keep).sum())


def verify_graph_identity(delta: float, n_samples: int, seed: int, include_seam: bool = True,
                          threads: Optional[int] = None, chunk: int = 250_000) -> VerificationReport:
    """Seeded points of the simple strip off the vertical line lie on the graph of ``f`` over ``{g <= delta^2}``."""
    delta = check_delta(delta)
    starts = list(range(0, n_samples, chunk))

    def work(start):
        t, r = sample_strip(delta, seed, start, min(chunk, n_samples - start))
        return _graph_residuals(delta, t, r)

    results = _map_ordered(work, starts, thread_count(threads))
    n_seam = 0
    if include_seam:
        rs = np.linspace(-delta, delta, 65)
        t = np.concatenate([np.full_like(rs, TWO_PI - 1e-7), np.zeros_like(rs)])
        results.append(_graph_residuals(delta, t, np.concatenate([rs, rs])))
        n_seam = len(t)
    fmax = max((res[0] for res in results), default=0.0)
    emax = max((res[1] for res in results), default=0.0)
    skipped = sum(res[2] for res in results)
    return VerificationReport(
        check="graph_identity",
        passed=fmax <= GRAPH_TOL and emax <= GRAPH_TOL,
        worst_residual=max(fmax, emax),
        params={"delta": delta, "seed": seed, "tol": GRAPH_TOL, "skip_band": GRAPH_SKIP},
        n_samples=n_samples,
        details={"max_f_residual": fmax, "max_region_excess": emax,
                 "skipped_near_axis": skipped, "seam_samples": n_seam},
    )


AXIS_TOL = 1e-6


def scan_axis_heights(delta: float, n_scan: int = 100_001) -> tuple[float, float]:
    """Range of ``-sin t`` over ``{t in [0, 2pi): 2|cos(t/2)| <= delta}``.

    Grid scan, then the admissible-set boundaries are located by root finding
    and interior extrema are polished by bounded minimisation.
    """
    def h(t):
        return 2.0 * abs(math.cos(t / 2)) - delta

    t = TWO_PI * np.arange(n_scan) / n_scan
    ok = 2.0 * np.abs(np.cos(t / 2)) <= delta
    if not ok.any():
        return math.nan, math.nan
    z = -np.sin(t)
    cands = list(z[ok])
    # boundary points between admissible and inadmissible neighbours (cyclic)
    nxt = np.roll(ok, -1)
    for i in np.nonzero(ok != nxt)[0]:
        a, b = t[i], (t[i + 1] if i + 1 < n_scan else TWO_PI)
        root = optimize.brentq(h, a, b, xtol=1e-15)
        cands.append(-math.sin(root))
    step = TWO_PI / n_scan
    zok = np.where(ok, z, np.nan)
    for sign in (1.0, -1.0):
        i = int(np.nanargmax(sign * zok))
        lo, hi = max(0.0, t[i] - step), min(TWO_PI, t[i] + step)
        res = optimize.minimize_scalar(lambda s: sign * math.sin(s), bounds=(lo, hi),
                                       method="bounded", options={"xatol": 1e-12})
        if h(res.x) <= 0.0:
            cands.append(-math.sin(res.x))
    return float(min(cands)), float(max(cands))


def verify_axis_segment(delta: float, n_scan: int = 100_001, cloud_n: int = 512,
                        axis_band: float = 1e-4) -> VerificationReport:
    """Heights reached on the vertical line x=-1, y=0 fill exactly ``[-sigma, sigma]``."""
    delta = check_delta(delta)
    zlo, zhi = scan_axis_heights(delta, n_scan)
    sigma = cf.sigma_delta(delta)
    resid = max(abs(zhi - sigma), abs(zlo + sigma))
    cloud = build_cloud(RealizationKind.SIMPLE, delta, cloud_n, cloud_n)
    p = cloud.points
    near = np.hypot(p[:, 0] + 1.0, p[:, 1]) <= axis_band
    zmax_cloud = float(np.abs(p[near, 2]).max()) if near.any() else 0.0
    cloud_ok = zmax_cloud <= sigma + 1e-3
    return VerificationReport(
        check="axis_segment",
        passed=resid <= AXIS_TOL and cloud_ok,
        worst_residual=resid,
        params={"delta": delta, "n_scan": n_scan, "tol": AXIS_TOL, "cloud_n": cloud_n, "axis_band": axis_band},
        n_samples=n_scan + len(cloud),
        details={"z_min": zlo, "z_max": zhi, "sigma": sigma,
                 "cloud_points_near_axis": int(near.sum()), "cloud_max_abs_z_near_axis": zmax_cloud},
    )


def _threshold(kind: RealizationKind) -> float:
    return cf.SQRT2 if kind is RealizationKind.SIMPLE else 2.0


def verify_embedding_threshold(kind, deltas: Sequence[float], nt: int = 1024, nr: int = 1024,
                               eps_space: float = DEFAULT_EPS_SPACE, eps_param: float = DEFAULT_EPS_PARAM,
                               threads: Optional[int] = None) -> VerificationReport:
    """Collisions are found exactly when the closed form says the map is not injective.

    Half-widths within ``NEAR_THRESHOLD_WINDOW`` of the kind's threshold are
    reported but do not affect the verdict.
    """
    kind = RealizationKind.parse(kind)
    passed = True
    rows = []
    total = 0
    for delta in deltas:
        delta = check_delta(delta)
        cloud = build_cloud(kind, delta, nt, nr)
        pa = collision_arrays(cloud, eps_space, eps_param, threads)
        total += len(cloud)
        found = len(pa.ia) > 0
        embedding = cf.is_embedding(delta, kind)
        agrees = found != embedding
        family = None
        if kind is RealizationKind.SIMPLE and found:
            family = max(glued_family_residual(cloud.param(i), cloud.param(j)) for i, j in zip(pa.ia, pa.ib))
            agrees = agrees and family <= family_tolerance(delta, nt, nr)
        informational = abs(delta - _threshold(kind)) < NEAR_THRESHOLD_WINDOW
        if not informational:
            passed = passed and agrees
        row = {"delta": delta, "collisions": int(len(pa.ia)), "embedding": embedding,
               "agrees": agrees, "informational": informational}
        if family is not None:
            row["family_residual"] = family
            row["family_tolerance"] = family_tolerance(delta, nt, nr)
        rows.append(row)
    disagreements = sum(1 for row in rows if not row["agrees"] and not row["informational"])
    return VerificationReport(
        check=f"embedding_threshold_{kind.value}",
        passed=passed,
        worst_residual=float(disagreements),
        params={"kind": kind.value, "deltas": [float(d) for d in deltas], "nt": nt, "nr": nr,
                "eps_space": eps_space, "eps_param": eps_param},
        n_samples=total,
        details={"rows": rows},
    )


def verify_self_intersection_profile(delta: float, nt: int = 2048, nr: int = 512,
                                     eps_space: float = DEFAULT_EPS_SPACE, eps_param: float = DEFAULT_EPS_PARAM,
                                     threads: Optional[int] = None) -> VerificationReport:
    """Doubled points of the simple strip lie on the vertical line with ``|z|`` spanning ``[s_delta, 1)``."""
    delta = check_delta(delta)
    cloud = build_cloud(RealizationKind.SIMPLE, delta, nt, nr)
    pairs = detect_collisions(cloud, eps_space, eps_param, threads)
    prof = collision_z_profile(pairs)
    s = cf.s_delta(delta)
    params = {"delta": delta, "nt": nt, "nr": nr, "eps_space": eps_space, "eps_param": eps_param}
    if prof.is_empty:
        passed = s == 1.0
        resid = 0.0
    else:
        resid = abs(prof.z_min_abs - s)
        passed = (s < 1.0 and prof.max_axis_deviation <= 2 * eps_space
                  and resid <= 2 * eps_space and prof.z_max_abs < 1.0)
    return VerificationReport(
        check="self_intersection_profile",
        passed=passed,
        worst_residual=resid,
        params=params,
        n_samples=len(cloud),
        details={"collisions": prof.count, "z_min_abs": prof.z_min_abs, "z_max_abs": prof.z_max_abs,
                 "max_axis_deviation": prof.max_axis_deviation, "s_delta": s},
    )


MINMAX_TOL = 1e-6


def _max_r_squared(theta, rho):
    return np.maximum(((rho - 1.0) / np.cos(theta / 2)) ** 2, ((rho + 1.0) / np.sin(theta / 2)) ** 2)


def grid_min_max(rho: float, n_theta: int = 100_000) -> float:
    """Minimise ``max(((rho-1)/cos(th/2))^2, ((rho+1)/sin(th/2))^2)`` over ``th in (0, pi)``."""
    if n_theta < 1000:
        raise PreconditionError("n_theta must be at least 1000")
    theta = math.pi * np.arange(1, n_theta) / n_theta
    vals = _max_r_squared(theta, rho)
    i = int(np.argmin(vals))
    step = math.pi / n_theta
    lo = max(theta[i] - step, 1e-300)
    hi = min(theta[i] + step, math.pi * (1.0 - 1e-15))
    res = optimize.minimize_scalar(lambda th: float(_max_r_squared(th, rho)), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-13})
    return float(min(vals[i], res.fun))


def verify_min_max(rho_list: Sequence[float], n_theta: int = 100_000) -> VerificationReport:
    rows = []
    worst = 0.0
    for rho in rho_list:
        found = grid_min_max(rho, n_theta)
        expected = cf.min_max_r_squared(rho)
        worst = max(worst, abs(found - expected))
        rows.append({"rho": float(rho), "grid_min": found, "closed_form": expected})
    return VerificationReport(
        check="min_max_identity",
        passed=worst <= MINMAX_TOL,
        worst_residual=worst,
        params={"rhos": [float(r) for r in rho_list], "n_theta": n_theta, "tol": MINMAX_TOL},
        n_samples=n_theta * len(rho_list),
        details={"rows": rows},
    )
