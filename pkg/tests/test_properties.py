"""Property-based checks of the geometric identities."""

import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from moebius import closed_form as cf
from moebius.core import TWO_PI, canonicalize, eval_common, eval_simple, param_distance
from moebius.rng import splitmix64

angles = st.floats(-20.0, 20.0, allow_nan=False)
widths = st.floats(-3.0, 3.0, allow_nan=False)
plane = st.floats(-4.0, 4.0, allow_nan=False)


@given(angles, widths)
def test_canonical_representative_has_same_image(t, r):
    c = canonicalize(t, r)
    assert 0.0 <= c.t < TWO_PI
    assert canonicalize(*c) == c
    for fn in (eval_simple, eval_common):
        assert np.allclose(fn((t, r)), fn(c), atol=1e-9)


@given(angles, widths, angles, widths)
def test_param_distance_symmetric_and_gluing_invariant(t1, r1, t2, r2):
    p, q = canonicalize(t1, r1), canonicalize(t2, r2)
    d = param_distance(p, q)
    assert d >= 0.0
    assert math.isclose(d, param_distance(q, p), abs_tol=1e-12)
    # moving q to its other representative does not change the distance
    if q.t > 0.0:
        assert math.isclose(d, param_distance(p, (q.t - TWO_PI, -q.r)), abs_tol=1e-9)


@given(st.floats(0.0, TWO_PI, exclude_max=True), widths)
def test_simple_points_are_on_graph(t, r):
    x, y, z = eval_simple((t, r))
    assume(abs(x + 1.0) + abs(y) > 1e-3)
    assert math.isclose(cf.f(x, y), z, rel_tol=1e-9, abs_tol=1e-9)
    assert cf.g(x, y) <= r * r * (1 + 1e-9) + 1e-9


@given(plane, plane)
def test_invert_graph_round_trip(x, y):
    assume(abs(x + 1.0) + abs(y) > 1e-3)
    t, r = cf.invert_graph(x, y)
    assert np.allclose(eval_simple((t, r)), (x, y, cf.f(x, y)), atol=1e-8)


@given(angles, widths)
def test_common_points_on_cubic(t, r):
    p = eval_common((t, r))
    assert abs(cf.cubic_residual(p)) <= 1e-9 * (1 + abs(r)) ** 3


@given(plane, plane)
def test_common_cross_section_realises(x, y):
    assume(abs(y) > 1e-6 and abs(x + 1.0) > 1e-6)
    cs = cf.cross_section_common(x, y)
    assert cs.cardinality == 2
    for p in cf.common_preimages(x, y):
        q = eval_common(p)
        assert np.allclose(q[:2], (x, y), atol=1e-9 * (1 + abs(p.r)))
        assert any(math.isclose(q[2], z, rel_tol=1e-9, abs_tol=1e-9) for z in cs.values)


@given(st.floats(0.0, 5.0))
@settings(max_examples=25, deadline=None)
def test_min_max_identity(rho):
    theta = np.linspace(1e-4, math.pi - 1e-4, 20_001)
    vals = np.maximum(((rho - 1) / np.cos(theta / 2)) ** 2, ((rho + 1) / np.sin(theta / 2)) ** 2)
    assert vals.min() >= cf.min_max_r_squared(rho) * (1 - 1e-12)
    assert vals.min() <= cf.min_max_r_squared(rho) * (1 + 1e-4)


@given(st.floats(0.05, 6.0), st.floats(0.05, 6.0))
def test_region_monotone_in_delta(a, b):
    lo, hi = sorted((a, b))
    x, y = np.meshgrid(np.linspace(-4, 4, 23), np.linspace(-4, 4, 21))
    assert not (cf.in_region(x, y, lo) & ~cf.in_region(x, y, hi)).any()


@given(st.floats(1.4143, 4.0), st.floats(0.0, TWO_PI, exclude_max=True), st.sampled_from([0, 1]))
def test_glued_pairs_coincide(delta, t1, k):
    pair = cf.glued_partner(t1, k, delta)
    if pair is None:
        return
    assert pair.p1 != pair.p2
    assert np.allclose(eval_simple(pair.p1), pair.image, atol=1e-12)
    assert np.allclose(eval_simple(pair.p2), pair.image, atol=1e-12)


@given(st.integers(0, 2**64 - 1), st.integers(0, 1000), st.integers(1, 50))
def test_splitmix_windows(seed, start, count):
    assert np.array_equal(splitmix64(seed, start, count), splitmix64(seed, 0, start + count)[start:])
