import math

import numpy as np
import pytest

from moebius.core import (
    TWO_PI,
    ParamPoint,
    RealizationKind,
    canonicalize,
    check_delta,
    common_points,
    eval_common,
    eval_simple,
    moving_segment,
    param_distance,
    param_distance_arrays,
    r_nodes,
    simple_points,
    t_nodes,
)
from moebius.errors import DomainError, PreconditionError

SQ3 = math.sqrt(3.0)


def close(a, b, tol=1e-12):
    return np.allclose(np.asarray(a, float), np.asarray(b, float), atol=tol, rtol=0)


@pytest.mark.parametrize(
    "t, r, expected",
    [
        (TWO_PI, 0.3, (0.0, -0.3)),
        (-math.pi / 2, 1.0, (3 * math.pi / 2, -1.0)),
        (4 * math.pi, 0.3, (0.0, 0.3)),
        (1.0, 0.2, (1.0, 0.2)),
    ],
)
def test_canonicalize(t, r, expected):
    assert close(canonicalize(t, r), expected)


def test_canonicalize_tiny_negative_stays_in_range():
    p = canonicalize(-1e-20, 0.5)
    assert 0.0 <= p.t < TWO_PI


@pytest.mark.parametrize("bad", [(math.nan, 0.0), (0.0, math.inf), (-math.inf, 1.0)])
def test_canonicalize_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        canonicalize(*bad)


def test_simple_examples():
    assert close(eval_simple((0.0, 0.7)), (1.7, 0, 0))
    assert close(eval_simple((math.pi, 1.0)), (-1, 1, 1))
    assert close(eval_simple((math.pi / 3, -SQ3)), (-1, 0, -SQ3 / 2))
    # 40-digit reference for a generic point
    assert close(eval_simple((1.0, 0.3)), (0.8035770744352515, 0.9852986463891574, 0.1438276615812609), 1e-15)


def test_common_examples():
    for z in (-2.0, 0.0, 0.4):
        assert close(eval_common((math.pi, z)), (-1, 0, z))
    assert close(eval_common((0.0, -2.0)), (-1, 0, 0))
    assert close(eval_common((0.0, 0.25)), (1.25, 0, 0))
    assert close(eval_common((1.0, 0.3)), (0.6825502704018511, 1.0630090635891351, 0.1438276615812609), 1e-15)


def test_vectorised_matches_scalar():
    t = np.linspace(-3, 9, 37)
    r = np.linspace(-2, 2, 37)
    for vec, scalar in ((simple_points, eval_simple), (common_points, eval_common)):
        batch = vec(t, r)
        assert batch.shape == (37, 3)
        for i in range(37):
            assert close(batch[i], scalar((t[i], r[i])), 0.0)


@pytest.mark.parametrize("fn", [eval_simple, eval_common])
def test_seam_continuity(fn):
    for r in np.linspace(-1.5, 1.5, 31):
        a = fn((TWO_PI - 1e-8, r))
        b = fn((0.0, -r))
        assert max(abs(u - v) for u, v in zip(a, b)) < 1e-6


def test_scalar_rejects_non_finite():
    with pytest.raises(DomainError):
        eval_simple((math.nan, 0.0))


def test_param_distance_examples():
    assert param_distance(ParamPoint(0.0, 0.5), ParamPoint(TWO_PI - 1e-6, -0.5)) == pytest.approx(1e-6, abs=1e-12)
    assert param_distance((1.0, 0.2), (1.0, 0.2)) == 0.0
    assert param_distance((0.1, 0.0), (0.2, 0.0)) == pytest.approx(0.1, abs=1e-15)
    # the seam representative also flips r: not close without the flip
    assert param_distance((0.0, 0.5), (TWO_PI - 1e-6, 0.5)) == pytest.approx(1.0, abs=1e-5)


def test_param_distance_arrays_symmetric():
    rng = np.random.default_rng(3)
    t1, t2 = rng.uniform(0, TWO_PI, (2, 200))
    r1, r2 = rng.uniform(-1, 1, (2, 200))
    assert close(param_distance_arrays(t1, r1, t2, r2), param_distance_arrays(t2, r2, t1, r1), 1e-14)


def test_moving_segment():
    a, b = moving_segment(0.0, 1.0, RealizationKind.SIMPLE)
    assert close(a, (0, 0, 0)) and close(b, (2, 0, 0))
    a, b = moving_segment(math.pi, 1.0, RealizationKind.COMMON)
    assert close(a, (-1, 0, -1)) and close(b, (-1, 0, 1))


def test_nodes():
    assert close(t_nodes(4), [0, math.pi / 2, math.pi, 3 * math.pi / 2], 0.0)
    assert close(r_nodes(1.0, 2), [-1, 0, 1], 0.0)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_check_delta(bad):
    with pytest.raises(PreconditionError):
        check_delta(bad)


def test_check_delta_infinite_when_allowed():
    assert check_delta(math.inf, allow_infinite=True) == math.inf


def test_kind_parse():
    assert RealizationKind.parse("Common") is RealizationKind.COMMON
    assert RealizationKind.parse(RealizationKind.SIMPLE) is RealizationKind.SIMPLE
    with pytest.raises(ValueError):
        RealizationKind.parse("klein")
