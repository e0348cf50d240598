import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from constrained_hl import geometry as Geo
from constrained_hl.growth import run


def test_empty_envelope_is_the_line():
    env = Geo.envelope([], 10, eps=1e-3, m=5)
    assert np.allclose(env.points, np.linspace(-1, 1, 5) + 1e-3j)
    assert env.t == 0


def test_single_slit_spike():
    env = Geo.envelope([0.0], 1, eps=1e-5, m=2001)
    assert Geo.max_height(env) == pytest.approx(1.0, abs=1e-3)
    assert Geo.max_height(env) <= Geo.height_bound(1, 1) + 1e-5 + 1e-6
    # [-L, R] maps onto the slit itself
    assert Geo.diameter(env) == pytest.approx(1.0, abs=5e-3)


def test_envelope_endpoints_descend_to_the_axis():
    # -L_K and R_K are prevertices of right-angle corners at the feet of slits,
    # where Phi behaves like a square root, so Im Phi(s + i eps) shrinks like a
    # power of eps rather than like eps itself
    for seed in range(3):
        xs = run(100, 200, seed=seed).attachments
        tops = []
        for eps in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10):
            env = Geo.envelope(xs, 100, eps=eps, m=3)
            tops.append((env.points[0].imag, env.points[-1].imag))
        for a, b in zip(tops, tops[1:]):
            assert b[0] < a[0] and b[1] < a[1]
        assert max(tops[-1]) < 0.05 * max(tops[0])


def test_envelope_rejects_bad_arguments():
    with pytest.raises(ValueError):
        Geo.envelope([0.0], 10, eps=0.0)
    with pytest.raises(ValueError):
        Geo.envelope([0.0], 10, m=1)


def _brute_diameter(pts):
    return max(abs(a - b) for a, b in itertools.combinations(pts, 2))


points = st.lists(st.builds(complex, st.floats(-10, 10), st.floats(-10, 10)),
                  min_size=2, max_size=60)


@settings(max_examples=200)
@given(points)
def test_calipers_diameter_matches_brute_force(pts):
    pts = np.array(pts)
    assert Geo.diameter(pts) == pytest.approx(_brute_diameter(pts), rel=1e-12, abs=1e-12)


@given(points)
def test_convex_hull_contains_every_point(pts):
    hull = Geo.convex_hull(np.array(pts))
    if len(hull) < 3:
        return
    for p in pts:
        for a, b in zip(hull, hull[1:] + hull[:1]):
            cross = (b[0] - a[0]) * (p.imag - a[1]) - (b[1] - a[1]) * (p.real - a[0])
            assert cross >= -1e-9


def test_diameter_on_envelopes_against_brute_force():
    xs = run(100, 200, seed=1).attachments
    env = Geo.envelope(xs, 100, m=300)
    assert Geo.diameter(env) == pytest.approx(_brute_diameter(env.points), rel=1e-12)


def test_diameter_monotone_under_refinement():
    xs = run(1000, 1000, seed=2).attachments
    prev = 0.0
    for m in (51, 101, 201, 401, 801, 1601):
        # linspace grids with m = 2^a * 50 + 1 are nested
        d = Geo.diameter(Geo.envelope(xs, 1000, m=m))
        assert d >= prev
        prev = d


def test_height_bound_values():
    assert Geo.height_bound(200, 100) == math.sqrt(2)
    assert Geo.height_bound(0, 100) == 0


def test_hcap_examples():
    assert Geo.hcap_estimate([0.0], 1) == pytest.approx(0.5, rel=1e-9)
    assert Geo.hcap_estimate([], 5) == 0
    xs = run(100, 200, seed=0).attachments
    assert Geo.hcap_estimate(xs, 100) == pytest.approx(1.0, rel=0.01)
    with pytest.raises(ValueError):
        Geo.hcap_estimate(xs, 100, y=1.0)


@pytest.mark.parametrize("k", [1, 10, 200, 2000])
def test_capacity_additivity(k):
    for seed in range(3):
        xs = run(100, k, seed=seed).attachments
        assert Geo.hcap_estimate(xs, 100) == pytest.approx(k / 200, rel=1e-6)


def test_summarize():
    xs = run(100, 100, seed=3).attachments
    g = Geo.summarize(xs, 100, m=500)
    assert g.t == 0.5
    assert g.max_height <= 1.0 + 1e-5 + 1e-6
    assert g.hcap_estimate == pytest.approx(0.5, rel=1e-6)
    assert g.diameter > 0
