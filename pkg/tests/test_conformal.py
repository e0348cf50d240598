import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from constrained_hl import conformal as C
from oracle_values import FROZEN

upper = st.builds(complex, st.floats(-5, 5), st.floats(1e-6, 5))
ns = st.integers(1, 10**6)
xs_ = st.floats(-2, 2)


def close(a, b, rel=1e-14):
    return abs(a - b) <= rel * max(1.0, abs(b))


# -- square root -------------------------------------------------------------

def test_sqrt_upper_examples():
    assert close(C.sqrt_upper(-2), FROZEN["sqrt_upper(-2)"])
    assert C.sqrt_upper(4) == 2
    assert close(C.sqrt_upper(3 - 0.004j), FROZEN["sqrt_upper(3-0.004j)"])
    assert C.sqrt_upper(-4 - 0j) == 2j
    assert C.sqrt_upper(0) == 0


@given(st.builds(complex, st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)))
def test_sqrt_upper_is_a_root_in_closed_upper_half_plane(w):
    r = C.sqrt_upper(w)
    assert r.imag >= 0
    assert abs(r * r - w) <= 1e-14 * max(1.0, abs(w)) + 1e-300


def test_sqrt_upper_extreme_magnitudes():
    for w in (1e-300j, -1e-310, 1e300 + 1e300j, -1e305):
        r = C.sqrt_upper(w)
        assert r.imag >= 0 and math.isfinite(abs(r))
        want = complex(mp.sqrt(mp.mpc(w)))
        want = want if want.imag >= 0 else -want
        assert abs(r - want) <= 1e-15 * abs(want)


# -- single slit -------------------------------------------------------------

def test_slit_forward_examples():
    assert C.slit_forward(0, 0, 4) == 0.5j
    assert close(C.slit_forward(1 + 1j, 0, 1), FROZEN["slit_forward(1+1j,0,1)"])
    assert close(C.slit_forward(0.3 + 0.2j, 0.1, 10), FROZEN["slit_forward(0.3+0.2j,0.1,10)"])
    w = C.slit_forward(-2 + 1e-6j, 0, 1)
    ref = FROZEN["slit_forward(-2+1e-6j,0,1)"]
    assert close(w.real, ref.real) and abs(w.imag - ref.imag) <= 1e-12 * ref.imag


def test_slit_forward_on_real_axis():
    # outside the base the real line maps to itself, sign preserved
    assert C.slit_forward(2, 0, 1) == math.sqrt(3)
    assert C.slit_forward(-2, 0, 1) == -math.sqrt(3)
    # inside the base points land on the slit
    assert C.slit_forward(0.5, 0.5, 4) == complex(0.5, 0.5)
    w = C.slit_forward(0.3, 0.0, 4)
    assert w.real == 0 and close(w.imag, math.sqrt(0.25 - 0.09))


def test_slit_inverse_examples():
    assert close(C.slit_inverse(2, 0, 1), FROZEN["slit_inverse(2,0,1)"])
    assert C.slit_inverse(-2, 0, 1) == -math.sqrt(5)
    # the slit tip goes back to the base point
    assert abs(C.slit_inverse(0.5j, 0, 4)) < 1e-15


@given(upper, xs_, ns)
def test_branch_consistency(z, x, n):
    assert C.slit_forward(z, x, n).imag > 0
    assert C.slit_inverse(z, x, n).imag >= 0


@given(upper, xs_, st.integers(1, 10**4))
def test_inverse_identity(z, x, n):
    w = C.slit_forward(z, x, n)
    assert abs(C.slit_inverse(w, x, n) - z) <= 1e-10 * (1 + abs(z))


def test_inverse_identity_grid():
    rng = np.random.default_rng(3)
    zs = rng.uniform(-3, 3, 1000) + 1j * rng.uniform(1e-4, 3, 1000)
    for z in zs:
        x = rng.uniform(-1, 1)
        n = int(rng.integers(1, 1000))
        assert abs(C.slit_inverse(C.slit_forward(z, x, n), x, n) - z) <= 1e-10 * (1 + abs(z))


def test_near_branch_point_accuracy():
    # next to the slit base, against 50-digit arithmetic with the same
    # (rounded) slit height; the input rounding of 1/sqrt(n) itself is not
    # the map's to undo
    mp.mp.dps = 50
    for n in (1, 100, 10**6):
        h = math.sqrt(1.0 / n)
        for z in (complex(h, 1e-12), complex(-h, 1e-9), complex(h * (1 + 1e-10), 1e-14)):
            got = C.slit_forward(z, 0.0, n)
            r = mp.sqrt(mp.mpc(z) ** 2 - mp.mpf(h) ** 2)
            r = r if mp.im(r) >= 0 else -r
            assert abs(got - complex(r)) <= 1e-14 * abs(complex(r))


@pytest.mark.parametrize("n", [1, 4, 100])
@pytest.mark.parametrize("y", [1e3, 1e4])
def test_hydrodynamic_normalisation(n, y):
    w = 1j * y
    cap = (1j * y * (C.slit_inverse(w, 0.0, n) - w)).real
    assert abs(cap - 1 / (2 * n)) <= 1e-2 / (2 * n)


def test_single_slit_capacity_oracle():
    w = 1e3j
    assert close((1j * 1e3 * (C.slit_inverse(w, 0.0, 1) - w)).real,
                 FROZEN["hcap_single(n=1,y=1e3)"].real, rel=1e-9)


# -- compositions ------------------------------------------------------------

def test_compose_examples():
    assert C.compose_forward(0, [0, 1], 1) == FROZEN["compose_forward(0,[0,1],1)"]
    got = C.compose_forward(0.2 + 0.5j, [0, 0.3, -0.1], 10)
    assert close(got, FROZEN["compose_forward(0.2+0.5j,[0,0.3,-0.1],10)"])
    assert C.compose_forward(1 + 1j, [], 7) == 1 + 1j


def test_compose_order_is_innermost_first():
    xs = [0.0, 0.4]
    z = 0.1 + 0.3j
    assert C.compose_forward(z, xs, 10) == C.slit_forward(C.slit_forward(z, 0.4, 10), 0.0, 10)
    w = 0.2 + 0.9j
    assert C.compose_inverse(w, xs, 10) == C.slit_inverse(C.slit_inverse(w, 0.0, 10), 0.4, 10)


def test_compose_accepts_arrays():
    zs = np.array([0.1 + 0.2j, -0.5 + 1j])
    got = C.compose_forward(zs, [0, 0.2], 10)
    assert got.shape == (2,)
    assert got[1] == C.compose_forward(zs[1], [0, 0.2], 10)


@settings(max_examples=50)
@given(upper, st.lists(st.floats(-0.5, 0.5), min_size=1, max_size=30), st.integers(10, 1000))
def test_compose_round_trip(z, xs, n):
    w = C.compose_forward(z, xs, n)
    assert w.imag > 0
    assert abs(C.compose_inverse(w, xs, n) - z) <= 1e-9 * (1 + abs(z))


# -- endpoint recursion ------------------------------------------------------

def test_endpoint_update_examples():
    h = 0.5
    L1, R1 = C.endpoint_update(h, h, h, 4)
    assert R1 - h == h  # attachment at the right end pushes by the slit height
    L, R = 0.7, 1.3
    _, R1 = C.endpoint_update(L, R, -L, 4)
    lam = L + R
    assert close(R1 - R, math.sqrt(lam * lam + 0.25) - lam)
    assert R1 - R <= 1 / (2 * 4 * lam)


def test_endpoint_update_rejects_outside():
    with pytest.raises(ValueError):
        C.endpoint_update(1.0, 1.0, 1.5, 4)
    with pytest.raises(ValueError):
        C.endpoint_update(-0.1, 1.0, 0.0, 4)


@given(st.floats(0, 10), st.floats(0, 10), st.floats(0, 1), ns)
def test_endpoint_update_monotone_capped_reflected(L, R, u, n):
    x = u * R - (1 - u) * L
    L1, R1 = C.endpoint_update(L, R, x, n)
    h = 1 / math.sqrt(n)
    assert L1 > L and R1 > R
    # the cap is exact up to the rounding of the new endpoint
    assert R1 - R <= h * (1 + 1e-15) + math.ulp(R1)
    assert L1 - L <= h * (1 + 1e-15) + math.ulp(L1)
    assert (L1, R1) == C.endpoint_update(R, L, -x, n)[::-1]


def test_endpoint_update_matches_inverse_map():
    # R' is the image of the right end under the new particle's mapping-out function
    for L, R, x, n in [(0.3, 0.4, 0.1, 100), (1.0, 2.0, -0.5, 7), (0.2, 0.2, 0.2, 25)]:
        L1, R1 = C.endpoint_update(L, R, x, n)
        assert close(R1, C.slit_inverse(R, x, n).real)
        assert close(-L1, C.slit_inverse(-L, x, n).real)


# -- push bounds ----------------------------------------------------------------

def test_push_bounds_example():
    lo, hi = C.push_bounds(1.0, 0.5, 4)
    assert close(lo, 0.1875) and close(hi, 0.25)
    p = C.endpoint_update(1.0, 1.0, 0.5, 4)[1] - 1.0
    assert close(p, FROZEN["push(1,0.5,4)"].real)
    assert lo <= p <= hi


def test_push_bounds_vanish_far_away():
    lo, hi = C.push_bounds(1e8, 0.0, 10)
    assert 0 < hi < 1e-9 and abs(lo) < 1e-9


def test_push_bounds_precondition():
    with pytest.raises(ValueError):
        C.push_bounds(1.0, 0.95, 100)


@given(st.floats(0, 5), st.floats(1 + 1e-9, 5), st.integers(1, 10**4))
def test_push_bracket_property(R, mult, n):
    h = 1 / math.sqrt(n)
    x = R - mult * h
    lo, hi = C.push_bounds(R, x, n)
    d = R - x
    exact = 1.0 / (n * (d + math.sqrt(d * d + 1.0 / n)))
    assert lo <= exact <= hi
