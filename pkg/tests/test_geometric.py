import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heiscf.geometric import (
    HPoint, IDENTITY, InversionOfIdentity, UNIT_BALL_VOLUME, ball_fraction, dilate, dist4, gauge4,
    inv, inversion_jacobian_mc, koranyi_inv, left_divide, mul, rotate,
)

from oracles import heis_gauge4, heis_inv_koranyi, heis_mul, unit_ball_volume_quadrature

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=50)
points = st.builds(HPoint, fracs, fracs, fracs)
nonzero = points.filter(lambda h: not h.is_identity())


@given(points, points)
def test_product_matches_oracle(a, b):
    assert tuple(mul(a, b)) == heis_mul(tuple(a), tuple(b))


@given(points, points, points)
def test_group_laws(a, b, c):
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, inv(a)) == IDENTITY
    assert left_divide(a, b) == mul(inv(a), b)


@given(nonzero)
def test_inversion_matches_oracle_and_is_involution(h):
    assert tuple(koranyi_inv(h)) == heis_inv_koranyi(tuple(h))
    assert koranyi_inv(koranyi_inv(h)) == h
    assert gauge4(koranyi_inv(h)) * gauge4(h) == 1


@given(nonzero, nonzero)
def test_inversion_scales_distance(h, k):
    assert dist4(koranyi_inv(h), koranyi_inv(k)) * gauge4(h) * gauge4(k) == dist4(h, k)


@given(points, points, points)
def test_left_invariance(g, h, k):
    assert dist4(mul(g, h), mul(g, k)) == dist4(h, k)
    assert gauge4(h) == heis_gauge4(tuple(h))


def test_inversion_of_identity_raises():
    with pytest.raises(InversionOfIdentity):
        koranyi_inv(IDENTITY)


def test_integer_input_stays_exact():
    assert koranyi_inv(HPoint(1, 0, 1)) == HPoint(Fraction(-1, 2), Fraction(1, 2), Fraction(-1, 2))


def test_dilation_and_rotation():
    h = HPoint(Fraction(1, 3), Fraction(-1, 2), Fraction(2, 7))
    assert gauge4(dilate(3, h)) == 81 * gauge4(h)
    r = rotate((0, 1), h)
    assert (r.x, r.y, r.t) == (Fraction(1, 2), Fraction(1, 3), Fraction(2, 7))
    with pytest.raises(ValueError):
        rotate(2, h)


def test_ball_volume_against_quadrature():
    assert math.isclose(UNIT_BALL_VOLUME, unit_ball_volume_quadrature(), rel_tol=1e-10)
    frac = ball_fraction(1.0, 400_000, np.random.default_rng(3))
    # box volume is 2*2*2 = 8
    assert abs(8 * frac / UNIT_BALL_VOLUME - 1) < 0.01


def test_jacobian_single_point():
    h = HPoint(0.3, -0.2, 0.4)
    j = inversion_jacobian_mc(h, 200_000, np.random.default_rng(5))
    assert abs(j * gauge4(h) ** 2 - 1) < 0.03


def test_vectorised_arrays():
    xs = np.array([0.5, 1.0])
    h = HPoint(xs, xs, xs)
    np.testing.assert_allclose(gauge4(h), (2 * xs ** 2) ** 2 + xs ** 2)
