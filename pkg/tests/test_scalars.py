from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from heiscf.scalars import (
    GaussianInt, GaussianRational, gint_gcd, gint_norm, grat_reduce, mp_context, precision_of,
    to_bigcomplex, to_bigfloat,
)

ints = st.integers(-10 ** 6, 10 ** 6)
gints = st.builds(GaussianInt, ints, ints)
nonzero_gints = gints.filter(bool)


@given(gints, gints, gints)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == 0


@given(gints, gints)
def test_norm_is_multiplicative(a, b):
    assert gint_norm(a * b) == gint_norm(a) * gint_norm(b)
    assert (a * a.conjugate()).re == a.norm()


@given(gints, nonzero_gints)
def test_division_remainder_is_small(a, b):
    q, r = a.divmod_round(b)
    assert a == q * b + r
    # rounding the quotient keeps the remainder within half a lattice step
    assert 2 * r.norm() <= b.norm()


@given(nonzero_gints, nonzero_gints)
def test_gcd_divides_both(a, b):
    g = gint_gcd(a, b)
    for x in (a, b):
        _, r = x.divmod_round(g)
        assert not r
    assert g.re > 0 and g.im >= 0


def test_gcd_examples():
    assert gint_gcd(GaussianInt(4, 2), 6) == GaussianInt(2, 0)
    # 5 = (2+i)(2-i); gcd with 2+i is an associate of 2+i
    assert gint_gcd(5, GaussianInt(2, 1)).norm() == 5


def test_rational_normal_form():
    a = GaussianRational(2, 4, 6)
    assert (a.re_num, a.im_num, a.den) == (1, 2, 3)
    assert GaussianRational(1, 1, -2) == GaussianRational(-1, -1, 2)
    assert (GaussianInt(1, 1) / GaussianInt(1, -1)) == GaussianInt(0, 1)
    assert grat_reduce((GaussianInt(2, 2), GaussianInt(4, 0))) == GaussianRational(1, 1, 2)
    with pytest.raises(ZeroDivisionError):
        grat_reduce((GaussianInt(1), GaussianInt(0)))


@given(gints, nonzero_gints, gints, nonzero_gints)
def test_field_operations(a, b, c, d):
    x, y = a / b, c / d
    assert (x + y) - y == x
    if y:
        assert (x * y) / y == x
    assert x.abs2() == x.real ** 2 + x.imag ** 2


@given(gints, nonzero_gints)
def test_reduced_is_coprime(a, b):
    x = a / b
    num, den = x.reduced()
    assert GaussianRational.coerce(num) / den == x
    if num:
        assert gint_gcd(num, den).norm() == 1


def test_bigcomplex_rounds_once():
    x = GaussianRational(1, 1, 3)
    z = to_bigcomplex(x, 128)
    assert precision_of(z.real) == 128
    with mpmath.workprec(400):
        exact = mpmath.mpf(1) / 3
        assert abs(mpmath.mpf(z.real) - exact) <= mpmath.ldexp(exact, -128)
    assert to_bigfloat(Fraction(1, 2), 64) == mp_context(64).mpf(0.5)
    with pytest.raises(ValueError):
        mp_context(4)


def test_mixed_promotion():
    ctx = mp_context(80)
    z = ctx.mpc(1, 2)
    assert GaussianInt(1, 1) * z == ctx.mpc(-1, 3)
    assert GaussianRational(1, 0, 2) + z == ctx.mpc(1.5, 2)
    assert GaussianInt(2) * 0.5 == 1
