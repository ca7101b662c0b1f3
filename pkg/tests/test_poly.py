import random

import pytest
from hypothesis import given, settings, strategies as st

from rackrepair.field import get_field
from rackrepair.poly import (DEG_ZERO, Polynomial, crt_combine, nth_roots, nth_roots_exhaustive,
                             poly_divmod, poly_interpolate, roots_of_shifted)

F13 = get_field(13, 1)


def P(*coeffs, F=F13):
    """Polynomial from coefficients, lowest degree first."""
    return Polynomial(F, [F.coerce(c) for c in coeffs])


def el(v, F=F13):
    return F.element(F.coerce(v))


def test_divmod_by_hand():
    f = P(11, 5, 0, 10, 1)  # x^4 + 10x^3 + 5x + 11
    g = P(-1, 0, 0, 1)  # x^3 - 1
    q, r = poly_divmod(f, g)
    assert q == P(10, 1)
    assert r == P(8, 6)


def test_divmod_trivial_cases():
    f = P(3, 1, 4)
    assert poly_divmod(f, f) == (P(1), P())
    g = P(1, 0, 0, 5)
    assert poly_divmod(f, g) == (P(), f)
    with pytest.raises(ZeroDivisionError):
        poly_divmod(f, P())


def test_zero_polynomial_degree():
    assert P().degree == DEG_ZERO
    assert (P() * P(1, 2)).degree == DEG_ZERO


def test_interpolate_two_points():
    assert poly_interpolate([(el(1), el(1)), (el(3), el(0))]) == P(8, 6)
    assert poly_interpolate([(el(4), el(9))]) == P(9)
    assert poly_interpolate([(el(1), el(0)), (el(2), el(0))]) == P()


def test_interpolate_rejects_repeated_x():
    with pytest.raises(ValueError):
        poly_interpolate([(el(1), el(1)), (el(1), el(2))])


def test_crt_examples():
    got = crt_combine([(P(-1, 0, 0, 1), P(8, 6)), (P(-8, 0, 0, 1), P())])
    assert got == P(11, 5, 0, 10, 1)
    F5 = get_field(5, 1)
    got = crt_combine([(P(-1, 1, F=F5), P(3, F=F5)), (P(-2, 1, F=F5), P(1, F=F5))])
    assert got == P(0, 3, F=F5)
    assert crt_combine([(P(-1, 0, 0, 1), P(8, 6))]) == P(8, 6)


def test_crt_rejects_non_coprime_moduli():
    with pytest.raises(ValueError, match="coprime"):
        crt_combine([(P(-1, 1), P(1)), (P(-1, 1), P(2))])


def test_nth_roots_gf13():
    assert [r.value for r in nth_roots(el(8), 3)] == [2, 5, 6]
    assert [r.value for r in nth_roots(el(1), 3)] == [1, 3, 9]
    assert [r.value for r in nth_roots(el(0), 3)] == [0]
    assert nth_roots(el(2), 3) == []


@pytest.mark.parametrize("n,w", [(8, 3), (8, 5), (8, 15), (12, 9), (6, 7), (10, 33)])
def test_nth_roots_match_exhaustive_gf2(n, w):
    F = get_field(2, n)
    rng = random.Random(w)
    for _ in range(8):
        y = F.element(F.pow(F.random_nonzero_raw(rng), w))
        assert nth_roots(y, w) == nth_roots_exhaustive(y, w)


def test_nth_roots_large_field():
    F = get_field(2, 210)
    rng = random.Random(0)
    x = F.element(F.random_nonzero_raw(rng))
    y = x ** 3
    roots = nth_roots(y, 3)
    assert len(roots) == 3
    assert x in roots
    assert all(r ** 3 == y for r in roots)


def test_roots_of_shifted():
    h = P(0, 0, 0, 1)
    assert [r.value for r in roots_of_shifted(h, el(12))] == [4, 10, 12]
    assert roots_of_shifted(h, el(2)) == []
    assert [r.value for r in roots_of_shifted(P(0, 1), el(7))] == [7]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 12), max_size=7), st.lists(st.integers(0, 12), min_size=1,
                                                          max_size=5))
def test_divmod_identity(fc, gc):
    f, g = P(*fc), P(*gc)
    if g.is_zero():
        return
    q, r = poly_divmod(f, g)
    assert q * g + r == f
    assert r.degree < g.degree


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=1, max_size=6, unique=True), st.data())
def test_interpolation_passes_through_points(xs, data):
    ys = data.draw(st.lists(st.integers(0, 12), min_size=len(xs), max_size=len(xs)))
    f = poly_interpolate([(el(x), el(y)) for x, y in zip(xs, ys)])
    assert f.degree < len(xs)
    for x, y in zip(xs, ys):
        assert f(el(x)) == el(y)


def test_json_roundtrip():
    f = P(11, 5, 0, 10, 1)
    assert Polynomial.from_json(F13, f.to_json()) == f
