import random

import pytest

from rackrepair.field import get_field
from rackrepair.grs import (GrsCode, dual_multipliers, grs_encode, grs_erasure_decode)
from rackrepair.poly import Polynomial

F13 = get_field(13, 1)
Y = [1, 8, 12, 5]


def P(*coeffs, F=F13):
    return Polynomial(F, [F.coerce(c) for c in coeffs])


def test_encode_example():
    code = GrsCode(F13, 2, Y)
    assert [c.value for c in grs_encode(code, P(11, 10))] == [8, 0, 1, 9]


def test_encode_constant_and_zero():
    code = GrsCode(F13, 2, Y, multipliers=(2, 3, 4, 5))
    assert [c.value for c in grs_encode(code, P(3))] == [6, 9, 12, 2]
    assert all(c.value == 0 for c in grs_encode(code, P()))


def test_dual_multipliers_example():
    theta = dual_multipliers(GrsCode(F13, 2, Y))
    assert [t.value for t in theta] == [10, 2, 3, 11]


def test_dual_multipliers_length_two():
    a, b = 3, 7
    theta = dual_multipliers(GrsCode(F13, 1, [a, b]))
    assert theta[0].value == F13.inv(F13.sub(a, b))
    assert theta[1].value == F13.inv(F13.sub(b, a))
    word = grs_encode(GrsCode(F13, 1, [a, b]), P(5))
    assert sum((t * c for t, c in zip(theta, word)), F13.element(0)) == F13.element(0)


def test_dual_is_orthogonal_random():
    rng = random.Random(0)
    for _ in range(50):
        F = get_field(rng.choice([5, 7, 13]), 1) if rng.random() < 0.3 else get_field(2, 6)
        n = rng.randint(2, min(F.q - 1, 8))
        locators = rng.sample(range(F.q), n)
        k = rng.randint(1, n - 1)
        mult = [F.random_nonzero_raw(rng) for _ in range(n)]
        code = GrsCode(F, k, locators, mult)
        dual = code.dual()
        for _ in range(3):
            f = Polynomial.from_raw(F, [F.random_raw(rng) for _ in range(k)])
            g = Polynomial.from_raw(F, [F.random_raw(rng) for _ in range(n - k)])
            c, d = grs_encode(code, f), grs_encode(dual, g)
            assert sum((x * y for x, y in zip(c, d)), F.element(0)) == F.element(0)


def test_erasure_decode_roundtrip():
    code = GrsCode(F13, 2, Y)
    word = grs_encode(code, P(11, 10))
    known = [(i, c.value) for i, c in enumerate(word)]
    assert grs_erasure_decode(code, known) == P(11, 10)
    assert grs_erasure_decode(code, known[2:]) == P(11, 10)


def test_erasure_decode_needs_dimension():
    code = GrsCode(F13, 2, Y)
    with pytest.raises(ValueError):
        grs_erasure_decode(code, [(0, 8)])


def test_locators_must_be_distinct():
    with pytest.raises(ValueError):
        GrsCode(F13, 1, [1, 1])
