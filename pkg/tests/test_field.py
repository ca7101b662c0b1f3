import random

import pytest
from hypothesis import given, settings, strategies as st

from rackrepair.field import (FieldSpec, GF, dual_basis, dual_basis_raw, element_degree,
                              extension, find_independent_multipliers, frobenius_power,
                              get_field, irreducible_poly, subfield, trace_to_subfield)


@pytest.fixture
def gf4():
    return get_field(2, 2)


def test_prime_field_multiplication():
    F = get_field(13, 1)
    assert F.element(7) * F.element(8) == F.element(4)
    assert F.element(5) * F.element(1) == F.element(5)


def test_gf4_omega_squared(gf4):
    w = gf4.element(2)
    assert w * w == w + 1
    assert frobenius_power(w, 1) == w + 1
    assert frobenius_power(w, 0) == w


def test_prime_field_frobenius_is_identity():
    F = get_field(13, 1)
    for k in range(4):
        assert frobenius_power(F.element(6), k) == F.element(6)


def test_trace_gf4_to_gf2(gf4):
    sub = subfield(gf4, 1)
    assert trace_to_subfield(gf4.element(2), sub).value == 1
    assert trace_to_subfield(gf4.element(1), sub).value == 0
    assert trace_to_subfield(gf4.element(0), sub).value == 0


def test_dual_basis_gf4(gf4):
    sub = subfield(gf4, 1)
    w = gf4.element(2)
    pair = dual_basis(sub, [gf4.element(1), w])
    assert list(pair.dual) == [w * w, gf4.element(1)]


def test_dual_basis_gf8_verified_by_trace_matrix():
    F = get_field(2, 3)
    assert irreducible_poly(2, 3) == (1, 1, 0, 1)  # z^3 = z + 1
    sub = subfield(F, 1)
    z = F.element(2)
    basis = [F.element(1), z, z * z]
    pair = dual_basis(sub, basis)
    for i, b in enumerate(basis):
        for j, d in enumerate(pair.dual):
            assert sub.trace(b * d).value == (1 if i == j else 0)


def test_dependent_basis_names_combination(gf4):
    sub = subfield(gf4, 1)
    with pytest.raises(ValueError, match="vanishing combination"):
        dual_basis_raw(sub, [2, 2])


def test_element_degree():
    F = get_field(2, 6)
    assert element_degree(F.element(0)) == 1
    assert element_degree(F.generator) == 6
    omega = subfield(F, 2).embed_raw(2)
    assert element_degree(F.element(omega)) == 2


def test_find_independent_multipliers_gf4(gf4):
    sub = subfield(gf4, 1)
    got = find_independent_multipliers(sub, gf4.element(2), 2)
    assert [g.value for g in got] == [1]


def test_find_independent_multipliers_counts():
    F = get_field(2, 12)
    sub = subfield(F, 2)  # index 6
    y = F.element(F.coerce(5))
    gammas = find_independent_multipliers(sub, y, 2, rng_seed=3)
    assert len(gammas) == 3
    with pytest.raises(ValueError):
        find_independent_multipliers(sub, y, 4)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 7, 30, 42, 70, 105])
def test_subfield_embedding_roundtrip_gf2_210(d):
    F = get_field(2, 210)
    sub = subfield(F, d)
    rng = random.Random(d)
    for _ in range(5):
        s = sub.small.random_raw(rng)
        t = sub.small.random_raw(rng)
        e = sub.embed_raw(s)
        assert sub.contains_raw(e)
        assert sub.project_raw(e) == s
        # closed under the parent operations
        assert sub.project_raw(F.mul(e, sub.embed_raw(t))) == sub.small.mul(s, t)
        assert sub.project_raw(F.add(e, sub.embed_raw(t))) == sub.small.add(s, t)


def test_project_rejects_outside_element():
    F = get_field(2, 6)
    sub = subfield(F, 3)
    outside = next(a for a in range(F.q) if not sub.contains_raw(a))
    with pytest.raises(ValueError):
        sub.project_raw(outside)


def test_subfield_degree_must_divide():
    with pytest.raises(ValueError):
        subfield(get_field(2, 6), 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 12 - 1), st.integers(0, 2 ** 12 - 1), st.integers(0, 2 ** 3 - 1))
def test_trace_is_subfield_linear(a, b, c):
    F = get_field(2, 12)
    sub = subfield(F, 3)
    ce = sub.embed_raw(c)
    lhs = sub.trace_raw(F.add(F.mul(ce, a), b))
    rhs = sub.small.add(sub.small.mul(c, sub.trace_raw(a)), sub.trace_raw(b))
    assert lhs == rhs


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 13 ** 2 - 1), st.integers(0, 13 ** 2 - 1))
def test_gf169_field_axioms(a, b):
    F = get_field(13, 2)
    x, y = F.element(F.coerce(a)), F.element(F.coerce(b))
    assert x * x.inverse() == F.element(1)
    assert (x + y) * x == x * x + y * x
    assert x ** (F.q - 1) == F.element(1)


def test_irreducible_polys_are_least():
    assert irreducible_poly(2, 2) == (1, 1, 1)
    assert irreducible_poly(2, 8) == (1, 1, 0, 1, 1, 0, 0, 0, 1)


def test_field_spec_json_roundtrip():
    F = get_field(2, 8)
    spec = F.spec
    assert FieldSpec.from_json(spec.to_json()) == spec


def test_rejects_reducible_modulus():
    with pytest.raises(ValueError):
        GF(2, 2, (1, 0, 1))


def test_extension_field_trace_and_inverse():
    base = get_field(2, 4)
    E = extension(base, 3)
    rng = random.Random(1)
    for _ in range(10):
        a = E.random_raw(rng)
        if a == E.zero:
            continue
        assert E.mul(a, E.inv(a)) == E.one
        t = E.rel_trace(a)
        # the relative trace is Frobenius-fixed over the base field
        assert E.frob(E.lift(t), 4) == E.lift(t)
    assert extension(base, 1) is base


def test_extension_field_subfield_delegates():
    base = get_field(2, 6)
    E = extension(base, 2)
    sub = subfield(E, 3)
    rng = random.Random(4)
    for _ in range(5):
        s = sub.small.random_raw(rng)
        assert sub.project_raw(sub.embed_raw(s)) == s
