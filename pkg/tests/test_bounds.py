import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rackrepair.acceptance import random_family_instance
from rackrepair.bounds import (beta_min, beta_min_closed_form, capacity_c, capacity_c_stated,
                               cutset_locality, cutset_mds, feasible, partial_cutset,
                               plugin_reduction_bound, r_min_direct, r_star,
                               singleton_locality_bound, threshold_f)
from rackrepair.flowgraph import min_cut, worst_case_graph

ONES = [1, 1, 1, 1]


def test_singleton_locality():
    assert singleton_locality_bound(12, 4, 2, 2) == 8
    assert singleton_locality_bound(12, 4, 2, 1) == 9
    assert singleton_locality_bound(12, 4, 4, 3) == 9
    with pytest.raises(ValueError):
        singleton_locality_bound(12, 4, 0, 2)


def test_cutset_mds():
    assert cutset_mds(4, 2, 4, 1) == Fraction(16, 3)
    assert cutset_mds(3, 3, 5, 1) == 15
    assert cutset_mds(5, 2, 1, 1) == Fraction(5, 4)
    with pytest.raises(ValueError):
        cutset_mds(2, 3, 4, 1)
    with pytest.raises(ValueError):
        cutset_mds(4, 2, 4, 0)


def test_cutset_locality():
    assert cutset_locality(3, 2, 2) == 3
    assert cutset_locality(4, 4, 3) == 12
    assert cutset_locality(5, 2, 7) == cutset_mds(5, 2, 7, 1)


def test_partial_cutset():
    assert partial_cutset(3, 2, 2, 2) == Fraction(3, 2)
    assert partial_cutset(3, 2, 1, 2) == 0
    assert partial_cutset(3, 2, 3, 2) == cutset_locality(3, 2, 2)
    assert partial_cutset(2, 2, 3, 2) == 4  # K = D: full download of the needed rows


def test_plugin_reduction_bound():
    assert plugin_reduction_bound(1, 3, 2, 2, 2, 2) == 3
    assert plugin_reduction_bound(2, 4, 2, 3, 1, 2) == 0


def test_capacity_examples():
    assert capacity_c(5, 3, 4, 2, [0] * 5, 4) == 12
    assert capacity_c(4, 2, 3, Fraction(1, 2), ONES, 2) == 4
    assert capacity_c(4, 2, 3, 0, [3, 1, 2, 5], 2) == 1 + 2
    assert capacity_c(4, 2, 3, Fraction(9, 20), ONES, 2) == Fraction(39, 10)


def test_feasibility_worked_example():
    assert feasible(4, 2, 3, Fraction(1, 2), ONES, 2)
    assert not feasible(4, 2, 3, Fraction(9, 20), ONES, 2)
    assert feasible(4, 2, 3, 0, [2, 3, 2, 2], 2)


def test_floats_rejected():
    with pytest.raises(TypeError):
        capacity_c(4, 2, 3, 0.5, ONES, 2)
    assert capacity_c(4, 2, 3, "1/2", ONES, 2) == 4


def test_family_preconditions():
    with pytest.raises(ValueError):
        capacity_c(4, 2, 4, 1, ONES, 2)
    with pytest.raises(ValueError):
        capacity_c(4, 2, 3, 1, [1, 1, 1], 2)
    with pytest.raises(ValueError):
        capacity_c(4, 2, 3, 1, [1, -1, 1, 1], 2)


def test_stated_capacity_overshoots_min_cut():
    args = (4, 2, 3, Fraction(4, 3), [0, 3, 1, 3], 3)
    realized = min_cut(worst_case_graph(*args))
    assert capacity_c(*args) == realized == Fraction(17, 3)
    assert capacity_c_stated(*args) == 6 > realized


def test_stated_capacity_agrees_on_ties():
    rng = random.Random(11)
    for _ in range(200):
        N, K, D, beta, _, r = random_family_instance(rng)
        s = [rng.randint(0, r)] * N
        assert capacity_c_stated(N, K, D, beta, s, r) == capacity_c(N, K, D, beta, s, r)


def test_capacity_is_permutation_invariant():
    rng = random.Random(12)
    for _ in range(100):
        N, K, D, beta, s, r = random_family_instance(rng)
        base = capacity_c(N, K, D, beta, s, r)
        for perm in itertools.islice(itertools.permutations(s), 6):
            assert capacity_c(N, K, D, beta, list(perm), r) == base


def test_beta_min_worked_example():
    assert beta_min(4, 2, 3, 2, ONES) == Fraction(1, 2)
    assert beta_min_closed_form(4, 2, 3, 2, ONES) == Fraction(1, 2)
    assert beta_min(4, 2, 3, 2, [2, 2, 3, 2]) == 0


def test_beta_min_none_when_helpers_cannot_cover():
    # K > D: the last failure has no outside helper and keeps nothing
    assert beta_min(3, 3, 2, 2, [0, 0, 0]) is None


def test_r_star_worked_example():
    assert r_star(4, 2, 3, Fraction(9, 20), ONES, 4) == (Fraction(21, 10), 1)
    assert r_star(4, 2, 3, Fraction(1, 2), ONES, 4) == (2, "top")
    assert r_star(4, 2, 3, 0, [2, 2, 2, 2], 4) == (2, "always")
    assert r_min_direct(4, 2, 3, Fraction(9, 20), ONES, 4) == Fraction(21, 10)


def test_r_star_rejects_negative_beta():
    with pytest.raises(ValueError):
        r_star(4, 2, 3, -1, ONES, 4)


def test_threshold_f_at_zero():
    assert threshold_f(2, 3, 0) == Fraction(1, 4)
    assert threshold_f(2, 3, 1) == Fraction(1, 5)


def test_partial_cutset_from_capacity():
    # uniform s = L - e reproduces the partial cut-set value as D * beta_min
    for D, K, L, e, delta in [(3, 2, 3, 2, 2), (4, 2, 5, 3, 2), (5, 3, 4, 4, 1)]:
        s = [L - e] * (D + 1)
        r = L - delta + 1
        b = beta_min(D + 1, K, D, r, s)
        assert D * b == partial_cutset(D, K, e, delta)


def test_r_star_matches_direct_solve():
    rng = random.Random(13)
    seen = 0
    for _ in range(3000):
        N, K, D, beta, s, r = random_family_instance(rng)
        M = K * r
        got = r_star(N, K, D, beta, s, M)
        direct = r_min_direct(N, K, D, beta, s, M)
        if got is None:
            assert not feasible(N, K, D, beta, s, r)
            continue
        seen += 1
        assert got[0] == direct
        assert (got[0] <= r) == feasible(N, K, D, beta, s, r)
    assert seen > 1000


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_feasibility_monotone_in_beta(seed):
    rng = random.Random(seed)
    N, K, D, beta, s, r = random_family_instance(rng)
    grid = sorted({beta * k / 4 for k in range(9)})
    flags = [feasible(N, K, D, b, s, r) for b in grid]
    assert flags == sorted(flags)
    values = [r_min_direct(N, K, D, b, s, K * r) for b in grid]
    finite = [v for v in values if v is not None]
    assert finite == sorted(finite, reverse=True)
    # once some storage suffices, it keeps sufficing as beta grows
    assert values[len(values) - len(finite):] == finite


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_beta_min_brackets_feasibility(seed):
    rng = random.Random(seed)
    N, K, D, _, s, r = random_family_instance(rng)
    b = beta_min(N, K, D, r, s)
    assert b == beta_min_closed_form(N, K, D, r, s)
    assert feasible(N, K, D, b, s, r)
    for eps in (Fraction(1, 10), Fraction(1, 1000)):
        if b - eps >= 0:
            assert not feasible(N, K, D, b - eps, s, r)
