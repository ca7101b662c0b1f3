import dataclasses
import random
from fractions import Fraction

import pytest

from rackrepair.bounds import cutset_locality, partial_cutset
from rackrepair.repair import (ErasurePattern, HypothesisError, NaiveGrsPlugin, RepairError,
                               multi_collect, multi_helper_message, plan_cross_ratio,
                               plan_multi_partial, repair_full_rack, repair_multi_partial,
                               repair_partial_single, repair_via_grs_plugin, w_star)
from rackrepair.tamo_barg import encode_raw, named_instance, random_message


@pytest.fixture(scope="module")
def tower():
    return named_instance("tower210")


def codeword(config, seed):
    return encode_raw(config, random_message(config, random.Random(seed)))[0]


def punctured(config, cw, erasures):
    cols = {j: list(cw.columns[j]) for j in range(config.m)}
    for i, pos in erasures.items():
        for p in pos:
            cols[i][p] = None
    return cols


def test_w_star():
    assert w_star(2, 2) == 1
    assert w_star(2, 3) == 2
    assert w_star(4, 6) == 2
    assert w_star(3, 7) == 3


@pytest.mark.parametrize("i,total", [(0, 4), (1, 3), (2, 3), (3, 3)])
def test_full_rack_totals(tower, i, total):
    cw = codeword(tower, i)
    cols = {j: cw.columns[j] for j in range(tower.m) if j != i}
    col, transcript, rep = repair_full_rack(tower, cols, i)
    assert list(col) == list(cw.columns[i])
    assert rep.total == total == rep.bound
    assert rep.optimal
    assert rep.bound == cutset_locality(rep.D, tower.m1, tower.r)
    transcript.verify(2)


def test_full_rack_variant_ii_needs_divisibility(tower):
    cw = codeword(tower, 0)
    cols = {j: cw.columns[j] for j in range(1, tower.m)}
    repair_full_rack(tower, cols, 0, "II")
    cols = {j: cw.columns[j] for j in range(tower.m) if j != 1}
    with pytest.raises(HypothesisError, match=r"w\*_i \| w_i"):
        repair_full_rack(tower, cols, 1, "II")


def test_full_rack_rejects_unknown_variant_and_missing_helper(tower):
    cw = codeword(tower, 0)
    cols = {j: cw.columns[j] for j in range(1, tower.m)}
    with pytest.raises(ValueError):
        repair_full_rack(tower, cols, 0, "III")
    del cols[1]
    with pytest.raises(RepairError):
        repair_full_rack(tower, cols, 0, helpers=[1, 2])


def test_full_rack_many_codewords(tower):
    for seed in range(10):
        cw = codeword(tower, 100 + seed)
        for i in range(tower.m):
            cols = {j: cw.columns[j] for j in range(tower.m) if j != i}
            assert list(repair_full_rack(tower, cols, i)[0]) == list(cw.columns[i])


def test_helper_messages_live_in_small_subfields(tower):
    cw = codeword(tower, 5)
    cols = {j: cw.columns[j] for j in range(tower.m) if j != 2}
    _, transcript, rep = repair_full_rack(tower, cols, 2)
    for j in transcript.helpers:
        for d, v in transcript.messages[j]:
            assert d == rep.subfield_degree[j] < tower.field.degree
            assert 0 <= v < 2 ** d


@pytest.mark.parametrize("packing", ["auto", "cross-ratio", "padded", "reduced"])
@pytest.mark.parametrize("erased", [[0, 1], [1, 2], [0, 2], [0, 1, 2]])
def test_partial_packings_are_exact(tower, packing, erased):
    for i in range(tower.m):
        cw = codeword(tower, 10 * i + len(erased))
        cols = punctured(tower, cw, {i: erased})
        rec, transcript, _ = repair_partial_single(tower, cols, i, erased, packing=packing)
        assert rec == {p: cw.columns[i][p] for p in erased}
        transcript.verify(2)


def test_cross_ratio_reaches_three_halves(tower):
    cw = codeword(tower, 7)
    for i in (1, 2, 3):
        cols = punctured(tower, cw, {i: [0, 2]})
        _, transcript, rep = repair_partial_single(tower, cols, i, [0, 2])
        assert rep.scheme == "partial-cross-ratio"
        assert rep.D == 3
        assert all(d == 105 for d in rep.subfield_degree.values())
        assert rep.total == Fraction(3, 2) == partial_cutset(3, 2, 2, 2)
        assert rep.optimal
    cols = punctured(tower, cw, {0: [0, 1]})
    _, _, rep = repair_partial_single(tower, cols, 0, [0, 1])
    assert (rep.D, rep.total) == (2, 2)


def test_padded_packing_pays_for_padding(tower):
    cw = codeword(tower, 8)
    cols = punctured(tower, cw, {1: [0, 1]})
    _, _, rep = repair_partial_single(tower, cols, 1, [0, 1], packing="padded")
    assert rep.total == 3
    assert not rep.optimal


def test_partial_with_all_erased_matches_full_rack(tower):
    cw = codeword(tower, 9)
    for i in range(tower.m):
        full = repair_full_rack(tower, {j: cw.columns[j] for j in range(tower.m) if j != i}, i)[2]
        cols = punctured(tower, cw, {i: range(tower.L)})
        _, _, rep = repair_partial_single(tower, cols, i, list(range(tower.L)))
        assert rep.total == full.total


def test_partial_below_delta_is_local(tower):
    cw = codeword(tower, 1)
    cols = punctured(tower, cw, {1: [0]})
    with pytest.raises(RepairError, match="local repair"):
        repair_partial_single(tower, cols, 1, [0])
    with pytest.raises(RepairError):
        repair_partial_single(tower, cols, 1, [0, 5])


def test_partial_rejects_corrupted_helper():
    c = named_instance("tower210")
    cw = codeword(c, 3)
    cols = punctured(c, cw, {1: [0, 1]})
    cols[0][0] ^= 1
    with pytest.raises(ValueError, match="not a codeword column"):
        repair_partial_single(c, cols, 1, [0, 1])


def test_cross_ratio_hypotheses():
    c = named_instance("gf13")
    with pytest.raises(HypothesisError, match="no helper subfields"):
        plan_cross_ratio(c, 0)
    tower = named_instance("tower210")
    with pytest.raises(RepairError):
        plan_cross_ratio(tower, 1, helpers=[0, 2])


def test_prime_field_has_no_partial_trace_scheme():
    c = named_instance("gf13")
    cw = codeword(c, 0)
    cols = punctured(c, cw, {0: [0, 1]})
    with pytest.raises(HypothesisError):
        repair_partial_single(c, cols, 0, [0, 1])


@pytest.mark.parametrize("name,sizes,M", [("gf64", (2,), 1), ("gf64", (3,), 2),
                                          ("gf256", (4, 5), 5), ("gf256", (3,), 1)])
def test_multi_partial(name, sizes, M):
    c = named_instance(name)
    rng = random.Random(f"{name}{sizes}")
    for _ in range(3):
        cw = encode_raw(c, random_message(c, rng))[0]
        racks = rng.sample(range(c.m), len(sizes))
        pattern = ErasurePattern({i: sorted(rng.sample(range(c.L), e))
                                  for i, e in zip(racks, sizes)})
        cols = punctured(c, cw, pattern.erased)
        rec, transcript, rep = repair_multi_partial(c, cols, pattern)
        for i in rec:
            assert rec[i] == {p: cw.columns[i][p] for p in pattern.erased[i]}
        assert set(rep.per_helper_symbols.values()) == {M}
        assert rep.D == c.m - len(sizes)
        assert set(rep.subfield_degree.values()) == {c.common_subfield.d}
        assert (rep.bound is None) == (len(sizes) > 1)
        transcript.verify(2)


def test_multi_partial_needs_enough_parity():
    c = named_instance("gf64")
    pattern = ErasurePattern({0: [0, 1], 1: [0, 1]})
    with pytest.raises(HypothesisError, match="m2"):
        plan_multi_partial(c, pattern)


def test_multi_partial_rejects_sub_delta_rack():
    c = named_instance("gf256")
    with pytest.raises(RepairError, match="locally"):
        plan_multi_partial(c, ErasurePattern({0: [0, 1, 2], 1: [0]}))


def test_multi_partial_needs_dual_multipliers():
    # dropping the dual multipliers from the helper side breaks recovery
    c = named_instance("gf256")
    cw = codeword(c, 4)
    pattern = ErasurePattern({2: [0, 1, 2, 3]})
    plan = plan_multi_partial(c, pattern)
    good = multi_collect(plan, {t: multi_helper_message(plan, t, cw.columns[t])
                                for t in plan.helpers})
    ones = dataclasses.replace(plan, theta=tuple(c.field.one for _ in plan.theta))
    bad = multi_collect(plan, {t: multi_helper_message(ones, t, cw.columns[t])
                               for t in plan.helpers})
    assert good != bad


def test_naive_plugin_gf13():
    c = named_instance("gf13")
    rng = random.Random(13)
    plugin = NaiveGrsPlugin(1, 2)
    for _ in range(100):
        cw = encode_raw(c, random_message(c, rng))[0]
        i = rng.randrange(c.m)
        erased = sorted(rng.sample(range(c.L), 2))
        helpers = rng.sample([j for j in range(c.m) if j != i], 2)
        cols = punctured(c, cw, {i: erased})
        rec, _, rep = repair_via_grs_plugin(c, cols, ErasurePattern({i: erased}), helpers, plugin)
        assert rec[i] == {p: cw.columns[i][p] for p in erased}
        assert rep.total == 2 == rep.bound


def test_naive_plugin_checks_shape():
    c = named_instance("gf13")
    cw = codeword(c, 0)
    cols = punctured(c, cw, {0: [0, 1], 1: [0]})
    with pytest.raises(RepairError, match="same number"):
        repair_via_grs_plugin(c, cols, ErasurePattern({0: [0, 1], 1: [0]}), [2, 3],
                              NaiveGrsPlugin(2, 2))
    cols = punctured(c, cw, {0: [0, 1]})
    with pytest.raises(RepairError, match="plugin is built"):
        repair_via_grs_plugin(c, cols, ErasurePattern({0: [0, 1]}), [1, 2, 3],
                              NaiveGrsPlugin(1, 2))
    with pytest.raises(RepairError, match="cannot help"):
        repair_via_grs_plugin(c, cols, ErasurePattern({0: [0, 1]}), [0, 1],
                              NaiveGrsPlugin(1, 2))


def test_erasure_pattern_validation():
    c = named_instance("gf13")
    with pytest.raises(RepairError):
        ErasurePattern({9: [0]}).validate(c)
    with pytest.raises(RepairError):
        ErasurePattern({0: [7]}).validate(c)
    p = ErasurePattern.full_rack(1, c.L)
    assert p.is_full(c, 1) and p.tau == 1 and p.sizes() == [3]


def test_report_json(tower):
    cw = codeword(tower, 0)
    cols = punctured(tower, cw, {1: [0, 1]})
    _, transcript, rep = repair_partial_single(tower, cols, 1, [0, 1])
    js = rep.to_json()
    assert js["total"] == "3/2" and js["bound"] == "3/2" and js["D"] == 3
    assert transcript.to_json()["scheme"] == "partial-cross-ratio"
