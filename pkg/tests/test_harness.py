import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rackrepair.harness import (CSV_COLUMNS, ClusterState, OpenProblemError, VerificationError,
                                bench, chunk_bytes, cluster_encode, inject, pack_bytes, read_back,
                                rows_to_csv, run_repair, symbol_bits, unpack_symbols)
from rackrepair.repair import RepairError
from rackrepair.tamo_barg import named_instance


@pytest.fixture(scope="module")
def gf13():
    return named_instance("gf13")


@pytest.fixture(scope="module")
def tower():
    return named_instance("tower210")


def test_symbol_sizes(gf13, tower):
    assert symbol_bits(gf13) == 3 and chunk_bytes(gf13) == 3
    assert symbol_bits(tower) == 210 and chunk_bytes(tower) == 105


def test_pack_requires_whole_stripes(gf13):
    with pytest.raises(ValueError, match="multiple of 3 bytes"):
        pack_bytes(gf13, b"ab")
    stripes = pack_bytes(gf13, b"ab", pad=True)
    assert len(stripes) == 2
    assert unpack_symbols(gf13, stripes, 2) == b"ab"


def test_pack_bit_order(gf13):
    # 0x80 0x00 0x00: the first 3-bit symbol carries the top bits
    stripes = pack_bytes(gf13, bytes([0x80, 0, 0]))
    assert [int(v) for v in stripes[0]] == [4, 0, 0, 0]


def test_empty_stream(gf13):
    assert pack_bytes(gf13, b"") == []
    state = cluster_encode(gf13, b"")
    assert state.stripes == [] and read_back(state) == b""


@settings(max_examples=60, deadline=None)
@given(st.binary(max_size=40))
def test_pack_roundtrip(data):
    c = named_instance("gf13")
    assert unpack_symbols(c, pack_bytes(c, data, pad=True), len(data)) == data


def test_single_stripe_has_n_symbols(gf13):
    state = cluster_encode(gf13, b"\x12\x34\x56")
    assert len(state.stripes) == 2
    assert sum(len(col) for col in state.stripes[0]) == gf13.n == 12


def test_inject_errors(gf13):
    state = cluster_encode(gf13, b"xyz")
    inject(state, {"rack": 1, "positions": [0]})
    with pytest.raises(ValueError, match="already erased"):
        inject(state, {"rack": 1, "positions": [0, 2]})
    assert state.erased() == {1: [0]}  # the failed event left nothing behind
    with pytest.raises(ValueError):
        inject(state, {"rack": 7})
    with pytest.raises(ValueError):
        inject(state, {"rack": 0, "positions": [3]})
    with pytest.raises(ValueError):
        inject(state, {})


def test_local_repair_is_free(gf13):
    state = cluster_encode(gf13, b"abcdef")
    inject(state, {"rack": 2, "positions": [1]})
    _, rows = run_repair(state)
    assert len(rows) == 1
    row = rows[0]
    assert row.scheme == "local" and row.total == 0 and row.D == 0 and row.optimal
    assert state.traffic == 0 and read_back(state) == b"abcdef"


def test_naive_on_prime_field(gf13):
    data = bytes(range(12))
    state = cluster_encode(gf13, data)
    inject(state, {"rack": 0, "positions": [0, 2]})
    _, rows = run_repair(state)
    assert rows[0].scheme == "grs-naive" and rows[0].total == 2
    assert state.traffic == 2 * len(state.stripes)
    assert read_back(state) == data


def test_tower_full_rack_row(tower):
    data = bytes(random.Random(1).randrange(256) for _ in range(chunk_bytes(tower)))
    state = cluster_encode(tower, data)
    inject(state, {"rack": 2})
    _, rows = run_repair(state)
    (row,) = rows
    assert row.scheme == "full-I" and row.total == 3 == row.bound and row.optimal
    assert row.D == 3 and read_back(state) == data


def test_tower_partial_row(tower):
    data = bytes(chunk_bytes(tower))
    state = cluster_encode(tower, data)
    inject(state, {"rack": 3, "positions": [0, 2]})
    _, rows = run_repair(state, "partial")
    assert rows[0].total == Fraction(3, 2) and rows[0].optimal


def test_explicit_scheme_and_unknown_scheme(tower):
    data = bytes(chunk_bytes(tower))
    state = cluster_encode(tower, data)
    inject(state, {"rack": 1, "positions": [0, 1]})
    _, rows = run_repair(state, "partial-padded")
    assert rows[0].scheme == "partial-I" and rows[0].total == 3
    with pytest.raises(ValueError, match="unknown scheme"):
        run_repair(state, "magic")


def test_two_full_racks_is_open(gf13):
    state = cluster_encode(gf13, b"abc")
    inject(state, {"pattern": {0: [0, 1, 2], 1: [0, 1, 2]}})
    with pytest.raises(OpenProblemError, match="open problem"):
        run_repair(state)


def test_unsupported_pattern_raises(gf13):
    state = cluster_encode(gf13, b"abc")
    inject(state, {"pattern": {0: [0, 1, 2], 1: [0, 1]}})
    with pytest.raises(RepairError):
        run_repair(state)


def test_shadow_verification_catches_tampering(gf13):
    state = cluster_encode(gf13, b"abc")
    state.stripes[0][3][0] = (state.stripes[0][3][0] + 1) % 13
    with pytest.raises(VerificationError):
        run_repair(state)


def test_state_json_roundtrip(tower):
    state = cluster_encode(tower, bytes(range(105)))
    inject(state, {"rack": 0, "positions": [1, 2]})
    back = ClusterState.from_json(json.loads(json.dumps(state.to_json())))
    assert back.erased() == {0: [1, 2]}
    _, rows = run_repair(back)
    assert read_back(back) == bytes(range(105))
    assert back.log[-1]["op"] == "repair"


def test_bench_is_deterministic():
    matrix = {"gf13": [{"kind": "partial", "size": 2}],
              "gf64": [{"kind": "multi", "sizes": [2]}]}
    first = rows_to_csv(bench(matrix, seeds=3, base_seed=4))
    assert first == rows_to_csv(bench(matrix, seeds=3, base_seed=4))
    header, *lines = first.strip().split("\n")
    assert header.split(",") == CSV_COLUMNS and len(lines) == 6


def test_csv_timing_column_is_opt_in():
    rows = bench({"gf13": [{"kind": "local", "size": 1}]}, seeds=1)
    assert "wall_clock" not in rows_to_csv(rows)
    timed = rows_to_csv(rows, timing=True).split("\n")
    assert timed[0].endswith(",wall_clock")
