import json
import math
import random
from fractions import Fraction

import networkx as nx
import pytest

from rackrepair.acceptance import random_family_instance
from rackrepair.bounds import capacity_c
from rackrepair.flowgraph import (INF, apply_failure, attach_dc, brute_force_min_cut,
                                  build_initial, min_cut, random_evolution, worst_case_graph)


def networkx_min_cut(g):
    finite = [Fraction(c) for _, _, c, _ in g.edges if c != INF]
    scale = math.lcm(*(c.denominator for c in finite))
    G = nx.DiGraph()
    for u, v, c, _ in g.edges:
        if c == INF:
            G.add_edge(u, v)
        else:
            G.add_edge(u, v, capacity=int(Fraction(c) * scale))
    return Fraction(nx.maximum_flow_value(G, "S", "DC"), scale)


def test_build_initial_counts():
    g = build_initial(1, 2)
    assert len(g.nodes()) == 3 and len(g.edges) == 2
    g = build_initial(4, 3)
    assert len(g.nodes()) == 9 and len(g.edges) == 8
    assert all(c == 3 for _, _, c, _ in g.edges)
    g.audit()
    with pytest.raises(ValueError):
        build_initial(0, 1)


def test_initial_graph_cut_is_k_r():
    g = attach_dc(build_initial(5, Fraction(3, 2)), [0, 2, 4])
    assert min_cut(g) == Fraction(9, 2)


def test_apply_failure_shape():
    g = build_initial(4, 2)
    u = apply_failure(g, 0, 1, [1, 2, 3], Fraction(1, 3))
    assert not g.active[0] and g.active[u]
    helper = [e for e in g.edges if e[1] == ("in", u) and e[3] == "helper"]
    inherit = [e for e in g.edges if e[1] == ("in", u) and e[3] == "inherit"]
    assert len(helper) == 3 and all(e[2] == Fraction(1, 3) for e in helper)
    assert inherit == [(("out", 0), ("in", u), 1, "inherit")]
    u2 = apply_failure(g, u, 0, [1, 2, 3], 1)
    assert g.chain[u2] == g.chain[0] == 0 and g.progenitor[u2] == u
    g.audit()


def test_apply_failure_errors():
    g = build_initial(3, 2)
    apply_failure(g, 0, 0, [1, 2], 1)
    with pytest.raises(ValueError, match="not active"):
        apply_failure(g, 0, 0, [1, 2], 1)
    with pytest.raises(ValueError, match="helper"):
        apply_failure(g, 1, 0, [0, 2], 1)
    with pytest.raises(ValueError, match="repeated"):
        apply_failure(g, 1, 0, [2, 2], 1)
    attach_dc(g, [1])
    with pytest.raises(ValueError):
        apply_failure(g, 1, 0, [2, 3], 1)


def test_attach_dc_errors():
    g = build_initial(3, 2)
    with pytest.raises(ValueError):
        attach_dc(g, [0, 0])
    apply_failure(g, 0, 0, [1, 2], 1)
    with pytest.raises(ValueError, match="not active"):
        attach_dc(g, [0])
    with pytest.raises(ValueError):
        min_cut(build_initial(2, 1))


def test_worst_case_examples():
    assert min_cut(worst_case_graph(6, 2, 3, 1, [0] * 6, 2)) == 4
    assert min_cut(worst_case_graph(5, 3, 4, 2, [0] * 5, 4)) == 12
    assert min_cut(worst_case_graph(4, 2, 3, 5, [3, 4, 3, 5], 3)) == 6


def test_worst_case_single_collector_node():
    rng = random.Random(4)
    for _ in range(50):
        N, _, D, beta, s, r = random_family_instance(rng)
        g = worst_case_graph(N, 1, D, beta, s, r)
        assert min_cut(g) == min(D * beta + min(s), r)


def test_zero_download_keeps_only_survivors():
    g = build_initial(4, 3)
    u = apply_failure(g, 0, 0, [1, 2, 3], 0)
    attach_dc(g, [u, 1])
    assert min_cut(g) == 0 + 3


def test_worst_case_equals_capacity():
    rng = random.Random(5)
    for _ in range(200):
        args = random_family_instance(rng)
        g = worst_case_graph(*args)
        g.audit()
        assert min_cut(g) == capacity_c(*args)


def test_random_evolutions_stay_above_capacity():
    rng = random.Random(6)
    for seed in range(200):
        N, K, D, beta, s, r = random_family_instance(rng)
        g = random_evolution(N, K, D, beta, s, r, rng.randint(0, 2 * N), rng_seed=seed)
        g.audit()
        assert len(g.dc) == K
        assert min_cut(g) >= capacity_c(N, K, D, beta, s, r)


def test_random_evolution_zero_steps_and_determinism():
    g = random_evolution(4, 2, 3, 1, [1] * 4, 2, 0, rng_seed=3)
    assert len(g.order) == 4 and len(g.dc) == 2
    a = random_evolution(5, 2, 3, Fraction(1, 2), [0, 1, 2, 1, 0], 2, 6, rng_seed=9)
    b = random_evolution(5, 2, 3, Fraction(1, 2), [0, 1, 2, 1, 0], 2, 6, rng_seed=9)
    assert a.to_json() == b.to_json()


def test_dinic_against_brute_force():
    rng = random.Random(7)
    checked = 0
    while checked < 60:
        N = rng.randint(2, 3)
        D = rng.randint(1, N - 1)
        K = rng.randint(1, N)
        beta = Fraction(rng.randint(0, 6), rng.randint(1, 4))
        s = [rng.randint(0, 2) for _ in range(N)]
        g = random_evolution(N, K, D, beta, s, 2, rng.randint(0, 2), rng_seed=checked)
        if sum(1 for e in g.edges if e[2] != INF) > 12:
            continue
        assert min_cut(g) == brute_force_min_cut(g)
        checked += 1


def test_brute_force_guard():
    g = worst_case_graph(8, 4, 6, 1, [0] * 8, 2)
    with pytest.raises(ValueError, match="enumeration limit"):
        brute_force_min_cut(g)


def test_dinic_against_networkx():
    rng = random.Random(8)
    for seed in range(100):
        N, K, D, beta, s, r = random_family_instance(rng)
        g = random_evolution(N, K, D, beta, s, r, rng.randint(0, 3 * N), rng_seed=seed)
        assert min_cut(g) == networkx_min_cut(g)


def test_audit_catches_broken_graphs():
    g = build_initial(3, 2)
    g.edges[1] = (g.edges[1][0], g.edges[1][1], 5, "storage")
    with pytest.raises(AssertionError, match="storage"):
        g.audit()
    g = build_initial(3, 2)
    g.edges.append((("out", 1), ("in", 0), 1, "helper"))
    g.edges.append((("out", 0), ("in", 1), 1, "helper"))
    with pytest.raises(AssertionError, match="cycle"):
        g.audit()
    g = build_initial(3, 2)
    u = apply_failure(g, 0, 0, [1, 2], 1)
    g.progenitor[u + 1] = 0
    g.order.append(u + 1)
    g.active[u + 1] = True
    g.chain[u + 1] = 0
    with pytest.raises(AssertionError):
        g.audit()


def test_exports():
    g = worst_case_graph(4, 2, 3, Fraction(1, 2), [1] * 4, 2)
    data = json.loads(g.dumps())
    assert "DC" in data["nodes"] and "S" in data["nodes"]
    collector = [e for e in data["edges"] if e["to"] == "DC"]
    assert len(collector) == 2 and all(e["capacity"] == "inf" for e in collector)
    assert any(e["capacity"] == "1/2" for e in data["edges"])
    dot = g.to_dot()
    assert dot.startswith("digraph") and '"S" -> "in0"' in dot
