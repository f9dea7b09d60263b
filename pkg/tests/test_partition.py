import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bmfx import benchmarks
from bmfx.errors import Infeasible
from bmfx.netlist import (
    Gate,
    GateKind,
    Netlist,
    NetlistBuilder,
    extract_subcircuit,
    optimize,
    replace_subcircuits,
)
from bmfx.partition import Hypergraph, build_hypergraph, fm_bipartition, partition, partition_csv
from bmfx.sim import gen_vectors, simulate

from helpers import random_netlist, single_gate


def recount_boundary_inputs(netlist: Netlist, gate_ids) -> int:
    gm = netlist.gate_map
    ids = set(gate_ids)
    return len({net for gid in ids for net in gm[gid].fanins if net not in ids})


def check_partition(netlist: Netlist, parts, k_max: int) -> None:
    seen = []
    for view in parts:
        assert recount_boundary_inputs(netlist, view.gate_ids) <= k_max
        seen.extend(view.gate_ids)
    assert len(seen) == len(set(seen))
    assert set(seen) == {g.id for g in netlist.gates}


def test_single_and_hypergraph():
    h = build_hypergraph(single_gate(GateKind.AND2))
    assert len(h.vertices) == 1
    assert len(h.edges) == 3
    assert all(len(p) == 1 for p in h.edges.values())


def test_not_chain_hypergraph():
    n = Netlist((0,), (3,), (Gate(1, GateKind.NOT, (0,)), Gate(2, GateKind.NOT, (1,)), Gate(3, GateKind.NOT, (2,))))
    h = build_hypergraph(n)
    assert len(h.vertices) == 3
    internal = [p for p in h.edges.values() if len(p) == 2]
    assert sorted(internal) == [(1, 2), (2, 3)]


def test_adder_hyperedges_match_net_degree_scan(rca8):
    n = optimize(rca8)
    degree = {}
    for g in n.gates:
        degree.setdefault(g.id, set()).add(g.id)
        for f in g.fanins:
            degree.setdefault(f, set()).add(g.id)
    io = set(n.inputs) | set(n.outputs)
    expected = sum(1 for net, gs in degree.items() if len(gs) >= 2 or (net in io and gs))
    assert len(build_hypergraph(n).edges) == expected


def brute_force_cut(h: Hypergraph, balance: float) -> int:
    verts = h.vertices
    pos = {v: i for i, v in enumerate(verts)}
    masks = np.arange(1 << len(verts), dtype=np.int64)
    sizes = np.zeros_like(masks)
    for i in range(len(verts)):
        sizes += (masks >> i) & 1
    total = len(verts)
    ok = (sizes >= balance * total - 1e-9) & (sizes <= (1 - balance) * total + 1e-9)
    masks = masks[ok]
    cut = np.zeros_like(masks)
    for pins in h.edges.values():
        e = sum(1 << pos[v] for v in pins)
        inter = masks & e
        cut += (inter != 0) & (inter != e)
    return int(cut.min())


def random_hypergraph(n_vertices: int, n_edges: int, seed: int) -> Hypergraph:
    rng = random.Random(seed)
    edges = {}
    for e in range(n_edges):
        edges[100 + e] = tuple(sorted(rng.sample(range(n_vertices), rng.randint(2, 4))))
    return Hypergraph({v: 1.0 for v in range(n_vertices)}, edges, {e: None for e in edges})


def test_disconnected_halves_cut_zero():
    edges = {10: (0, 1), 11: (1, 2), 12: (3, 4), 13: (4, 5)}
    h = Hypergraph({v: 1.0 for v in range(6)}, edges, {e: None for e in edges})
    a, b = fm_bipartition(h, 0.5, seed=3)
    side = {v: 0 if v in a else 1 for v in h.vertices}
    assert h.cut(side) == 0


def test_two_gates_one_net_forced_cut():
    h = Hypergraph({0: 1.0, 1: 1.0}, {5: (0, 1)}, {5: None})
    a, b = fm_bipartition(h, 0.5, seed=0)
    assert len(a) == len(b) == 1
    assert h.cut({v: 0 if v in a else 1 for v in h.vertices}) == 1


def test_infeasible_balance():
    h = Hypergraph({0: 10.0, 1: 1.0}, {5: (0, 1)}, {5: None})
    with pytest.raises(Infeasible):
        fm_bipartition(h, 0.5, seed=0)


def test_fm_against_brute_force():
    h = random_hypergraph(20, 30, seed=17)
    opt = brute_force_cut(h, 0.45)
    for seed in range(50):
        a, b = fm_bipartition(h, 0.45, seed=seed)
        assert 9 <= len(a) <= 11
        cut = h.cut({v: 0 if v in a else 1 for v in h.vertices})
        assert opt <= cut <= 2 * max(opt, 1)


def test_fm_passes_never_worsen_cut():
    h = random_hypergraph(40, 60, seed=2)
    trace = []
    fm_bipartition(h, 0.45, seed=5, trace=trace)
    assert all(x >= y for x, y in zip(trace, trace[1:]))


def test_small_circuit_single_partition():
    n = random_netlist(10, 40, 3, seed=8)
    assert len(partition(n, 16)) == 1


def ten_input_block(b: NetlistBuilder, ins) -> list[int]:
    parity, conj = ins[0], ins[0]
    for x in ins[1:]:
        parity = b.raw_gate(GateKind.XOR2, parity, x)
        conj = b.raw_gate(GateKind.AND2, conj, x)
    return [parity, conj]


def test_disconnected_blocks_split_along_disconnect():
    b = NetlistBuilder()
    ins = [b.add_input() for _ in range(20)]
    both = b.build(ten_input_block(b, ins[:10]) + ten_input_block(b, ins[10:]))
    parts = partition(both, 16)
    assert len(parts) == 2
    for view in parts:
        fan = {net for gid in view.gate_ids for net in both.gate_map[gid].fanins if net in both.inputs}
        assert fan <= set(both.inputs[:10]) or fan <= set(both.inputs[10:])


@pytest.mark.parametrize("name", benchmarks.NAMES)
@pytest.mark.parametrize("k_max", [16, 8])
def test_benchmark_partitions_are_legal(name, k_max):
    n = optimize(benchmarks.load(name))
    check_partition(n, partition(n, k_max, seed=1), k_max)


def test_partition_is_deterministic(rca32):
    n = optimize(rca32)
    assert partition_csv(partition(n, 16, seed=4)) == partition_csv(partition(n, 16, seed=4))


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 14), st.integers(20, 150), st.integers(0, 10_000), st.integers(4, 12))
def test_random_partitions_legal_and_replaceable(n_in, n_gates, seed, k_max):
    n = optimize(random_netlist(n_in, n_gates, 4, seed))
    parts = partition(n, k_max, seed=seed)
    check_partition(n, parts, k_max)
    # convex groups: swapping every group for its own extraction stays acyclic
    rebuilt = replace_subcircuits(n, [(v, extract_subcircuit(n, v)) for v in parts])
    vs = gen_vectors(max(1, n.n_inputs), 256, 1)
    if n.n_inputs:
        assert simulate(rebuilt, vs) == simulate(n, vs)


def test_partition_csv_shape(rca8):
    n = optimize(rca8)
    lines = partition_csv(partition(n, 8)).splitlines()
    assert lines[0] == "gate_id,partition_id"
    assert len(lines) == len(n.gates) + 1
