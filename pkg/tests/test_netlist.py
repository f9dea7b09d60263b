import itertools
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from bmfx.bmf import BooleanMatrix
from bmfx.errors import CycleDetected, DanglingReference, InterfaceMismatch, UnknownCell
from bmfx.netlist import (
    CellLibrary,
    Gate,
    GateKind,
    Netlist,
    NetlistBuilder,
    area,
    compose,
    extract_subcircuit,
    make_view,
    optimize,
    replace_subcircuit,
    topo_order,
)
from bmfx.partition import partition
from bmfx.resynth import synthesize_decompressor
from bmfx.sim import exhaustive_vectors, gen_vectors, simulate, truth_table

from helpers import random_netlist, single_gate

K = GateKind


def same_function(x: Netlist, y: Netlist) -> bool:
    if x.n_inputs <= 16:
        vs = exhaustive_vectors(x.n_inputs)
    else:
        vs = gen_vectors(x.n_inputs, 4000, 11)
    return simulate(x, vs) == simulate(y, vs)


def test_empty_netlist_has_no_order_and_no_area():
    empty = Netlist((), (), ())
    assert topo_order(empty) == []
    assert area(empty) == 0.0


def test_not_chain_order():
    n = Netlist((0,), (3,), (Gate(3, K.NOT, (2,)), Gate(1, K.NOT, (0,)), Gate(2, K.NOT, (1,))))
    assert topo_order(n) == [1, 2, 3]


def _all_topo_orders(gates):
    ids = [g.id for g in gates]
    gm = {g.id: g for g in gates}
    good = []
    for perm in itertools.permutations(ids):
        pos = {v: i for i, v in enumerate(perm)}
        if all(pos[f] < pos[g] for g in ids for f in gm[g].fanins if f in gm):
            good.append(list(perm))
    return good


def test_diamond_order_is_one_of_the_valid_orders():
    # a -> {b, c} -> d
    gates = (Gate(1, K.NOT, (0,)), Gate(2, K.NOT, (1,)), Gate(3, K.BUF, (1,)), Gate(4, K.AND2, (2, 3)))
    n = Netlist((0,), (4,), gates)
    valid = _all_topo_orders(gates)
    assert len(valid) == 2
    order = topo_order(n)
    assert order in valid
    assert order[0] == 1 and order[-1] == 4


def test_cycle_is_rejected():
    with pytest.raises(CycleDetected):
        Netlist((0,), (1,), (Gate(1, K.AND2, (0, 2)), Gate(2, K.NOT, (1,))))


def test_dangling_fanin_is_rejected():
    with pytest.raises(DanglingReference):
        Netlist((0,), (1,), (Gate(1, K.AND2, (0, 7)),))


def test_arity_checked():
    with pytest.raises(ValueError):
        Gate(3, K.AND2, (1,))


def test_area_arithmetic():
    b = NetlistBuilder()
    x, y = b.add_input(), b.add_input()
    g = [b.raw_gate(K.AND2, x, y) for _ in range(3)]
    n = b.build(g)
    lib = CellLibrary.default().with_overrides({"AND2": 1.5})
    assert area(n, lib) == pytest.approx(4.5)


def test_unknown_cell():
    lib = CellLibrary({"AND2": 1.0})
    with pytest.raises(UnknownCell):
        area(single_gate(K.XOR2), lib)


def test_adder_area_equals_hand_count(rca8):
    counts = Counter(g.kind.value for g in rca8.gates)
    hand = {"NOT": 0.5, "AND2": 1.0, "OR2": 1.0, "NAND2": 0.75, "NOR2": 0.75, "XOR2": 1.5, "XNOR2": 1.5}
    expected = sum(hand.get(k, 0.0) * c for k, c in counts.items())
    assert area(rca8) == pytest.approx(expected)


def test_extract_whole_netlist_is_isomorphic(rca4):
    view = make_view(rca4, [g.id for g in rca4.gates])
    sub = extract_subcircuit(rca4, view)
    assert len(sub.gates) == len(rca4.gates)
    assert sorted(Counter(g.kind for g in sub.gates).items(), key=str) == sorted(
        Counter(g.kind for g in rca4.gates).items(), key=str
    )
    assert truth_table(sub).bits.sum() == truth_table(rca4).bits.sum()


def test_extract_single_and():
    b = NetlistBuilder()
    x, y, z = b.add_input(), b.add_input(), b.add_input()
    a = b.raw_gate(K.AND2, x, y)
    o = b.raw_gate(K.OR2, a, z)
    n = b.build([o])
    sub = extract_subcircuit(n, make_view(n, [a]))
    assert (sub.n_inputs, sub.n_outputs) == (2, 1)
    assert truth_table(sub).column(0).tolist() == [False, False, False, True]


def test_extracted_adder_partition_matches_parent(rca8):
    opt = optimize(rca8)
    parts = partition(opt, 10, seed=1)
    assert len(parts) > 1
    view = parts[0]
    sub = extract_subcircuit(opt, view)
    tt = truth_table(sub).bits
    # drive the parent's boundary nets directly with a scalar evaluation
    for row in range(1 << view.k):
        vals = {net: (row >> i) & 1 for i, net in enumerate(view.boundary_inputs)}
        for g in opt.topo_gates:
            if g.id in view.gate_ids:
                vals[g.id] = _eval(g.kind, [vals[f] for f in g.fanins])
        got = [vals[n] for n in view.boundary_outputs]
        assert got == tt[row].astype(int).tolist()


def _eval(kind, v):
    return {
        K.CONST0: lambda: 0,
        K.CONST1: lambda: 1,
        K.BUF: lambda: v[0],
        K.NOT: lambda: 1 - v[0],
        K.AND2: lambda: v[0] & v[1],
        K.OR2: lambda: v[0] | v[1],
        K.NAND2: lambda: 1 - (v[0] & v[1]),
        K.NOR2: lambda: 1 - (v[0] | v[1]),
        K.XOR2: lambda: v[0] ^ v[1],
        K.XNOR2: lambda: 1 - (v[0] ^ v[1]),
    }[kind]()


def test_replace_with_own_extraction_is_identity(rca8):
    opt = optimize(rca8)
    for view in partition(opt, 10, seed=1):
        out = replace_subcircuit(opt, view, extract_subcircuit(opt, view))
        assert same_function(out, opt)


def test_replace_and_with_constant_zero():
    b = NetlistBuilder()
    x, y, z = b.add_input(), b.add_input(), b.add_input()
    a = b.raw_gate(K.AND2, x, y)
    o = b.raw_gate(K.OR2, a, z)
    n = b.build([o, a])
    zb = NetlistBuilder()
    zb.add_input(), zb.add_input()
    zero = zb.build([zb.raw_gate(K.CONST0)])
    out = replace_subcircuit(n, make_view(n, [a]), zero)
    tt = truth_table(out).bits
    for row in range(8):
        assert tt[row, 0] == bool((row >> 2) & 1)
        assert not tt[row, 1]


def test_replace_interface_mismatch():
    n = single_gate(K.AND2)
    view = make_view(n, [g.id for g in n.gates])
    with pytest.raises(InterfaceMismatch):
        replace_subcircuit(n, view, single_gate(K.NOT))


def test_optimize_folds_constant_and():
    b = NetlistBuilder()
    x = b.add_input()
    zero = b.raw_gate(K.CONST0)
    o = b.raw_gate(K.AND2, x, zero)
    opt = optimize(b.build([o]))
    assert [g.kind for g in opt.gates] == [K.CONST0]
    assert opt.outputs == (opt.gates[0].id,)


def test_optimize_merges_duplicate_gates():
    b = NetlistBuilder()
    x, y = b.add_input(), b.add_input()
    p, q = b.raw_gate(K.AND2, x, y), b.raw_gate(K.AND2, y, x)
    opt = optimize(b.build([p, q]))
    assert len(opt.gates) == 1
    assert opt.outputs[0] == opt.outputs[1]


def test_optimize_shares_duplicated_decompressor_selection():
    # outputs 2 and 3 OR the same compressor outputs
    C = BooleanMatrix([[1, 0, 1, 1], [1, 0, 1, 1], [0, 1, 1, 1]])
    dec = synthesize_decompressor(C)
    opt = optimize(dec)
    assert truth_table(opt) == truth_table(dec)
    assert opt.outputs[2] == opt.outputs[3]
    assert len(opt.gates) < len(dec.gates)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(1, 40), st.integers(0, 10_000))
def test_optimize_preserves_function_and_never_grows(n_in, n_gates, seed):
    n = random_netlist(n_in, n_gates, min(3, n_gates), seed)
    opt = optimize(n)
    assert truth_table(opt) == truth_table(n)
    assert area(opt) <= area(n)


def test_compose_feeds_outputs_to_inputs():
    b = NetlistBuilder()
    x, y = b.add_input(), b.add_input()
    first = b.build([b.raw_gate(K.AND2, x, y), b.raw_gate(K.OR2, x, y)])
    second = single_gate(K.XOR2)
    both = compose(first, second)
    assert truth_table(both).column(0).tolist() == [False, True, True, False]
