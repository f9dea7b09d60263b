import pytest
from hypothesis import given, settings, strategies as st

from bmfx.errors import ArityMismatch, DimensionMismatch, TooManyInputs
from bmfx.netlist import GateKind, NetlistBuilder, extract_subcircuit, optimize
from bmfx.partition import partition
from bmfx.sim import (
    OutputMatrix,
    SplitMix64,
    Xoshiro256StarStar,
    evaluate_vector,
    exhaustive_vectors,
    gen_vectors,
    hamming_error,
    simulate,
    truth_table,
)

from helpers import adder_inputs, random_netlist, single_gate


def test_splitmix_reference_value():
    assert SplitMix64(0).next() == 0xE220A8397B1DCDAF


def test_xoshiro_reference_values():
    rng = Xoshiro256StarStar(state=(1, 2, 3, 4))
    assert [rng.next() for _ in range(4)] == [11520, 0, 1509978240, 1215971899390074240]


def test_vectors_are_deterministic():
    a, b = gen_vectors(4, 16, 7), gen_vectors(4, 16, 7)
    assert (a.to_array() == b.to_array()).all()
    assert a.columns != gen_vectors(4, 16, 8).columns


def test_vectors_are_balanced():
    vs = gen_vectors(1, 100_000, 3)
    frac = vs.to_array().mean()
    assert 0.49 <= frac <= 0.51


def test_vector_shape():
    vs = gen_vectors(8, 10_000, 1)
    assert vs.to_array().shape == (10_000, 8)


def test_exhaustive_small():
    assert exhaustive_vectors(1).to_array().tolist() == [[0], [1]]
    assert exhaustive_vectors(2).to_array().tolist() == [[0, 0], [1, 0], [0, 1], [1, 1]]


def test_exhaustive_sixteen():
    vs = exhaustive_vectors(16)
    assert vs.n_vectors == 65536
    assert vs.row(43690) == 43690


def test_exhaustive_limit():
    with pytest.raises(TooManyInputs):
        exhaustive_vectors(25)


def test_xor_truth_column():
    out = simulate(single_gate(GateKind.XOR2), exhaustive_vectors(2))
    assert out.to_array()[:, 0].tolist() == [False, True, True, False]


def test_constant_one_netlist():
    b = NetlistBuilder()
    b.add_input(), b.add_input()
    n = b.build([b.raw_gate(GateKind.CONST1)])
    assert simulate(n, gen_vectors(2, 37, 1)).to_array().all()


def test_adder8_random_vectors(rca8):
    vs = gen_vectors(16, 10_000, 1)
    out = simulate(rca8, vs).to_array()
    for v in range(0, vs.n_vectors, 7):
        a, b = adder_inputs(vs.row(v), 8)
        assert sum(int(x) << i for i, x in enumerate(out[v])) == (a + b) % 512


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        simulate(single_gate(GateKind.AND2), gen_vectors(3, 10, 1))


def test_truth_tables_of_small_gates():
    assert truth_table(single_gate(GateKind.AND2)).column(0).tolist() == [False, False, False, True]
    assert truth_table(single_gate(GateKind.BUF)).column(0).tolist() == [False, True]


def test_adder_partition_truth_table_matches_scalar(rca8):
    opt = optimize(rca8)
    views = [v for v in partition(opt, 10, seed=1)]
    view = max(views, key=lambda v: v.k)
    sub = extract_subcircuit(opt, view)
    tt = truth_table(sub).bits
    for r in range(1 << sub.n_inputs):
        assert evaluate_vector(sub, r) == tt[r].astype(int).tolist()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(1, 60), st.integers(1, 300), st.integers(0, 99), st.sampled_from([None, 64, 100]))
def test_bit_parallel_matches_scalar(n_in, n_gates, n_vec, seed, lanes):
    n = random_netlist(n_in, n_gates, min(4, n_gates), seed)
    vs = gen_vectors(n_in, n_vec, seed)
    out = simulate(n, vs, lane_width=lanes).to_array()
    for v in range(n_vec):
        assert evaluate_vector(n, vs.row(v)) == out[v].astype(int).tolist()


def test_hamming_error_arithmetic():
    full = (1 << 1000) - 1
    ref = OutputMatrix(10, 1000, tuple([0] * 10))
    assert hamming_error(ref, ref) == 0.0
    assert hamming_error(ref, OutputMatrix(10, 1000, tuple([full] * 10))) == 1.0
    one = OutputMatrix(10, 1000, tuple([1 << 500] + [0] * 9))
    assert hamming_error(ref, one) == pytest.approx(0.0001)


def test_hamming_error_dimension_check():
    with pytest.raises(DimensionMismatch):
        hamming_error(OutputMatrix(2, 5, (0, 0)), OutputMatrix(3, 5, (0, 0, 0)))
