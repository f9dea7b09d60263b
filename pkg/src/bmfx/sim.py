"""Bit-parallel simulation, test-vector generation and Hamming-distance QoR.

Vectors are stored column-wise: input ``i`` of a VectorSet is one Python int
whose bit ``v`` is the value of that input on vector ``v``. Every gate is then
evaluated once per lane with a single bitwise operation, so a lane carries as
many vectors as the int is wide. ``simulate(..., lane_width=64)`` splits the
work into 64-vector words instead; results are bit-identical.

Random vectors
--------------
Bits come from xoshiro256** seeded through SplitMix64, all arithmetic modulo
2**64::

    splitmix64:  x += 0x9E3779B97F4A7C15
                 z = x
                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                 return z ^ (z >> 31)

    state s0..s3 = four successive splitmix64 outputs from x = seed

    xoshiro256**: result = rotl(s1 * 5, 7) * 9
                  t  = s1 << 17
                  s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3
                  s2 ^= t;  s3 = rotl(s3, 45)

Input 0 consumes the first ceil(N/64) outputs, input 1 the next block, and so
on. Within input ``i``, output word ``w`` supplies vectors ``64w .. 64w+63``
with its least-significant bit first. Bits past N are discarded.

Exhaustive sets enumerate patterns in ascending binary order with input 0 as
the least-significant bit, so row ``r`` sets input ``i`` to ``(r >> i) & 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArityMismatch, DimensionMismatch, TooManyInputs
from .netlist import GateKind, Netlist

MASK64 = (1 << 64) - 1
EXHAUSTIVE_LIMIT = 24
TRUTH_TABLE_LIMIT = 16


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class SplitMix64:
    def __init__(self, seed: int):
        self.x = seed & MASK64

    def next(self) -> int:
        self.x = (self.x + 0x9E3779B97F4A7C15) & MASK64
        z = self.x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


class Xoshiro256StarStar:
    def __init__(self, seed: int | None = None, state: Sequence[int] | None = None):
        if state is None:
            sm = SplitMix64(seed or 0)
            state = [sm.next() for _ in range(4)]
        self.s = [v & MASK64 for v in state]

    def next(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result


@dataclass(frozen=True)
class VectorSet:
    """``seed`` is None for an exhaustive set."""

    n_inputs: int
    n_vectors: int
    columns: tuple[int, ...]
    seed: int | None

    @property
    def exhaustive(self) -> bool:
        return self.seed is None

    @property
    def mask(self) -> int:
        return (1 << self.n_vectors) - 1

    def row(self, v: int) -> int:
        """Input pattern of vector ``v`` as an int, input 0 at bit 0."""
        return sum(((c >> v) & 1) << i for i, c in enumerate(self.columns))

    def to_array(self) -> np.ndarray:
        """(n_vectors, n_inputs) 0/1 array."""
        return np.stack([_int_to_bits(c, self.n_vectors) for c in self.columns], axis=1)


@dataclass(frozen=True)
class OutputMatrix:
    n_outputs: int
    n_vectors: int
    columns: tuple[int, ...]

    def to_array(self) -> np.ndarray:
        if not self.columns:
            return np.zeros((self.n_vectors, 0), dtype=bool)
        return np.stack([_int_to_bits(c, self.n_vectors) for c in self.columns], axis=1)

    def hex_rows(self) -> list[str]:
        """One hex string per vector, output 0 in the least-significant bit."""
        width = max(1, (self.n_outputs + 3) // 4)
        rows = []
        for v in range(self.n_vectors):
            word = sum(((c >> v) & 1) << o for o, c in enumerate(self.columns))
            rows.append(f"{word:0{width}x}")
        return rows


def _int_to_bits(x: int, n: int) -> np.ndarray:
    raw = x.to_bytes((n + 7) // 8 or 1, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


def bits_to_int(bits: np.ndarray) -> int:
    packed = np.packbits(np.asarray(bits, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def gen_vectors(n_inputs: int, n_vectors: int, seed: int) -> VectorSet:
    if n_inputs < 1 or n_vectors < 1:
        raise ValueError("need at least one input and one vector")
    rng = Xoshiro256StarStar(seed)
    n_words = (n_vectors + 63) // 64
    mask = (1 << n_vectors) - 1
    cols = []
    for _ in range(n_inputs):
        col = 0
        for w in range(n_words):
            col |= rng.next() << (64 * w)
        cols.append(col & mask)
    return VectorSet(n_inputs, n_vectors, tuple(cols), seed)


def _exhaustive_column(i: int, n: int) -> int:
    half = 1 << i
    col = ((1 << half) - 1) << half
    width = half << 1
    total = 1 << n
    while width < total:
        col |= col << width
        width <<= 1
    return col


def exhaustive_vectors(n_inputs: int) -> VectorSet:
    if n_inputs > EXHAUSTIVE_LIMIT:
        raise TooManyInputs(f"{n_inputs} inputs exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}")
    cols = tuple(_exhaustive_column(i, n_inputs) for i in range(n_inputs))
    return VectorSet(n_inputs, 1 << n_inputs, cols, None)


def net_values(netlist: Netlist, columns: Sequence[int], mask: int) -> dict[int, int]:
    """Value of every net under the given input lanes."""
    if len(columns) != netlist.n_inputs:
        raise ArityMismatch(f"netlist has {netlist.n_inputs} inputs, vectors have {len(columns)}")
    K = GateKind
    val = dict(zip(netlist.inputs, columns))
    for g in netlist.topo_gates:
        k = g.kind
        f = g.fanins
        if k is K.AND2:
            v = val[f[0]] & val[f[1]]
        elif k is K.OR2:
            v = val[f[0]] | val[f[1]]
        elif k is K.XOR2:
            v = val[f[0]] ^ val[f[1]]
        elif k is K.NOT:
            v = val[f[0]] ^ mask
        elif k is K.NAND2:
            v = (val[f[0]] & val[f[1]]) ^ mask
        elif k is K.NOR2:
            v = (val[f[0]] | val[f[1]]) ^ mask
        elif k is K.XNOR2:
            v = val[f[0]] ^ val[f[1]] ^ mask
        elif k is K.BUF:
            v = val[f[0]]
        elif k is K.CONST0:
            v = 0
        else:
            v = mask
        val[g.id] = v
    return val


def simulate(netlist: Netlist, vectors: VectorSet, lane_width: int | None = None) -> OutputMatrix:
    if vectors.n_inputs != netlist.n_inputs:
        raise ArityMismatch(f"netlist has {netlist.n_inputs} inputs, vectors have {vectors.n_inputs}")
    n = vectors.n_vectors
    if lane_width is None or lane_width >= n:
        val = net_values(netlist, vectors.columns, vectors.mask)
        return OutputMatrix(netlist.n_outputs, n, tuple(val[o] for o in netlist.outputs))
    out = [0] * netlist.n_outputs
    for lo in range(0, n, lane_width):
        width = min(lane_width, n - lo)
        mask = (1 << width) - 1
        lane = [(c >> lo) & mask for c in vectors.columns]
        val = net_values(netlist, lane, mask)
        for j, o in enumerate(netlist.outputs):
            out[j] |= val[o] << lo
    return OutputMatrix(netlist.n_outputs, n, tuple(out))


_SCALAR = {
    GateKind.CONST0: lambda: 0,
    GateKind.CONST1: lambda: 1,
    GateKind.BUF: lambda a: a,
    GateKind.NOT: lambda a: 1 - a,
    GateKind.AND2: lambda a, b: a & b,
    GateKind.OR2: lambda a, b: a | b,
    GateKind.NAND2: lambda a, b: 1 - (a & b),
    GateKind.NOR2: lambda a, b: 1 - (a | b),
    GateKind.XOR2: lambda a, b: a ^ b,
    GateKind.XNOR2: lambda a, b: 1 - (a ^ b),
}


def evaluate_vector(netlist: Netlist, pattern: int) -> list[int]:
    """One-vector reference evaluation; ``pattern`` bit i drives input i."""
    val = {net: (pattern >> i) & 1 for i, net in enumerate(netlist.inputs)}
    for g in netlist.topo_gates:
        val[g.id] = _SCALAR[g.kind](*(val[n] for n in g.fanins))
    return [val[o] for o in netlist.outputs]


def truth_table(subckt: Netlist):
    """2^k x m BooleanMatrix; row r is the output vector on input pattern r."""
    from .bmf import BooleanMatrix

    if subckt.n_inputs > TRUTH_TABLE_LIMIT:
        raise TooManyInputs(f"{subckt.n_inputs} inputs exceed the truth-table limit of {TRUTH_TABLE_LIMIT}")
    out = simulate(subckt, exhaustive_vectors(subckt.n_inputs))
    return BooleanMatrix(out.to_array())


def hamming_error(ref: OutputMatrix, approx: OutputMatrix) -> float:
    if ref.n_outputs != approx.n_outputs or ref.n_vectors != approx.n_vectors:
        raise DimensionMismatch(
            f"{ref.n_outputs}x{ref.n_vectors} vs {approx.n_outputs}x{approx.n_vectors}"
        )
    total = ref.n_outputs * ref.n_vectors
    if total == 0:
        return 0.0
    flips = sum((a ^ b).bit_count() for a, b in zip(ref.columns, approx.columns))
    return flips / total
