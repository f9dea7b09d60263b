"""Factor matrices back to logic.

The compressor realizes each column of B as a two-level cover mapped onto
balanced AND/OR trees, either over the subcircuit inputs or over its exact
output nets; the decompressor ORs compressor outputs per column of C. Their
composition is optimized as one circuit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bmf import AssoParams, BooleanMatrix, asso_sweep, factorization_error
from .netlist import CellLibrary, GateKind, Netlist, NetlistBuilder, area, compose, optimize
from .sim import bits_to_int, exhaustive_vectors, net_values, truth_table


@dataclass(frozen=True)
class SopCover:
    """Sum of products over ``n_inputs`` variables.

    Each cube is a string with one character per input (index 0 first):
    ``1`` positive literal, ``0`` negative literal, ``-`` absent. The empty
    cover is constant 0; a cube of all dashes is constant 1.
    """

    n_inputs: int
    cubes: tuple[str, ...]

    def evaluate(self, pattern: int) -> int:
        for cube in self.cubes:
            if all(c == "-" or int(c) == (pattern >> i) & 1 for i, c in enumerate(cube)):
                return 1
        return 0

    def to_int(self) -> int:
        """Truth table of the cover, row r at bit r."""
        vs = exhaustive_vectors(self.n_inputs)
        full = vs.mask
        out = 0
        for cube in self.cubes:
            term = full
            for i, c in enumerate(cube):
                if c == "1":
                    term &= vs.columns[i]
                elif c == "0":
                    term &= vs.columns[i] ^ full
            out |= term
        return out

    def literal_count(self) -> int:
        return sum(len(c) - c.count("-") for c in self.cubes)


def _isop(L: int, U: int, n: int, memo: dict) -> tuple[list[tuple[int, int]], int]:
    """Irredundant cover f with L <= f <= U (Minato-Morreale).

    Cubes are (positive-mask, negative-mask) pairs. Splits on the highest
    variable, whose cofactors are the upper and lower halves of the table.
    """
    if L == 0:
        return [], 0
    full = (1 << (1 << n)) - 1
    if U == full:
        return [(0, 0)], full
    key = (L, U, n)
    hit = memo.get(key)
    if hit is not None:
        return hit
    half = 1 << (n - 1)
    hm = (1 << half) - 1
    L0, L1 = L & hm, L >> half
    U0, U1 = U & hm, U >> half
    var = 1 << (n - 1)
    c0, f0 = _isop(L0 & ~U1 & hm, U0, n - 1, memo)
    c1, f1 = _isop(L1 & ~U0 & hm, U1, n - 1, memo)
    Ls = (L0 & ~f0 & hm) | (L1 & ~f1 & hm)
    cs, fs = _isop(Ls, U0 & U1, n - 1, memo)
    cubes = [(p, q | var) for p, q in c0] + [(p | var, q) for p, q in c1] + cs
    res = (cubes, (f0 | fs) | ((f1 | fs) << half))
    memo[key] = res
    return res


def _cube_str(pos: int, neg: int, n: int) -> str:
    return "".join("1" if pos >> i & 1 else "0" if neg >> i & 1 else "-" for i in range(n))


def _column_int(column) -> tuple[int, int]:
    if isinstance(column, int):
        raise TypeError("pass the column as a sequence of bits, or use synthesize_column_int")
    arr = np.asarray(column, dtype=bool).ravel()
    n_rows = arr.size
    k = n_rows.bit_length() - 1
    if n_rows == 0 or 1 << k != n_rows:
        raise ValueError(f"column length {n_rows} is not a power of two")
    return bits_to_int(arr), k


def synthesize_column_int(tt: int, k: int) -> SopCover:
    cubes, _ = _isop(tt, tt, k, {})
    return SopCover(k, tuple(_cube_str(p, q, k) for p, q in cubes))


def synthesize_column(column) -> SopCover:
    """Irredundant SOP for a 2^k-entry truth-table column (row r = pattern r)."""
    tt, k = _column_int(column)
    return synthesize_column_int(tt, k)


def _balanced(b: NetlistBuilder, kind: GateKind, nets: Sequence[int]) -> int:
    nets = list(nets)
    while len(nets) > 1:
        nxt = [b.gate(kind, nets[i], nets[i + 1]) for i in range(0, len(nets) - 1, 2)]
        if len(nets) % 2:
            nxt.append(nets[-1])
        nets = nxt
    return nets[0]


def map_cover(b: NetlistBuilder, cover: SopCover, inputs: Sequence[int]) -> int:
    """Build ``cover`` over builder nets ``inputs``; returns the output net."""
    if not cover.cubes:
        return b.const(0)
    terms = []
    for cube in cover.cubes:
        lits = []
        for i, c in enumerate(cube):
            if c == "1":
                lits.append(inputs[i])
            elif c == "0":
                lits.append(b.gate(GateKind.NOT, inputs[i]))
        terms.append(_balanced(b, GateKind.AND2, lits) if lits else b.const(1))
    return _balanced(b, GateKind.OR2, terms)


class _ConeReuse:
    """Taps nets of an existing circuit whose function matches a column."""

    def __init__(self, circuit: Netlist, b: NetlistBuilder, inputs: Sequence[int], index: bool = True):
        self.circuit = circuit
        self.b = b
        self.by_function: dict[int, int] = {}
        if index:
            vs = exhaustive_vectors(circuit.n_inputs)
            self.full = vs.mask
            values = net_values(circuit, vs.columns, vs.mask)
            for net in list(circuit.inputs) + [g.id for g in circuit.topo_gates]:
                self.by_function.setdefault(values[net], net)
        self.m = dict(zip(circuit.inputs, inputs))

    def realize(self, net: int) -> int:
        """Copy of ``net``'s cone in the target builder."""
        if net in self.m:
            return self.m[net]
        gm = self.circuit.gate_map
        need, stack = set(), [net]
        while stack:
            x = stack.pop()
            if x in self.m or x in need:
                continue
            need.add(x)
            stack.extend(gm[x].fanins)
        for g in self.circuit.topo_gates:
            if g.id in need:
                self.m[g.id] = self.b.gate(g.kind, *(self.m[n] for n in g.fanins))
        return self.m[net]

    def lookup(self, tt: int) -> int | None:
        net = self.by_function.get(tt)
        if net is not None:
            return self.realize(net)
        net = self.by_function.get(tt ^ self.full)
        if net is not None:
            return self.b.gate(GateKind.NOT, self.realize(net))
        return None


def synthesize_compressor(B: BooleanMatrix, reuse: Netlist | None = None) -> Netlist:
    """k-input, f-output circuit whose output t is column t of B.

    With ``reuse``, a column whose function already appears on some net of
    that circuit (same k inputs), or its complement, is wired from a copy of
    that net's cone instead of being resynthesized.
    """
    n_rows, f = B.shape
    k = n_rows.bit_length() - 1
    if 1 << k != n_rows:
        raise ValueError(f"compressor matrix needs 2^k rows, got {n_rows}")
    b = NetlistBuilder(simplify=True)
    ins = [b.add_input() for _ in range(k)]
    tap = None
    if reuse is not None:
        if reuse.n_inputs != k:
            raise ValueError("reuse circuit must share the compressor's inputs")
        tap = _ConeReuse(reuse, b, ins)
    outs = []
    for t in range(f):
        tt = bits_to_int(B.bits[:, t])
        net = tap.lookup(tt) if tap is not None else None
        if net is None:
            net = map_cover(b, synthesize_column_int(tt, k), ins)
        outs.append(net)
    return b.build(
        outs,
        name="compressor",
        input_names=reuse.input_names if reuse is not None else None,
        sweep=True,
    )


def synthesize_decompressor(C: BooleanMatrix) -> Netlist:
    """f-input, m-output OR network: output j = OR of inputs t with C[t, j]."""
    f, m = C.shape
    b = NetlistBuilder(simplify=True)
    ins = [b.add_input() for _ in range(f)]
    outs = []
    for j in range(m):
        sel = [ins[t] for t in range(f) if C.bits[t, j]]
        if not sel:
            outs.append(b.const(0))
        elif len(sel) == 1:
            outs.append(b.raw_gate(GateKind.BUF, sel[0]))
        else:
            outs.append(_balanced(b, GateKind.OR2, sel))
    return b.build(outs, name="decompressor")


MAX_SUPPORT = 12


def _column_supports(C: BooleanMatrix) -> list[list[int]]:
    """Output columns each compressor column can depend on.

    ASSO decides row r of column t from M[r] restricted to C[t] and from what
    earlier columns already covered there, so dependencies close over earlier
    columns that share a covered output.
    """
    f = C.n_rows
    sup: list[set[int]] = []
    for t in range(f):
        s = set(np.flatnonzero(C.bits[t]).tolist())
        for u in range(t):
            if (C.bits[u] & C.bits[t]).any():
                s |= sup[u]
        sup.append(s)
    return [sorted(s) for s in sup]


def synthesize_compressor_over_outputs(subckt: Netlist, M: BooleanMatrix, B: BooleanMatrix, C: BooleanMatrix):
    """Compressor whose column t is a small function of the exact outputs.

    Returns None when some column is not a function of a small set of output
    columns. Output patterns that never occur are don't-cares.
    """
    b = NetlistBuilder(simplify=True)
    ins = [b.add_input() for _ in range(subckt.n_inputs)]
    tap = _ConeReuse(subckt, b, ins, index=False)
    outs = []
    for t, support in enumerate(_column_supports(C)):
        col = B.bits[:, t]
        if not col.any():
            outs.append(b.const(0))
            continue
        if len(support) > MAX_SUPPORT:
            return None
        weights = 1 << np.arange(len(support), dtype=np.int64)
        keys = M.bits[:, support].astype(np.int64) @ weights if support else np.zeros(M.n_rows, dtype=np.int64)
        on_keys = np.unique(keys[col])
        off_keys = np.unique(keys[~col])
        if np.intersect1d(on_keys, off_keys).size:
            return None
        on = sum(1 << int(x) for x in on_keys)
        off = sum(1 << int(x) for x in off_keys)
        full = (1 << (1 << len(support))) - 1
        cubes, _ = _isop(on, full ^ off, len(support), {})
        cover = SopCover(len(support), tuple(_cube_str(p, q, len(support)) for p, q in cubes))
        nets = [tap.realize(subckt.outputs[j]) for j in support]
        outs.append(map_cover(b, cover, nets))
    return b.build(outs, name="compressor", input_names=subckt.input_names, sweep=True)


@dataclass(frozen=True)
class Approximation:
    netlist: Netlist
    B: BooleanMatrix | None
    C: BooleanMatrix | None
    error_cells: int


def _finish(subckt: Netlist, comp: Netlist, dec: Netlist) -> Netlist:
    joined = compose(comp, dec, name=subckt.name)
    return optimize(Netlist(
        joined.inputs,
        joined.outputs,
        joined.gates,
        name=subckt.name,
        input_names=subckt.input_names,
        output_names=subckt.output_names,
    ))


def approximate(
    subckt: Netlist,
    f: int,
    params: AssoParams | None = None,
    reuse: bool = True,
    lib: CellLibrary | None = None,
) -> Approximation:
    """Factor the subcircuit's truth table at degree ``f`` and resynthesize.

    With ``reuse`` two compressors are built, the two-level one with cone
    reuse and one over the exact outputs; the smaller circuit is kept. Both
    realize the same B, so the choice never changes the error.
    """
    if f < 1:
        raise ValueError("factorization degree must be >= 1")
    if f >= subckt.n_outputs:
        return Approximation(subckt, None, None, 0)
    params = params or AssoParams()
    M = truth_table(subckt)
    B, C = asso_sweep(M, f, params.tau_grid, params)
    dec = synthesize_decompressor(C)
    best = _finish(subckt, synthesize_compressor(B, reuse=subckt if reuse else None), dec)
    if reuse:
        alt = synthesize_compressor_over_outputs(subckt, M, B, C)
        if alt is not None:
            alt = _finish(subckt, alt, dec)
            if area(alt, lib) < area(best, lib):
                best = alt
    return Approximation(best, B, C, factorization_error(M, B, C))


def approximate_subcircuit(
    subckt: Netlist,
    f: int,
    params: AssoParams | None = None,
    reuse: bool = True,
    lib: CellLibrary | None = None,
) -> Netlist:
    return approximate(subckt, f, params, reuse, lib).netlist
