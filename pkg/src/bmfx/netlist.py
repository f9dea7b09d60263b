"""Gate-level netlist representation and structural surgery.

A netlist is a DAG of primitive gates over integer net ids. Every gate drives
exactly one net and that net carries the gate's own id, so ``gate.id`` doubles
as its output net. Primary inputs are nets with no driving gate.

Netlists are immutable; every operation returns a new value.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    CycleDetected,
    DanglingReference,
    InterfaceMismatch,
    UnknownCell,
)


class GateKind(Enum):
    CONST0 = "CONST0"
    CONST1 = "CONST1"
    BUF = "BUF"
    NOT = "NOT"
    AND2 = "AND2"
    OR2 = "OR2"
    NAND2 = "NAND2"
    NOR2 = "NOR2"
    XOR2 = "XOR2"
    XNOR2 = "XNOR2"

    @property
    def arity(self) -> int:
        return _ARITY[self]


_ARITY = {
    GateKind.CONST0: 0,
    GateKind.CONST1: 0,
    GateKind.BUF: 1,
    GateKind.NOT: 1,
}
for _k in GateKind:
    _ARITY.setdefault(_k, 2)

COMMUTATIVE = frozenset(
    {GateKind.AND2, GateKind.OR2, GateKind.NAND2, GateKind.NOR2, GateKind.XOR2, GateKind.XNOR2}
)


@dataclass(frozen=True)
class Gate:
    id: int
    kind: GateKind
    fanins: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.fanins) != self.kind.arity:
            raise ValueError(
                f"gate {self.id}: {self.kind.value} takes {self.kind.arity} fanins, got {len(self.fanins)}"
            )


@dataclass(frozen=True, eq=True)
class Netlist:
    """Combinational netlist.

    ``inputs`` and ``outputs`` are ordered net-id tuples. An output may name a
    primary input directly, and several outputs may share one net.
    """

    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    gates: tuple[Gate, ...]
    name: str = "top"
    input_names: tuple[str, ...] | None = field(default=None, compare=False)
    output_names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.input_names is None:
            object.__setattr__(self, "input_names", tuple(f"i{j}" for j in range(len(self.inputs))))
        if self.output_names is None:
            object.__setattr__(self, "output_names", tuple(f"o{j}" for j in range(len(self.outputs))))
        if len(self.input_names) != len(self.inputs) or len(self.output_names) != len(self.outputs):
            raise ValueError("name lists must match the primary I/O lists")
        if len(set(self.inputs)) != len(self.inputs):
            raise ValueError("duplicate primary input net")
        drivers = set(self.inputs)
        for g in self.gates:
            if g.id in drivers:
                raise ValueError(f"net {g.id} has more than one driver")
            drivers.add(g.id)
        for g in self.gates:
            for net in g.fanins:
                if net not in drivers:
                    raise DanglingReference(f"gate {g.id} reads undriven net {net}")
        for net in self.outputs:
            if net not in drivers:
                raise DanglingReference(f"primary output reads undriven net {net}")
        # validates acyclicity as a side effect
        self.topo_gates  # noqa: B018

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    @property
    def n_outputs(self) -> int:
        return len(self.outputs)

    @cached_property
    def gate_map(self) -> dict[int, Gate]:
        return {g.id: g for g in self.gates}

    @cached_property
    def fanouts(self) -> dict[int, tuple[int, ...]]:
        """Net id -> ids of gates reading it (sorted, unique)."""
        out: dict[int, set[int]] = {}
        for g in self.gates:
            for net in g.fanins:
                out.setdefault(net, set()).add(g.id)
        return {net: tuple(sorted(s)) for net, s in out.items()}

    @cached_property
    def topo_gates(self) -> tuple[Gate, ...]:
        gm = self.gate_map
        return tuple(gm[i] for i in _kahn(self.gates))


def _kahn(gates: Sequence[Gate]) -> list[int]:
    ids = {g.id for g in gates}
    indeg = {}
    users: dict[int, list[int]] = {}
    for g in gates:
        deps = {net for net in g.fanins if net in ids}
        indeg[g.id] = len(deps)
        for net in deps:
            users.setdefault(net, []).append(g.id)
    heap = [gid for gid, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        gid = heapq.heappop(heap)
        order.append(gid)
        for u in users.get(gid, ()):
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(heap, u)
    if len(order) != len(gates):
        raise CycleDetected(f"{len(gates) - len(order)} gates sit on combinational cycles")
    return order


def topo_order(netlist: Netlist) -> list[int]:
    """Gate ids in topological order; ties resolve to the lowest id."""
    return [g.id for g in netlist.topo_gates]


# -- area -------------------------------------------------------------------

DEFAULT_AREAS = {
    GateKind.CONST0: 0.0,
    GateKind.CONST1: 0.0,
    GateKind.BUF: 0.0,
    GateKind.NOT: 0.5,
    GateKind.AND2: 1.0,
    GateKind.OR2: 1.0,
    GateKind.NAND2: 0.75,
    GateKind.NOR2: 0.75,
    GateKind.XOR2: 1.5,
    GateKind.XNOR2: 1.5,
}


def _kind(key) -> GateKind:
    return key if isinstance(key, GateKind) else GateKind(str(key).upper())


@dataclass(frozen=True)
class CellLibrary:
    areas: Mapping[GateKind, float] = field(default_factory=lambda: dict(DEFAULT_AREAS))

    def __post_init__(self):
        areas = {_kind(k): float(a) for k, a in self.areas.items()}
        for kind, a in areas.items():
            if a < 0:
                raise ValueError(f"negative area for {kind.value}")
        object.__setattr__(self, "areas", areas)

    @classmethod
    def default(cls) -> "CellLibrary":
        return cls(dict(DEFAULT_AREAS))

    def with_overrides(self, overrides: Mapping[str | GateKind, float]) -> "CellLibrary":
        areas = dict(self.areas)
        for key, value in overrides.items():
            areas[_kind(key)] = float(value)
        return CellLibrary(areas)

    def __getitem__(self, kind: GateKind | str) -> float:
        try:
            return self.areas[_kind(kind)]
        except (KeyError, ValueError):
            raise UnknownCell(f"no area for cell {getattr(kind, 'value', kind)}") from None


def area(netlist: Netlist, lib: CellLibrary | None = None) -> float:
    lib = lib or CellLibrary.default()
    return float(sum(lib[g.kind] for g in netlist.gates))


# -- builder ----------------------------------------------------------------


class NetlistBuilder:
    """Incremental netlist construction with dense, insertion-ordered ids.

    With ``simplify=True`` every ``gate`` call folds constants, drops buffers,
    cancels double inversions and structurally hashes against earlier gates.
    ``raw_gate`` always instantiates.
    """

    def __init__(self, simplify: bool = False):
        self.simplify = simplify
        self._inputs: list[int] = []
        self._gates: list[Gate] = []
        self._next = 0
        self._strash: dict[tuple, int] = {}
        self._const: dict[int, int] = {}  # net -> constant value
        self._not_of: dict[int, int] = {}  # NOT output net -> its fanin
        self._const_net: dict[int, int] = {}

    def add_input(self) -> int:
        net = self._next
        self._next += 1
        self._inputs.append(net)
        return net

    def raw_gate(self, kind: GateKind, *fanins: int) -> int:
        net = self._next
        self._next += 1
        self._gates.append(Gate(net, kind, tuple(fanins)))
        if kind is GateKind.CONST0:
            self._const[net] = 0
        elif kind is GateKind.CONST1:
            self._const[net] = 1
        elif kind is GateKind.NOT:
            self._not_of[net] = fanins[0]
        return net

    def const(self, value: int) -> int:
        if value not in self._const_net:
            kind = GateKind.CONST1 if value else GateKind.CONST0
            self._const_net[value] = self.raw_gate(kind)
        return self._const_net[value]

    def _hashed(self, kind: GateKind, fanins: tuple[int, ...]) -> int:
        if kind in COMMUTATIVE:
            fanins = tuple(sorted(fanins))
        key = (kind, fanins)
        net = self._strash.get(key)
        if net is None:
            net = self.raw_gate(kind, *fanins)
            self._strash[key] = net
        return net

    def is_complement(self, a: int, b: int) -> bool:
        return self._not_of.get(a) == b or self._not_of.get(b) == a

    def gate(self, kind: GateKind, *fanins: int) -> int:
        if not self.simplify:
            return self.raw_gate(kind, *fanins)
        K = GateKind
        if kind is K.CONST0:
            return self.const(0)
        if kind is K.CONST1:
            return self.const(1)
        if kind is K.BUF:
            return fanins[0]
        if kind is K.NOT:
            (a,) = fanins
            if a in self._const:
                return self.const(1 - self._const[a])
            if a in self._not_of:
                return self._not_of[a]
            return self._hashed(K.NOT, (a,))

        a, b = fanins
        ca, cb = self._const.get(a), self._const.get(b)
        if ca is not None and cb is not None:
            return self.const(_EVAL2[kind](ca, cb))
        if ca is not None or cb is not None:
            c, x = (ca, b) if ca is not None else (cb, a)
            rule = _CONST_RULES[kind][c]
            if rule == "x":
                return x
            if rule == "~x":
                return self.gate(K.NOT, x)
            return self.const(rule)
        if a == b:
            rule = _SAME_RULES[kind]
        elif self.is_complement(a, b):
            rule = _COMPL_RULES[kind]
        else:
            return self._hashed(kind, (a, b))
        if rule == "x":
            return a
        if rule == "~x":
            return self.gate(K.NOT, a)
        return self.const(rule)

    def build(
        self,
        outputs: Sequence[int],
        name: str = "top",
        input_names: Sequence[str] | None = None,
        output_names: Sequence[str] | None = None,
        sweep: bool = False,
    ) -> Netlist:
        """Freeze into a Netlist, re-indexing densely (inputs first).

        ``sweep`` drops gates that reach no output.
        """
        gates = self._gates
        if sweep:
            live = set(outputs)
            for g in reversed(gates):
                if g.id in live:
                    live.update(g.fanins)
            gates = [g for g in gates if g.id in live]
        remap = {net: j for j, net in enumerate(self._inputs)}
        for g in gates:
            remap[g.id] = len(remap)
        new_gates = tuple(Gate(remap[g.id], g.kind, tuple(remap[n] for n in g.fanins)) for g in gates)
        return Netlist(
            inputs=tuple(range(len(self._inputs))),
            outputs=tuple(remap[n] for n in outputs),
            gates=new_gates,
            name=name,
            input_names=tuple(input_names) if input_names is not None else None,
            output_names=tuple(output_names) if output_names is not None else None,
        )


_EVAL2 = {
    GateKind.AND2: lambda a, b: a & b,
    GateKind.OR2: lambda a, b: a | b,
    GateKind.NAND2: lambda a, b: 1 - (a & b),
    GateKind.NOR2: lambda a, b: 1 - (a | b),
    GateKind.XOR2: lambda a, b: a ^ b,
    GateKind.XNOR2: lambda a, b: 1 - (a ^ b),
}

# kind -> {constant operand value: result}, result is "x", "~x" or a constant
_CONST_RULES = {
    GateKind.AND2: {0: 0, 1: "x"},
    GateKind.OR2: {0: "x", 1: 1},
    GateKind.NAND2: {0: 1, 1: "~x"},
    GateKind.NOR2: {0: "~x", 1: 0},
    GateKind.XOR2: {0: "x", 1: "~x"},
    GateKind.XNOR2: {0: "~x", 1: "x"},
}
_SAME_RULES = {
    GateKind.AND2: "x",
    GateKind.OR2: "x",
    GateKind.NAND2: "~x",
    GateKind.NOR2: "~x",
    GateKind.XOR2: 0,
    GateKind.XNOR2: 1,
}
_COMPL_RULES = {
    GateKind.AND2: 0,
    GateKind.OR2: 1,
    GateKind.NAND2: 1,
    GateKind.NOR2: 0,
    GateKind.XOR2: 1,
    GateKind.XNOR2: 0,
}


def copy_into(builder: NetlistBuilder, netlist: Netlist, input_nets: Sequence[int], raw: bool = False) -> list[int]:
    """Instantiate ``netlist`` inside ``builder`` with its inputs bound to
    ``input_nets``; returns the builder nets carrying its outputs."""
    if len(input_nets) != netlist.n_inputs:
        raise InterfaceMismatch(f"expected {netlist.n_inputs} input nets, got {len(input_nets)}")
    m = dict(zip(netlist.inputs, input_nets))
    make = builder.raw_gate if raw else builder.gate
    for g in netlist.topo_gates:
        m[g.id] = make(g.kind, *(m[n] for n in g.fanins))
    return [m[n] for n in netlist.outputs]


# -- subcircuit views -------------------------------------------------------


@dataclass(frozen=True)
class SubcircuitView:
    partition_id: int
    gate_ids: frozenset[int]
    boundary_inputs: tuple[int, ...]
    boundary_outputs: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.boundary_inputs)

    @property
    def m(self) -> int:
        return len(self.boundary_outputs)


def make_view(netlist: Netlist, gate_ids: Iterable[int], partition_id: int = 0) -> SubcircuitView:
    """Derive boundary nets for a gate group from scratch."""
    ids = frozenset(gate_ids)
    gm = netlist.gate_map
    b_in = set()
    for gid in ids:
        for net in gm[gid].fanins:
            if net not in ids:
                b_in.add(net)
    po = set(netlist.outputs)
    fo = netlist.fanouts
    b_out = set()
    for gid in ids:
        if gid in po or any(u not in ids for u in fo.get(gid, ())):
            b_out.add(gid)
    return SubcircuitView(partition_id, ids, tuple(sorted(b_in)), tuple(sorted(b_out)))


def extract_subcircuit(netlist: Netlist, view: SubcircuitView) -> Netlist:
    gm = netlist.gate_map
    allowed = set(view.gate_ids) | set(view.boundary_inputs)
    for gid in view.gate_ids:
        for net in gm[gid].fanins:
            if net not in allowed:
                raise DanglingReference(f"gate {gid} reads net {net}, which is neither internal nor a boundary input")
    b = NetlistBuilder()
    m = {net: b.add_input() for net in view.boundary_inputs}
    for g in netlist.topo_gates:
        if g.id in view.gate_ids:
            m[g.id] = b.raw_gate(g.kind, *(m[n] for n in g.fanins))
    for net in view.boundary_outputs:
        if net not in m:
            raise DanglingReference(f"boundary output {net} is not driven inside the view")
    return b.build(
        [m[n] for n in view.boundary_outputs],
        name=f"{netlist.name}_p{view.partition_id}",
        input_names=[_net_name(netlist, n) for n in view.boundary_inputs],
        output_names=[_net_name(netlist, n) for n in view.boundary_outputs],
    )


def _net_name(netlist: Netlist, net: int) -> str:
    try:
        return netlist.input_names[netlist.inputs.index(net)]
    except ValueError:
        return f"n{net}"


def replace_subcircuits(
    netlist: Netlist, substitutions: Sequence[tuple[SubcircuitView, Netlist]]
) -> Netlist:
    """Swap several disjoint views for replacement logic in one rebuild.

    Gates outside every view are copied unchanged; consumers of a view's
    boundary outputs are rewired to the replacement's outputs. The result is
    re-indexed in topological insertion order.
    """
    owner: dict[int, int] = {}
    for idx, (view, repl) in enumerate(substitutions):
        if repl.n_inputs != len(view.boundary_inputs) or repl.n_outputs != len(view.boundary_outputs):
            raise InterfaceMismatch(
                f"view {view.partition_id} is {len(view.boundary_inputs)}->{len(view.boundary_outputs)}, "
                f"replacement is {repl.n_inputs}->{repl.n_outputs}"
            )
        for gid in view.gate_ids:
            if gid in owner:
                raise InterfaceMismatch(f"gate {gid} belongs to two substituted views")
            owner[gid] = idx

    gm = netlist.gate_map
    # unit graph: ('g', gate id) for untouched gates, ('v', idx) per view
    def unit_of(net):
        if net not in gm:
            return None
        idx = owner.get(net)
        return ("v", idx) if idx is not None else ("g", net)

    units = {}
    for g in netlist.gates:
        if g.id not in owner:
            units[("g", g.id)] = {unit_of(n) for n in g.fanins} - {None}
    for idx, (view, _) in enumerate(substitutions):
        units[("v", idx)] = {unit_of(n) for n in view.boundary_inputs} - {None}
    key = {u: (u[1] if u[0] == "g" else min(substitutions[u[1]][0].gate_ids, default=-1)) for u in units}
    users: dict = {}
    indeg = {}
    for u, deps in units.items():
        if u in deps:
            raise InterfaceMismatch("a view's boundary inputs depend on its own outputs")
        indeg[u] = len(deps)
        for d in deps:
            users.setdefault(d, []).append(u)
    heap = [(key[u], u) for u, d in indeg.items() if d == 0]
    heapq.heapify(heap)

    b = NetlistBuilder()
    m = {net: b.add_input() for net in netlist.inputs}
    done = 0
    while heap:
        _, u = heapq.heappop(heap)
        done += 1
        if u[0] == "g":
            g = gm[u[1]]
            m[g.id] = b.raw_gate(g.kind, *(m[n] for n in g.fanins))
        else:
            view, repl = substitutions[u[1]]
            outs = copy_into(b, repl, [m[n] for n in view.boundary_inputs], raw=True)
            for net, new in zip(view.boundary_outputs, outs):
                m[net] = new
        for w in users.get(u, ()):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, (key[w], w))
    if done != len(units):
        raise CycleDetected("substitution creates a combinational cycle")
    try:
        outputs = [m[n] for n in netlist.outputs]
    except KeyError as exc:
        raise DanglingReference(f"output net {exc.args[0]} lost its driver") from None
    return b.build(outputs, name=netlist.name, input_names=netlist.input_names, output_names=netlist.output_names)


def replace_subcircuit(netlist: Netlist, view: SubcircuitView, replacement: Netlist) -> Netlist:
    return replace_subcircuits(netlist, [(view, replacement)])


# -- optimization -----------------------------------------------------------

MAX_OPT_ROUNDS = 10


def _one_round(netlist: Netlist) -> Netlist:
    b = NetlistBuilder(simplify=True)
    m = {net: b.add_input() for net in netlist.inputs}
    for g in netlist.topo_gates:
        m[g.id] = b.gate(g.kind, *(m[n] for n in g.fanins))
    return b.build(
        [m[n] for n in netlist.outputs],
        name=netlist.name,
        input_names=netlist.input_names,
        output_names=netlist.output_names,
        sweep=True,
    )


def optimize(netlist: Netlist) -> Netlist:
    """Constant propagation, buffer/inverter-pair collapsing, structural
    hashing and dead-gate removal, iterated to a fixed point (max 10 rounds)."""
    cur = netlist
    for _ in range(MAX_OPT_ROUNDS):
        nxt = _one_round(cur)
        if nxt == cur:
            break
        cur = nxt
    return cur


def compose(first: Netlist, second: Netlist, name: str | None = None) -> Netlist:
    """Feed ``first``'s outputs into ``second``'s inputs."""
    if first.n_outputs != second.n_inputs:
        raise InterfaceMismatch(f"{first.n_outputs} outputs cannot feed {second.n_inputs} inputs")
    b = NetlistBuilder()
    ins = [b.add_input() for _ in first.inputs]
    mid = copy_into(b, first, ins, raw=True)
    outs = copy_into(b, second, mid, raw=True)
    return b.build(
        outs,
        name=name or first.name,
        input_names=first.input_names,
        output_names=second.output_names,
    )
