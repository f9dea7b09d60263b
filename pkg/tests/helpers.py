"""Shared test helpers."""
import random
from pathlib import Path

from bmfx.netlist import Gate, GateKind, Netlist, NetlistBuilder

DATA = Path(__file__).parent / "data"

TWO_INPUT = [GateKind.AND2, GateKind.OR2, GateKind.NAND2, GateKind.NOR2, GateKind.XOR2, GateKind.XNOR2]


def random_netlist(n_inputs: int, n_gates: int, n_outputs: int, seed: int) -> Netlist:
    """Random DAG; every gate reads earlier nets, outputs come from the last gates."""
    rng = random.Random(seed)
    gates = []
    nets = list(range(n_inputs))
    nxt = n_inputs
    for _ in range(n_gates):
        if rng.random() < 0.15:
            gates.append(Gate(nxt, GateKind.NOT, (rng.choice(nets),)))
        else:
            a, b = rng.sample(nets, 2) if len(nets) > 1 else (nets[0], nets[0])
            gates.append(Gate(nxt, rng.choice(TWO_INPUT), (a, b)))
        nets.append(nxt)
        nxt += 1
    outs = [g.id for g in gates[-n_outputs:]]
    return Netlist(tuple(range(n_inputs)), tuple(outs), tuple(gates), name=f"rand{seed}")


def mutate(netlist: Netlist, n_changes: int, seed: int) -> Netlist:
    """Same structure with some two-input gates switched to another kind."""
    rng = random.Random(seed)
    gates = list(netlist.gates)
    idx = [i for i, g in enumerate(gates) if g.kind in TWO_INPUT]
    for i in rng.sample(idx, min(n_changes, len(idx))):
        g = gates[i]
        kind = rng.choice([k for k in TWO_INPUT if k is not g.kind])
        gates[i] = Gate(g.id, kind, g.fanins)
    return Netlist(netlist.inputs, netlist.outputs, tuple(gates), netlist.name)


def single_gate(kind: GateKind) -> Netlist:
    b = NetlistBuilder()
    ins = [b.add_input() for _ in range(kind.arity)]
    return b.build([b.raw_gate(kind, *ins)])


def adder_inputs(row: int, n: int) -> tuple[int, int]:
    """Operands of an input pattern for the bundled adders (a0.. then b0..)."""
    mask = (1 << n) - 1
    return row & mask, (row >> n) & mask
