"""Reader and writer for the combinational BLIF subset.

Supported: ``.model``, ``.inputs``, ``.outputs``, ``.names`` and ``.end``,
``#`` comments and backslash line continuation. Covers over at most two
inputs that match a primitive gate become that gate; anything else is
decomposed into an OR of AND terms over literals (balanced trees), with a
trailing NOT for OFF-set covers (output column ``0``).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    BlifSyntaxError,
    CycleDetected,
    MultipleDrivers,
    UndefinedSignal,
    UnsupportedConstruct,
)
from .netlist import GateKind, Netlist, NetlistBuilder

_UNSUPPORTED = {".latch", ".subckt", ".gate", ".mlatch", ".search", ".exdc", ".clock", ".start_kiss"}


@dataclass
class NamesBlock:
    inputs: list[str]
    output: str
    rows: list[tuple[str, str]] = field(default_factory=list)
    line: int = 0


@dataclass
class BlifModel:
    name: str = "top"
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    names_blocks: list[NamesBlock] = field(default_factory=list)


def _logical_lines(text: str):
    """Yield (line number, content) with comments stripped and continuations joined."""
    buf, start = "", None
    for no, raw in enumerate(text.replace("\r\n", "\n").replace("\r", "\n").split("\n"), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if start is None:
            start = no
        if line.endswith("\\"):
            buf += line[:-1] + " "
            continue
        buf += line
        if buf.strip():
            yield start, buf.strip()
        buf, start = "", None
    if buf.strip():
        yield start, buf.strip()


def read_model(text: str) -> BlifModel:
    model = BlifModel()
    seen_model = False
    block: NamesBlock | None = None
    ended = False
    for no, line in _logical_lines(text):
        if ended:
            raise BlifSyntaxError("content after .end", no)
        if line.startswith("."):
            block = None
            words = line.split()
            kw = words[0]
            if kw == ".model":
                if seen_model:
                    raise UnsupportedConstruct("multiple .model sections", no)
                seen_model = True
                model.name = words[1] if len(words) > 1 else "top"
            elif kw == ".inputs":
                model.inputs.extend(words[1:])
            elif kw == ".outputs":
                model.outputs.extend(words[1:])
            elif kw == ".names":
                if len(words) < 2:
                    raise BlifSyntaxError(".names needs an output signal", no)
                block = NamesBlock(words[1:-1], words[-1], line=no)
                model.names_blocks.append(block)
            elif kw == ".end":
                ended = True
            elif kw in _UNSUPPORTED:
                raise UnsupportedConstruct(f"{kw} is not supported", no)
            else:
                raise UnsupportedConstruct(f"unknown directive {kw}", no)
            continue
        if block is None:
            raise BlifSyntaxError(f"cover row outside a .names block: {line!r}", no)
        parts = line.split()
        n = len(block.inputs)
        if n == 0:
            if len(parts) != 1:
                raise BlifSyntaxError(f"constant cover row must be a single bit: {line!r}", no)
            plane, out = "", parts[0]
        else:
            if len(parts) != 2:
                raise BlifSyntaxError(f"malformed cover row {line!r}", no)
            plane, out = parts
        if len(plane) != n or set(plane) - {"0", "1", "-"}:
            raise BlifSyntaxError(f"cover row {plane!r} does not match {n} inputs", no)
        if out not in ("0", "1"):
            raise BlifSyntaxError(f"output bit must be 0 or 1, got {out!r}", no)
        if block.rows and block.rows[0][1] != out:
            raise BlifSyntaxError("cover mixes ON-set and OFF-set rows", no)
        block.rows.append((plane, out))
    return model


def _function(rows: list[tuple[str, str]], n: int) -> int:
    """Truth table (row r at bit r) of a cover over n <= 2 inputs."""
    on = 0
    for r in range(1 << n):
        for plane, _ in rows:
            if all(c == "-" or int(c) == (r >> i) & 1 for i, c in enumerate(plane)):
                on |= 1 << r
                break
    if rows and rows[0][1] == "0":
        on ^= (1 << (1 << n)) - 1
    return on


# truth tables over (a, b) with a as bit 0 of the row index
_PRIM2 = {
    0x8: GateKind.AND2,
    0xE: GateKind.OR2,
    0x7: GateKind.NAND2,
    0x1: GateKind.NOR2,
    0x6: GateKind.XOR2,
    0x9: GateKind.XNOR2,
}


class _Decomposer:
    def __init__(self, b: NetlistBuilder):
        self.b = b
        self.inv: dict[int, int] = {}

    def neg(self, net: int) -> int:
        if net not in self.inv:
            self.inv[net] = self.b.raw_gate(GateKind.NOT, net)
        return self.inv[net]

    def tree(self, kind: GateKind, nets: list[int]) -> int:
        while len(nets) > 1:
            nxt = [self.b.raw_gate(kind, nets[i], nets[i + 1]) for i in range(0, len(nets) - 1, 2)]
            if len(nets) % 2:
                nxt.append(nets[-1])
            nets = nxt
        return nets[0]

    def block(self, fanins: list[int], rows: list[tuple[str, str]]) -> int:
        b = self.b
        n = len(fanins)
        if n <= 2:
            tt = _function(rows, n)
            full = (1 << (1 << n)) - 1
            if tt == 0:
                return b.raw_gate(GateKind.CONST0)
            if tt == full:
                return b.raw_gate(GateKind.CONST1)
            if n == 1:
                return b.raw_gate(GateKind.BUF if tt == 0b10 else GateKind.NOT, fanins[0])
            if tt in _PRIM2:
                return b.raw_gate(_PRIM2[tt], *fanins)
            if tt in (0xA, 0xC):
                return b.raw_gate(GateKind.BUF, fanins[0 if tt == 0xA else 1])
            if tt in (0x5, 0x3):
                return b.raw_gate(GateKind.NOT, fanins[0 if tt == 0x5 else 1])
        if not rows:
            return b.raw_gate(GateKind.CONST0)
        first_new = b._next
        terms = []
        for plane, _ in rows:
            lits = [fanins[i] if c == "1" else self.neg(fanins[i]) for i, c in enumerate(plane) if c != "-"]
            if not lits:
                terms = None
                break
            terms.append(self.tree(GateKind.AND2, lits))
        offset = rows[0][1] == "0"
        if terms is None:
            return b.raw_gate(GateKind.CONST0 if offset else GateKind.CONST1)
        root = self.tree(GateKind.OR2, terms)
        if offset:
            return b.raw_gate(GateKind.NOT, root)
        if root < first_new:
            # single literal: the signal still needs a driver of its own
            return b.raw_gate(GateKind.BUF, root)
        return root


def parse_blif(text: str) -> Netlist:
    model = read_model(text)
    drivers: dict[str, NamesBlock] = {}
    for name in model.inputs:
        if name in drivers or model.inputs.count(name) > 1:
            raise MultipleDrivers(f"input {name!r} declared twice")
        drivers[name] = None
    for blk in model.names_blocks:
        if blk.output in drivers:
            raise MultipleDrivers(f"signal {blk.output!r} has more than one driver", blk.line)
        drivers[blk.output] = blk
    for blk in model.names_blocks:
        for s in blk.inputs:
            if s not in drivers:
                raise UndefinedSignal(f"signal {s!r} is never driven", blk.line)
    for s in model.outputs:
        if s not in drivers:
            raise UndefinedSignal(f"output {s!r} is never driven")

    b = NetlistBuilder()
    net = {name: b.add_input() for name in model.inputs}
    dec = _Decomposer(b)
    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    for root in model.names_blocks:
        if root.output in net:
            continue
        stack = [(root, 0)]
        state[root.output] = 1
        while stack:
            blk, i = stack.pop()
            if i < len(blk.inputs):
                stack.append((blk, i + 1))
                dep = blk.inputs[i]
                if dep in net:
                    continue
                if state.get(dep) == 1:
                    raise CycleDetected(f"combinational cycle through {dep!r}")
                state[dep] = 1
                stack.append((drivers[dep], 0))
                continue
            net[blk.output] = dec.block([net[s] for s in blk.inputs], blk.rows)
            state[blk.output] = 2
    return b.build(
        [net[s] for s in model.outputs],
        name=model.name,
        input_names=model.inputs,
        output_names=model.outputs,
    )


_COVERS = {
    GateKind.CONST0: [],
    GateKind.CONST1: ["1"],
    GateKind.BUF: ["1 1"],
    GateKind.NOT: ["0 1"],
    GateKind.AND2: ["11 1"],
    GateKind.OR2: ["1- 1", "-1 1"],
    GateKind.NAND2: ["0- 1", "-0 1"],
    GateKind.NOR2: ["00 1"],
    GateKind.XOR2: ["01 1", "10 1"],
    GateKind.XNOR2: ["00 1", "11 1"],
}


def write_blif(netlist: Netlist) -> str:
    names: dict[int, str] = dict(zip(netlist.inputs, netlist.input_names))
    used = set(netlist.input_names) | set(netlist.output_names)
    aliases = []
    for net, oname in zip(netlist.outputs, netlist.output_names):
        if names.get(net) == oname:
            continue
        if net in names or net not in netlist.gate_map:
            aliases.append((net, oname))
        else:
            names[net] = oname
    for g in netlist.topo_gates:
        if g.id not in names:
            cand = f"n{g.id}"
            while cand in used:
                cand += "_"
            names[g.id] = cand
            used.add(cand)

    lines = [f".model {netlist.name}"]
    lines.append(".inputs " + " ".join(netlist.input_names) if netlist.input_names else ".inputs")
    lines.append(".outputs " + " ".join(netlist.output_names) if netlist.output_names else ".outputs")
    for g in netlist.topo_gates:
        lines.append(" ".join([".names", *(names[n] for n in g.fanins), names[g.id]]))
        lines.extend(_COVERS[g.kind])
    for net, oname in aliases:
        lines.append(f".names {names[net]} {oname}")
        lines.append("1 1")
    lines.append(".end")
    return "\n".join(lines) + "\n"


def read_blif_file(path) -> Netlist:
    import sys

    if str(path) == "-":
        return parse_blif(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_blif(fh.read())
