"""Recursive hypergraph bisection of a netlist into bounded-input groups.

Groups are split until each reads at most ``k_max`` nets from outside. Every
split keeps one side closed under predecessors inside the group, so the
quotient graph of the final groups stays acyclic and any group can be
swapped for arbitrary logic over its boundary without creating a loop.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import Infeasible, Unpartitionable
from .netlist import CellLibrary, Netlist, SubcircuitView, make_view

DEFAULT_BALANCE = 0.45
FM_PASSES = 3
MAX_SPLIT_DEPTH = 10


@dataclass(frozen=True)
class Hypergraph:
    """Vertices are gate ids. ``edges`` maps a net id to its pins (sorted),
    ``drivers`` maps it to the driving vertex, or None for a primary input."""

    weights: dict[int, float]
    edges: dict[int, tuple[int, ...]]
    drivers: dict[int, int | None] = field(default_factory=dict)

    @property
    def vertices(self) -> list[int]:
        return sorted(self.weights)

    def incident(self) -> dict[int, list[int]]:
        inc: dict[int, list[int]] = {v: [] for v in self.weights}
        for e, pins in self.edges.items():
            for v in pins:
                inc[v].append(e)
        return inc

    def cut(self, side: dict[int, int]) -> int:
        return sum(1 for pins in self.edges.values() if len({side[v] for v in pins}) > 1)

    def restrict(self, keep: Iterable[int]) -> "Hypergraph":
        keep = set(keep)
        edges = {}
        drivers = {}
        for e, pins in self.edges.items():
            sub = tuple(v for v in pins if v in keep)
            if sub:
                edges[e] = sub
                d = self.drivers.get(e)
                drivers[e] = d if d in keep else None
        return Hypergraph({v: self.weights[v] for v in keep}, edges, drivers)

    def successors(self) -> dict[int, set[int]]:
        succ: dict[int, set[int]] = {v: set() for v in self.weights}
        for e, pins in self.edges.items():
            d = self.drivers.get(e)
            if d is None:
                continue
            for v in pins:
                if v != d:
                    succ[d].add(v)
        return succ


def build_hypergraph(netlist: Netlist, lib: CellLibrary | None = None) -> Hypergraph:
    """One vertex per gate, one hyperedge per net touching >= 2 gates.

    Primary input and output nets become hyperedges even when they touch a
    single gate. Vertex weight is gate area under ``lib``, or 1 without one.
    """
    if lib is None:
        weights = {g.id: 1.0 for g in netlist.gates}
    else:
        weights = {g.id: lib[g.kind] for g in netlist.gates}
    gm = netlist.gate_map
    fo = netlist.fanouts
    io = set(netlist.inputs) | set(netlist.outputs)
    edges, drivers = {}, {}
    for net in list(netlist.inputs) + [g.id for g in netlist.gates]:
        pins = set(fo.get(net, ()))
        if net in gm:
            pins.add(net)
        if len(pins) >= 2 or (pins and net in io):
            edges[net] = tuple(sorted(pins))
            drivers[net] = net if net in gm else None
    return Hypergraph(weights, edges, drivers)


class _FM:
    """State for one FM bisection. Side 0 is ``A``, side 1 is ``B``."""

    def __init__(self, h: Hypergraph, side: dict[int, int], lo: float, hi: float, acyclic: bool):
        self.h = h
        self.side = dict(side)
        self.lo, self.hi = lo, hi
        # passes may wander one vertex past the bounds; kept prefixes may not
        self.slack = max(h.weights.values())
        self.inc = h.incident()
        self.count = {e: [0, 0] for e in h.edges}
        for e, pins in h.edges.items():
            for v in pins:
                self.count[e][self.side[v]] += 1
        self.weight = [0.0, 0.0]
        self.size = [0, 0]
        for v, s in self.side.items():
            self.weight[s] += h.weights[v]
            self.size[s] += 1
        self.cut = sum(1 for c in self.count.values() if c[0] and c[1])
        self.acyclic = acyclic
        if acyclic:
            self.succ = h.successors()
            self.pred: dict[int, set[int]] = {v: set() for v in h.weights}
            for v, ss in self.succ.items():
                for s in ss:
                    self.pred[s].add(v)
            # side 0 must stay closed under predecessors
            self.succ_in_a = {v: sum(1 for s in self.succ[v] if self.side[s] == 0) for v in h.weights}
            self.pred_in_b = {v: sum(1 for p in self.pred[v] if self.side[p] == 1) for v in h.weights}

    def gain(self, v: int) -> int:
        s = self.side[v]
        g = 0
        for e in self.inc[v]:
            c = self.count[e]
            if c[s] == 1:
                g += 1
            if c[1 - s] == 0:
                g -= 1
        return g

    def balanced(self) -> bool:
        return all(self.lo - 1e-9 <= w <= self.hi + 1e-9 for w in self.weight)

    def legal(self, v: int, slack: float = 0.0) -> bool:
        s = self.side[v]
        w = self.h.weights[v]
        if self.size[s] == 1:
            return False
        if self.weight[s] - w < self.lo - slack - 1e-9 or self.weight[1 - s] + w > self.hi + slack + 1e-9:
            return False
        if self.acyclic:
            if s == 0 and self.succ_in_a[v]:
                return False
            if s == 1 and self.pred_in_b[v]:
                return False
        return True

    def move(self, v: int) -> None:
        s = self.side[v]
        t = 1 - s
        for e in self.inc[v]:
            c = self.count[e]
            before = bool(c[0] and c[1])
            c[s] -= 1
            c[t] += 1
            after = bool(c[0] and c[1])
            self.cut += after - before
        w = self.h.weights[v]
        self.weight[s] -= w
        self.weight[t] += w
        self.size[s] -= 1
        self.size[t] += 1
        self.side[v] = t
        if self.acyclic:
            step = 1 if t == 0 else -1
            for p in self.pred[v]:
                self.succ_in_a[p] += step
            for q in self.succ[v]:
                self.pred_in_b[q] -= step

    def best_move(self, locked: set[int], buckets: dict[int, set[int]]) -> int | None:
        for g in sorted(buckets, reverse=True):
            for v in sorted(buckets[g]):
                if v not in locked and self.legal(v, self.slack):
                    return v
        return None

    def run_pass(self) -> bool:
        start = self.cut
        gains = {v: self.gain(v) for v in self.h.weights}
        buckets: dict[int, set[int]] = {}
        for v, g in gains.items():
            buckets.setdefault(g, set()).add(v)
        locked: set[int] = set()
        moves: list[int] = []
        best_cut, best_len = start, 0
        while True:
            v = self.best_move(locked, buckets)
            if v is None:
                break
            buckets[gains[v]].discard(v)
            if not buckets[gains[v]]:
                del buckets[gains[v]]
            locked.add(v)
            self.move(v)
            moves.append(v)
            touched = {u for e in self.inc[v] for u in self.h.edges[e]} - locked
            for u in touched:
                g = self.gain(u)
                if g != gains[u]:
                    buckets[gains[u]].discard(u)
                    if not buckets[gains[u]]:
                        del buckets[gains[u]]
                    gains[u] = g
                    buckets.setdefault(g, set()).add(u)
            if self.cut < best_cut and self.balanced():
                best_cut, best_len = self.cut, len(moves)
        for v in reversed(moves[best_len:]):
            self.move(v)
        assert self.cut == best_cut
        return best_cut < start

    def descend(self) -> None:
        """Apply strictly improving single moves until none is left."""
        while True:
            best = None
            for v in sorted(self.h.weights):
                g = self.gain(v)
                if g > 0 and self.legal(v) and (best is None or g > best[0]):
                    best = (g, v)
            if best is None:
                return
            self.move(best[1])


def fm_bipartition(
    h: Hypergraph,
    balance: float = DEFAULT_BALANCE,
    seed: int = 0,
    *,
    acyclic: bool = False,
    order: Sequence[int] | None = None,
    passes: int = FM_PASSES,
    trace: list[int] | None = None,
):
    """Fiduccia-Mattheyses bisection minimizing hyperedge cut.

    The initial side A is filled from ``order`` (default: a seeded shuffle)
    until it reaches ``balance`` of the total weight. Up to ``passes`` FM
    passes follow, each rolled back to its best prefix, then single improving
    moves are applied until none remain, so the result is a local optimum.
    With ``acyclic`` the initial ``order`` must be topological and no move may
    give A a predecessor in B. ``trace`` receives the cut after setup and
    after every pass.
    """
    if not 0 < balance <= 0.5:
        raise ValueError("balance must lie in (0, 0.5]")
    verts = h.vertices
    if len(verts) < 2:
        raise ValueError("need at least two vertices")
    total = sum(h.weights.values())
    lo, hi = balance * total, (1 - balance) * total
    if order is None:
        order = list(verts)
        random.Random(seed).shuffle(order)
    side = {v: 1 for v in verts}
    acc = 0.0
    filled = 0
    for v in order:
        if acc >= lo - 1e-9 and filled:
            break
        side[v] = 0
        acc += h.weights[v]
        filled += 1
    if acc > hi + 1e-9 or filled == len(verts):
        raise Infeasible(f"cannot fill a side within [{lo:.3g}, {hi:.3g}] of weight {total:.3g}")

    fm = _FM(h, side, lo, hi, acyclic)
    if trace is not None:
        trace.append(fm.cut)
    for _ in range(passes):
        improved = fm.run_pass()
        if trace is not None:
            trace.append(fm.cut)
        if not improved:
            break
    fm.descend()
    if trace is not None:
        trace.append(fm.cut)
    a = frozenset(v for v, s in fm.side.items() if s == 0)
    b = frozenset(v for v, s in fm.side.items() if s == 1)
    return a, b


@dataclass(frozen=True)
class PartitionSet:
    netlist: Netlist
    views: tuple[SubcircuitView, ...]

    def __len__(self):
        return len(self.views)

    def __iter__(self):
        return iter(self.views)

    def __getitem__(self, i):
        return self.views[i]

    def assignment(self) -> dict[int, int]:
        return {gid: v.partition_id for v in self.views for gid in v.gate_ids}


def _boundary_inputs(netlist: Netlist, group: frozenset[int]) -> int:
    gm = netlist.gate_map
    return len({n for gid in group for n in gm[gid].fanins if n not in group})


def _dfs_order(netlist: Netlist, group: frozenset[int]) -> list[int]:
    """Topological order of the group, visiting output cones one at a time."""
    gm = netlist.gate_map
    fo = netlist.fanouts
    sinks = [g for g in sorted(group) if not any(u in group for u in fo.get(g, ()))]
    seen: set[int] = set()
    order = []
    for s in sinks:
        stack = [(s, False)]
        while stack:
            v, done = stack.pop()
            if done:
                order.append(v)
                continue
            if v in seen:
                continue
            seen.add(v)
            stack.append((v, True))
            for n in reversed(gm[v].fanins):
                if n in group and n not in seen:
                    stack.append((n, False))
    return order


def _components(h: Hypergraph) -> list[list[int]]:
    parent = {v: v for v in h.weights}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for pins in h.edges.values():
        r = find(pins[0])
        for v in pins[1:]:
            rv = find(v)
            if rv != r:
                parent[max(rv, r)] = min(rv, r)
                r = min(rv, r)
    comps: dict[int, list[int]] = {}
    for v in sorted(h.weights):
        comps.setdefault(find(v), []).append(v)
    return sorted(comps.values(), key=lambda c: c[0])


def _bisect(netlist: Netlist, h: Hypergraph, group: frozenset[int], depth: int, balance: float, seed: int):
    sub = h.restrict(group)
    comps = _components(sub)
    if len(comps) > 1:
        sides = [[], []]
        load = [0.0, 0.0]
        for comp in sorted(comps, key=lambda c: (-sum(sub.weights[v] for v in c), c[0])):
            s = 0 if load[0] <= load[1] else 1
            sides[s].extend(comp)
            load[s] += sum(sub.weights[v] for v in comp)
        return frozenset(sides[0]), frozenset(sides[1])
    order = _dfs_order(netlist, group)
    if depth < MAX_SPLIT_DEPTH:
        try:
            return fm_bipartition(sub, balance, seed + depth, acyclic=True, order=order)
        except Infeasible:
            pass
    half = len(order) // 2
    return frozenset(order[:half]), frozenset(order[half:])


def partition(
    netlist: Netlist,
    k_max: int = 16,
    seed: int = 0,
    balance: float = DEFAULT_BALANCE,
) -> PartitionSet:
    """Split gates into groups of at most ``k_max`` boundary inputs.

    Groups are ordered by their smallest gate id.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    gm = netlist.gate_map
    for g in netlist.gates:
        if len(set(g.fanins)) > k_max:
            raise Unpartitionable(f"gate {g.id} alone has more than {k_max} inputs")
    h = build_hypergraph(netlist)
    done: list[frozenset[int]] = []
    stack = [(frozenset(gm), 0)] if gm else []
    while stack:
        group, depth = stack.pop()
        if len(group) == 1 or _boundary_inputs(netlist, group) <= k_max:
            done.append(group)
            continue
        a, b = _bisect(netlist, h, group, depth, balance, seed)
        stack.append((b, depth + 1))
        stack.append((a, depth + 1))
    done.sort(key=min)
    views = tuple(make_view(netlist, grp, i) for i, grp in enumerate(done))
    return PartitionSet(netlist, views)


def partition_csv(parts: PartitionSet) -> str:
    rows = ["gate_id,partition_id"]
    for gid, pid in sorted(parts.assignment().items()):
        rows.append(f"{gid},{pid}")
    return "\n".join(rows) + "\n"
