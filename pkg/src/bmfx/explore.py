"""Greedy design-space exploration over per-partition factorization degrees.

Each round tries lowering every partition's degree by one, rebuilds and
optimizes the whole circuit, and measures area plus Hamming error against the
exact circuit on one shared vector set. The candidate with the smallest
error-to-area-saving ratio is committed.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .bmf import DEFAULT_TAU_GRID, AssoParams
from .errors import DegreeUnderflow, NoCandidates
from .netlist import CellLibrary, Netlist, area, extract_subcircuit, optimize, replace_subcircuits
from .partition import PartitionSet, partition
from .resynth import approximate_subcircuit
from .sim import OutputMatrix, VectorSet, gen_vectors, hamming_error, simulate

log = logging.getLogger(__name__)

RATIO_MODES = ("absolute", "delta")


@dataclass(frozen=True)
class FStream:
    degrees: tuple[int, ...]

    def decremented(self, i: int) -> "FStream":
        if self.degrees[i] <= 1:
            raise DegreeUnderflow(f"partition {i} is already at degree 1")
        d = list(self.degrees)
        d[i] -= 1
        return FStream(tuple(d))

    def __str__(self):
        return "-".join(str(d) for d in self.degrees)


@dataclass(frozen=True)
class TradeoffRecord:
    fstream: FStream
    area: float
    hd_error: float
    step: int
    chosen_partition: int | None = None


@dataclass(frozen=True)
class ExplorationConfig:
    error_threshold: float = 0.05
    n_vectors: int = 10_000
    seed: int = 1
    k_max: int = 16
    jobs: int = 1
    tau_grid: tuple[float, ...] = DEFAULT_TAU_GRID
    ratio: str = "absolute"
    lib: CellLibrary = field(default_factory=CellLibrary.default)
    balance: float = 0.45

    def __post_init__(self):
        if self.error_threshold < 0:
            raise ValueError("error threshold must be >= 0")
        if self.n_vectors < 1:
            raise ValueError("need at least one test vector")
        if self.ratio not in RATIO_MODES:
            raise ValueError(f"ratio must be one of {RATIO_MODES}")

    @property
    def parallel_candidates(self) -> bool:
        return self.jobs > 1

    @property
    def asso_params(self) -> AssoParams:
        return AssoParams(tau_grid=tuple(self.tau_grid))


class ExplorationContext:
    """Immutable inputs of one run plus memoized per-partition approximations.

    ``approx(i, f)`` is a pure function of its arguments, so caching it never
    changes results.
    """

    def __init__(self, netlist: Netlist, partitions: PartitionSet, vectors: VectorSet, config: ExplorationConfig):
        self.netlist = netlist
        self.partitions = partitions
        self.vectors = vectors
        self.config = config
        self.subckts = [extract_subcircuit(netlist, v) for v in partitions]
        self.max_degrees = FStream(tuple(s.n_outputs for s in self.subckts))
        self.baseline: OutputMatrix = simulate(netlist, vectors)
        self._cache: dict[tuple[int, int], Netlist] = {}

    def approx(self, i: int, f: int) -> Netlist:
        key = (i, f)
        if key not in self._cache:
            self._cache[key] = approximate_subcircuit(self.subckts[i], f, self.config.asso_params, lib=self.config.lib)
        return self._cache[key]

    def assemble(self, fstream: FStream) -> Netlist:
        subs = [
            (view, self.approx(i, f))
            for i, (view, f) in enumerate(zip(self.partitions, fstream.degrees))
            if f < self.max_degrees.degrees[i]
        ]
        full = replace_subcircuits(self.netlist, subs) if subs else self.netlist
        return optimize(full)

    def measure(self, fstream: FStream) -> tuple[float, float, Netlist]:
        circuit = self.assemble(fstream)
        err = hamming_error(self.baseline, simulate(circuit, self.vectors))
        return area(circuit, self.config.lib), err, circuit


def evaluate_candidate(ctx: ExplorationContext, fstream: FStream, i: int) -> tuple[float, float]:
    """(area, hd_error) with partition ``i`` one degree lower; no state changes."""
    a, e, _ = ctx.measure(fstream.decremented(i))
    return a, e


def greedy_step(current: TradeoffRecord, candidates: Sequence[tuple[int, float, float]], ratio: str = "absolute") -> int:
    """Pick the candidate with the least error per unit of area saved.

    Candidates saving no area are considered only when none saves any; then
    the lowest error wins. Ties go to the lower partition index.
    """
    if not candidates:
        raise NoCandidates("every partition is already at degree 1")
    saving = [(i, current.area - a, e) for i, a, e in candidates]
    positive = [c for c in saving if c[1] > 0]
    if positive:
        def key(c):
            i, red, e = c
            num = e - current.hd_error if ratio == "delta" else e
            return (num / red, i)

        return min(positive, key=key)[0]
    return min(saving, key=lambda c: (c[2], c[0]))[0]


_WORKER_CTX: ExplorationContext | None = None


def _init_worker(netlist, partitions, vectors, config):
    global _WORKER_CTX
    _WORKER_CTX = ExplorationContext(netlist, partitions, vectors, config)


def _eval_in_worker(args):
    degrees, i = args
    return evaluate_candidate(_WORKER_CTX, FStream(degrees), i)


@dataclass
class ExplorationResult:
    records: list[TradeoffRecord]
    final: Netlist
    final_record: TradeoffRecord
    partitions: PartitionSet
    step_netlists: list[Netlist] = field(default_factory=list)


def explore(netlist: Netlist, config: ExplorationConfig | None = None, keep_steps: bool = False) -> ExplorationResult:
    """Run the greedy loop until a committed step exceeds the error budget
    or every partition reaches degree 1.

    The step that first exceeds the budget is recorded; the returned circuit
    is the last one within budget.
    """
    config = config or ExplorationConfig()
    exact = optimize(netlist)
    parts = partition(exact, config.k_max, config.seed, config.balance)
    vectors = gen_vectors(max(1, exact.n_inputs), config.n_vectors, config.seed)
    if exact.n_inputs == 0:
        vectors = VectorSet(0, vectors.n_vectors, (), vectors.seed)
    ctx = ExplorationContext(exact, parts, vectors, config)

    fs = ctx.max_degrees
    base_area = area(exact, config.lib)
    records = [TradeoffRecord(fs, base_area, 0.0, 0, None)]
    final, final_rec = exact, records[0]
    steps = [exact] if keep_steps else []
    log.info("%d partitions, baseline area %.2f", len(parts), base_area)

    pool = None
    if config.jobs > 1:
        pool = ProcessPoolExecutor(
            max_workers=config.jobs, initializer=_init_worker, initargs=(exact, parts, vectors, config)
        )
    try:
        while True:
            movable = [i for i, f in enumerate(fs.degrees) if f > 1]
            if not movable:
                break
            if pool is not None:
                results = list(pool.map(_eval_in_worker, [(fs.degrees, i) for i in movable]))
            else:
                results = [evaluate_candidate(ctx, fs, i) for i in movable]
            cands = [(i, a, e) for i, (a, e) in zip(movable, results)]
            pick = greedy_step(records[-1], cands, config.ratio)
            fs = fs.decremented(pick)
            a, e, circuit = ctx.measure(fs)
            rec = TradeoffRecord(fs, a, e, len(records), pick)
            records.append(rec)
            if keep_steps:
                steps.append(circuit)
            log.info("step %d: partition %d -> f=%s area=%.2f hd=%.5f", rec.step, pick, fs, a, e)
            if e > config.error_threshold:
                break
            final, final_rec = circuit, rec
    finally:
        if pool is not None:
            pool.shutdown()
    return ExplorationResult(records, final, final_rec, parts, steps)


def trajectory_csv(records: Sequence[TradeoffRecord], header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines.append("step,chosen_partition,fstream,area,hd_error")
    for r in records:
        chosen = "NONE" if r.chosen_partition is None else str(r.chosen_partition)
        lines.append(f"{r.step},{chosen},{r.fstream},{r.area!r},{r.hd_error!r}")
    return "\n".join(lines) + "\n"


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)
