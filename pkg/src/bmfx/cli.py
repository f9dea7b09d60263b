"""Command-line entry point: ``bmfx run`` plus debug sub-commands."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .blif import read_blif_file, write_blif
from .bmf import BooleanMatrix, asso_sweep, factorization_error, identity_factorization
from .config import RunConfig, load_config
from .errors import BmfxError, ConfigError
from .explore import explore, trajectory_csv
from .netlist import area, compose, optimize
from .partition import partition, partition_csv
from .resynth import synthesize_compressor, synthesize_decompressor
from .sim import exhaustive_vectors, gen_vectors, simulate

log = logging.getLogger("bmfx")


def _write_text(path, text: str) -> None:
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_text(path) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def artifact_paths(output: Path) -> dict[str, Path]:
    stem = output.with_suffix("") if output.suffix == ".blif" else output
    return {
        "blif": output,
        "csv": Path(f"{stem}.csv"),
        "gp": Path(f"{stem}.gp"),
        "png": Path(f"{stem}.png"),
        "steps": Path(f"{stem}_steps"),
    }


def cmd_run(cfg: RunConfig) -> int:
    from .plotting import gnuplot_script, tradeoff_figure

    netlist = read_blif_file(cfg.input)
    result = explore(netlist, cfg.exploration(), keep_steps=cfg.emit_steps)
    out = cfg.output_path()
    paths = artifact_paths(out)
    title = f"{netlist.name}: area vs HD error"

    _write_text(out, write_blif(result.final))
    paths["csv"].write_text(trajectory_csv(result.records, cfg.header_lines()), encoding="utf-8")
    paths["gp"].write_text(gnuplot_script(paths["csv"].name, paths["png"].name, title), encoding="utf-8")
    tradeoff_figure(result.records, paths["png"], title, cfg.threshold)
    if cfg.emit_steps:
        paths["steps"].mkdir(parents=True, exist_ok=True)
        for rec, circ in zip(result.records, result.step_netlists):
            (paths["steps"] / f"step{rec.step:03d}.blif").write_text(write_blif(circ), encoding="utf-8")

    base = result.records[0].area
    fin = result.final_record.area
    pct = 100.0 * (base - fin) / base if base > 0 else 0.0
    print(
        f"area_baseline={base:.4f}, area_final={fin:.4f}, "
        f"reduction_pct={pct:.4f}, hd_error_final={result.final_record.hd_error:.6f}"
    )
    return 0


def cmd_partition(args) -> int:
    netlist = optimize(read_blif_file(args.input)) if args.optimize else read_blif_file(args.input)
    parts = partition(netlist, args.kmax, args.seed)
    _write_text(args.output, partition_csv(parts))
    return 0


def _matrix_arg(path) -> BooleanMatrix:
    return BooleanMatrix.from_text(_read_text(path))


def cmd_factor(args) -> int:
    M = _matrix_arg(args.matrix)
    grid = tuple(float(t) for t in args.tau_grid.split(",")) if args.tau_grid else None
    B, C = asso_sweep(M, args.f, grid)
    print("# B")
    print(B.to_text())
    print("# C")
    print(C.to_text())
    print(f"error={factorization_error(M, B, C)}")
    return 0


def cmd_simulate(args) -> int:
    netlist = read_blif_file(args.input)
    if args.exhaustive:
        vs = exhaustive_vectors(netlist.n_inputs)
    else:
        vs = gen_vectors(netlist.n_inputs, args.vectors, args.seed)
    out = simulate(netlist, vs)
    ones = out.to_array().sum(axis=0) if out.n_outputs else np.zeros(0, dtype=int)
    print(f"inputs={netlist.n_inputs} outputs={netlist.n_outputs} gates={len(netlist.gates)} "
          f"area={area(netlist):.4f} vectors={vs.n_vectors}")
    for name, k in zip(netlist.output_names, ones):
        print(f"{name},{int(k)}")
    if args.dump:
        for v, row in enumerate(out.hex_rows()):
            print(f"{v} {row}")
    return 0


def cmd_resynth(args) -> int:
    M = _matrix_arg(args.matrix)
    k = int(np.log2(M.n_rows)) if M.n_rows else 0
    if M.n_rows != 1 << k:
        raise ConfigError([f"truth-table matrix needs 2^k rows, got {M.n_rows}"])
    f = M.n_cols if args.f is None else args.f
    B, C = identity_factorization(M) if f >= M.n_cols else asso_sweep(M, f)
    circuit = optimize(compose(synthesize_compressor(B), synthesize_decompressor(C), name="resynth"))
    _write_text(args.output, write_blif(circuit))
    print(f"error={factorization_error(M, B, C)}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bmfx", description="Approximate logic synthesis by Boolean matrix factorization.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="explore the area/error trade-off and write the approximate circuit")
    r.add_argument("--config", help="key=value configuration file")
    r.add_argument("--input", help="input BLIF ('-' for stdin)")
    r.add_argument("--output", help="approximate BLIF path; CSV, plot script and PNG are written alongside")
    r.add_argument("--threshold", type=float, help="HD error budget in [0, 1] (default 0.05)")
    r.add_argument("--vectors", type=int, help="random test vectors (default 10000)")
    r.add_argument("--seed", type=int, help="vector and partition seed (default: $BMFX_SEED or 1)")
    r.add_argument("--kmax", type=int, help="max boundary inputs per partition (default 16)")
    r.add_argument("--tau-grid", dest="tau_grid", help="comma-separated ASSO thresholds")
    r.add_argument("--lib", help="cell areas, KIND=area list or a file of such lines")
    r.add_argument("--jobs", type=int, help="worker processes for candidate evaluation")
    r.add_argument("--ratio", choices=("absolute", "delta"))
    r.add_argument("--emit-steps", dest="emit_steps", action="store_true", default=None,
                   help="also write the circuit of every trajectory step")

    q = sub.add_parser("partition", help="print gate_id,partition_id")
    q.add_argument("--input", required=True)
    q.add_argument("--output", default="-")
    q.add_argument("--kmax", type=int, default=16)
    q.add_argument("--seed", type=int, default=1)
    q.add_argument("--no-optimize", dest="optimize", action="store_false",
                   help="partition the parsed netlist as is")

    fa = sub.add_parser("factor", help="factor a 0/1 matrix with ASSO")
    fa.add_argument("--matrix", required=True, help="rows of 0/1 characters ('-' for stdin)")
    fa.add_argument("--f", type=int, required=True)
    fa.add_argument("--tau-grid", dest="tau_grid")

    s = sub.add_parser("simulate", help="simulate a BLIF and report output ones counts")
    s.add_argument("--input", required=True)
    s.add_argument("--vectors", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--dump", action="store_true", help="print one hex word of output bits per vector")

    rs = sub.add_parser("resynth", help="synthesize a truth-table matrix through its factorization")
    rs.add_argument("--matrix", required=True)
    rs.add_argument("--f", type=int)
    rs.add_argument("--output", default="-")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "run":
            flags = {k: getattr(args, k) for k in (
                "input", "output", "threshold", "vectors", "seed", "kmax",
                "tau_grid", "lib", "jobs", "ratio", "emit_steps")}
            cfg = load_config(args.config, flags)
            if not cfg.input:
                raise ConfigError(["input path is required"])
            return cmd_run(cfg)
        handler = {
            "partition": cmd_partition,
            "factor": cmd_factor,
            "simulate": cmd_simulate,
            "resynth": cmd_resynth,
        }[args.command]
        return handler(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"bmfx: config error: {problem}", file=sys.stderr)
        return 2
    except (BmfxError, OSError, ValueError) as exc:
        print(f"bmfx: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
