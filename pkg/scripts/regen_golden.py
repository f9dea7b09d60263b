"""Rewrite the golden trajectory used by the explorer tests.

Run after any change that is expected to alter exploration results.
"""
from pathlib import Path

from bmfx import benchmarks
from bmfx.explore import ExplorationConfig, explore, trajectory_csv

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "rca8_t0.05_s1.csv"


def main():
    res = explore(benchmarks.load("rca8"), ExplorationConfig(error_threshold=0.05, seed=1))
    OUT.write_text(trajectory_csv(res.records))
    print(OUT.read_text(), end="")


if __name__ == "__main__":
    main()
