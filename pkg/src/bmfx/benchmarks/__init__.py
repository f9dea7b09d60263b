"""Small combinational BLIF benchmarks shipped with the package.

The EPFL combinational suite (adder, arbiter, bar, cavlc, i2c, int2float,
max, ...) can be fetched separately and passed to ``bmfx run --input``.
"""
from importlib import resources

from ..blif import parse_blif

NAMES = ("rca4", "rca8", "rca16", "rca32", "mul2", "mux16", "parity24")


def text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.blif").read_text()


def path(name: str):
    return resources.files(__name__).joinpath(f"{name}.blif")


def load(name: str):
    return parse_blif(text(name))
