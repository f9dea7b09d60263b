"""Run configuration: defaults < BMFX_SEED (seed only) < config file < flags.

Config files are line-oriented ``key=value`` text; ``#`` starts a comment.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from .bmf import DEFAULT_TAU_GRID
from .errors import ConfigError
from .explore import RATIO_MODES, ExplorationConfig
from .netlist import CellLibrary, GateKind

SEED_ENV = "BMFX_SEED"


@dataclass(frozen=True)
class RunConfig:
    input: str = ""
    output: str = ""
    vectors: int = 10_000
    seed: int = 1
    kmax: int = 16
    threshold: float = 0.05
    tau_grid: tuple[float, ...] = DEFAULT_TAU_GRID
    lib: tuple[tuple[str, float], ...] = ()
    jobs: int = 1
    ratio: str = "absolute"
    emit_steps: bool = False

    def library(self) -> CellLibrary:
        return CellLibrary.default().with_overrides(dict(self.lib))

    def exploration(self) -> ExplorationConfig:
        return ExplorationConfig(
            error_threshold=self.threshold,
            n_vectors=self.vectors,
            seed=self.seed,
            k_max=self.kmax,
            jobs=self.jobs,
            tau_grid=self.tau_grid,
            ratio=self.ratio,
            lib=self.library(),
        )

    def output_path(self) -> Path:
        if self.output:
            return Path(self.output)
        return Path(Path(self.input).stem + ".approx.blif")

    def header_lines(self) -> list[str]:
        """Settings that determine results; jobs and output paths are excluded."""
        return [
            f"input={self.input}",
            f"vectors={self.vectors}",
            f"seed={self.seed}",
            f"kmax={self.kmax}",
            f"threshold={self.threshold!r}",
            "tau_grid=" + ",".join(repr(t) for t in self.tau_grid),
            "lib=" + ",".join(f"{k}={v!r}" for k, v in self.lib),
            f"ratio={self.ratio}",
        ]


KEYS = {f.name for f in fields(RunConfig)}
_ALIASES = {"k_max": "kmax", "tau-grid": "tau_grid", "emit-steps": "emit_steps", "n_vectors": "vectors"}


def parse_config_text(text: str) -> dict[str, str]:
    values, problems = {}, []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {no}: expected key=value, got {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in KEYS:
            problems.append(f"unknown key {key!r}")
            continue
        values[key] = value
    if problems:
        raise ConfigError(problems)
    return values


def _parse_lib(value) -> tuple[tuple[str, float], ...]:
    if isinstance(value, (tuple, list)):
        return tuple((str(k).upper(), float(v)) for k, v in value)
    text = str(value).strip()
    if not text:
        return ()
    if "=" not in text and Path(text).is_file():
        text = ",".join(l.split("#", 1)[0].strip() for l in Path(text).read_text().splitlines())
    out = {}
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        kind, area = item.split("=", 1)
        kind = kind.strip().upper()
        GateKind(kind)
        a = float(area)
        if a < 0:
            raise ValueError(f"negative area for {kind}")
        out[kind] = a
    return tuple(sorted(out.items()))


def _coerce(key: str, value, problems: list[str]):
    try:
        if key in ("input", "output"):
            return str(value)
        if key in ("vectors", "seed", "kmax", "jobs"):
            return int(value)
        if key == "threshold":
            return float(value)
        if key == "tau_grid":
            if isinstance(value, str):
                return tuple(float(t) for t in value.replace(";", ",").split(",") if t.strip())
            return tuple(float(t) for t in value)
        if key == "lib":
            return _parse_lib(value)
        if key == "ratio":
            return str(value).strip().lower()
        if key == "emit_steps":
            if isinstance(value, bool):
                return value
            return str(value).strip().lower() in ("1", "true", "yes", "on")
    except (ValueError, TypeError) as exc:
        problems.append(f"{key}: {exc}")
        return None
    raise KeyError(key)


def _validate(cfg: dict, problems: list[str]) -> None:
    if cfg["vectors"] < 1:
        problems.append("vectors must be >= 1")
    if cfg["kmax"] < 2:
        problems.append("kmax must be >= 2")
    if not 0 <= cfg["threshold"] <= 1:
        problems.append("threshold must lie in [0, 1]")
    if not cfg["tau_grid"]:
        problems.append("tau_grid must not be empty")
    elif any(not 0 < t <= 1 for t in cfg["tau_grid"]):
        problems.append("tau_grid values must lie in (0, 1]")
    if cfg["jobs"] < 1:
        problems.append("jobs must be >= 1")
    if cfg["ratio"] not in RATIO_MODES:
        problems.append(f"ratio must be one of {', '.join(RATIO_MODES)}")


def load_config(
    path: str | os.PathLike | None = None,
    flags: Mapping[str, object] | None = None,
    env: Mapping[str, str] | None = None,
) -> RunConfig:
    """Merge defaults, environment, file and flags; reject unknown keys.

    ``flags`` entries set to None are ignored. Every problem found is
    reported in one ConfigError.
    """
    env = os.environ if env is None else env
    problems: list[str] = []
    raw: dict[str, object] = {}
    if env.get(SEED_ENV):
        raw["seed"] = env[SEED_ENV]
    if path is not None:
        try:
            raw.update(parse_config_text(Path(path).read_text()))
        except ConfigError as exc:
            problems.extend(exc.problems)
        except OSError as exc:
            problems.append(f"cannot read config {path}: {exc}")
    for key, value in (flags or {}).items():
        key = _ALIASES.get(key, key)
        if value is None:
            continue
        if key not in KEYS:
            problems.append(f"unknown key {key!r}")
            continue
        raw[key] = value

    cfg = {f.name: f.default for f in fields(RunConfig)}
    for key, value in raw.items():
        v = _coerce(key, value, problems)
        if v is not None:
            cfg[key] = v
    _validate(cfg, problems)
    if problems:
        raise ConfigError(problems)
    return RunConfig(**cfg)
