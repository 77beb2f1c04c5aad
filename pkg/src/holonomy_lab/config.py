"""Experiment configuration: defaults, key=value files, CLI overrides.

Precedence is CLI flag > config-file line > built-in default.  The file
format is deliberately dumb: one `key=value` per line, `#` comments, no
sections.  `build_structure` is where cross-field constraints live, because
the expanding factor needed for the (1+eps)/lambda < 1 check only exists
once the system itself is built.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from .conformal import ConformalStructure
from .errors import ConfigInvalid
from .shift import ShiftSpace
from .torus import validate_real_anosov

_SHIFT_BUILDERS = {
    "full2": lambda lam: ShiftSpace.full(2, lam),
    "full3": lambda lam: ShiftSpace.full(3, lam),
    "golden": lambda lam: ShiftSpace.golden_mean(lam),
}


@dataclass(frozen=True)
class ExperimentConfig:
    matrix: tuple[tuple[int, ...], ...] | None = None
    shift: str | None = None
    lam: str = "2"                      # shift expanding factor, exact rational
    xi: float | None = None             # None: 0.1 (torus) or 1/lambda (shift)
    delta0: float = 0.05
    eps: float = 0.1
    delta: float | None = None
    grid: tuple[int, int] = (16, 16)
    horizon: int = 64
    samples: int = 1000
    seed: int = 0
    out: str = "runs"
    stable_size: float = 0.35           # holonomy runs: total d^s-size of gamma_s
    unstable_length: float | None = None  # holonomy runs: l^u(gamma_u); None: delta
    witness_x: tuple[float, ...] = (0.0, 0.0)
    witness_y: tuple[float, ...] = (0.5, 0.5)
    n_max: int = 30

    def validated(self) -> "ExperimentConfig":
        if (self.matrix is None) == (self.shift is None):
            raise ConfigInvalid("exactly one of matrix= or shift= is required")
        for name in ("delta0", "eps", "stable_size"):
            if getattr(self, name) <= 0:
                raise ConfigInvalid(f"{name} must be positive")
        for name in ("xi", "delta", "unstable_length"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigInvalid(f"{name} must be positive")
        if self.grid[0] < 1 or self.grid[1] < 1:
            raise ConfigInvalid("grid sides must be at least 1")
        if self.horizon < 1 or self.samples < 0 or self.n_max < 0:
            raise ConfigInvalid("horizon/samples/n_max out of range")
        if self.shift is not None and self.shift not in _SHIFT_BUILDERS:
            raise ConfigInvalid(
                f"unknown shift {self.shift!r}; pick one of {sorted(_SHIFT_BUILDERS)}")
        return self

    def build_structure(self) -> ConformalStructure:
        """Build the system and enforce (1+eps)/lambda < 1 at load time."""
        self.validated()
        if self.matrix is not None:
            splitting = validate_real_anosov([list(row) for row in self.matrix])
            try:
                cs = ConformalStructure.for_torus(splitting,
                                                  0.1 if self.xi is None else self.xi)
            except ValueError as exc:
                raise ConfigInvalid(str(exc)) from exc
        else:
            try:
                lam = Fraction(self.lam)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigInvalid(f"bad lambda {self.lam!r}") from exc
            try:
                space = _SHIFT_BUILDERS[self.shift](lam)
                cs = ConformalStructure.for_shift(
                    space, None if self.xi is None else Fraction(str(self.xi)))
            except ValueError as exc:
                raise ConfigInvalid(str(exc)) from exc
        if (1 + self.eps) / float(cs.lam) >= 1:
            raise ConfigInvalid(
                f"(1+eps)/lambda = {(1 + self.eps) / float(cs.lam):.6g} must be < 1")
        return cs


def parse_matrix(text: str) -> tuple[tuple[int, ...], ...]:
    try:
        rows = tuple(tuple(int(v) for v in row.split(",")) for row in text.split(";"))
    except ValueError as exc:
        raise ConfigInvalid(f"bad matrix {text!r}: integer entries required") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ConfigInvalid(f"bad matrix {text!r}: need n rows of n entries")
    return rows


def parse_grid(text: str) -> tuple[int, int]:
    sep = "x" if "x" in text else ","
    parts = text.split(sep)
    if len(parts) != 2:
        raise ConfigInvalid(f"bad grid {text!r}: use PxQ or P,Q")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ConfigInvalid(f"bad grid {text!r}") from exc


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigInvalid(f"bad point {text!r}") from exc


_PARSERS = {
    "matrix": parse_matrix,
    "shift": str,
    "lam": str,
    "xi": float,
    "delta0": float,
    "eps": float,
    "delta": float,
    "grid": parse_grid,
    "horizon": int,
    "samples": int,
    "seed": int,
    "out": str,
    "stable_size": float,
    "unstable_length": float,
    "witness_x": _parse_floats,
    "witness_y": _parse_floats,
    "n_max": int,
}


def read_config_file(path) -> dict:
    """key=value lines; unknown keys are an error (typos fail loud)."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigInvalid(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key == "lambda":
            key = "lam"
        if key not in _PARSERS:
            raise ConfigInvalid(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](value.strip())
        except ConfigInvalid:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"{path}:{lineno}: {exc}") from exc
    return values


def merge_config(file_values: dict, cli_values: dict) -> ExperimentConfig:
    """defaults < file < CLI, then validate."""
    merged = {}
    valid = {f.name for f in fields(ExperimentConfig)}
    for source in (file_values, cli_values):
        for k, v in source.items():
            if k not in valid:
                raise ConfigInvalid(f"unknown config key {k!r}")
            if v is not None:
                merged[k] = v
    return ExperimentConfig(**merged).validated()
