"""Deterministic JSON/CSV/text emission and run manifests.

Byte-identical outputs for identical config + seed are part of the contract,
so serialization avoids anything environment-dependent: keys are sorted,
floats are printed at 17 significant digits (round-trip exact for doubles),
CSV rows end with CRLF per RFC 4180.  The manifest is the one exception: it
carries wall-clock timestamps and content digests of the other files.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import IoFailure

TOOL_VERSION = "0.1.0"


def _format_float(x: float) -> str:
    if x != x:
        return '"nan"'
    if x == float("inf"):
        return '"inf"'
    if x == float("-inf"):
        return '"-inf"'
    s = format(float(x), ".17g")
    # keep a decimal marker so the value reads back as float
    if "." not in s and "e" not in s and "E" not in s:
        s += ".0"
    return s


def render_json(obj, indent: int = 0) -> str:
    """Canonical JSON: sorted keys, .17g floats, Fractions as "p/q" strings."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [inner + render_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for k in sorted(obj, key=str):
            items.append(f"{inner}{json.dumps(str(k))}: {render_json(obj[k], indent + 1)}")
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_field(value) -> str:
    if isinstance(value, (float, np.floating)):
        text = format(float(value), ".17g")
    elif isinstance(value, Fraction):
        text = str(value)
    else:
        text = str(value)
    if any(ch in text for ch in ',"\r\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def render_csv(header: list[str], rows) -> str:
    lines = [",".join(_csv_field(h) for h in header)]
    for row in rows:
        lines.append(",".join(_csv_field(v) for v in row))
    return "\r\n".join(lines) + "\r\n"


def _write(path: Path, data: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(data, encoding="utf-8", newline="")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_json(path, obj) -> None:
    _write(Path(path), render_json(obj) + "\n")


def write_csv(path, header, rows) -> None:
    _write(Path(path), render_csv(header, rows))


def write_text(path, text: str) -> None:
    _write(Path(path), text)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Inventory of one run: config echo, produced files with digests."""

    subcommand: str
    config: dict
    passed: bool
    error: str | None = None
    tool_version: str = TOOL_VERSION
    created_unix: float = field(default_factory=time.time)
    files: dict = field(default_factory=dict)

    def add_file(self, path) -> None:
        p = Path(path)
        self.files[p.name] = {"sha256": sha256_file(p), "bytes": p.stat().st_size}

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "config": self.config,
            "pass": self.passed,
            "error": self.error,
            "tool_version": self.tool_version,
            "created_unix": self.created_unix,
            "files": self.files,
        }

    def write(self, out_dir) -> Path:
        path = Path(out_dir) / "manifest.json"
        write_json(path, self.to_dict())
        return path
