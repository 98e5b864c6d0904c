"""Deterministic CSV output and run records."""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__


def fmt(value: float | None) -> str:
    """Six significant digits, trailing zeros kept, '.' decimal point."""
    if value is None:
        return "unbounded"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = f"{value:#.6g}"
    if text.endswith("."):
        text = text[:-1]
    if text.startswith("-0") and float(text) == 0:
        text = text[1:]
    return text


def csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO(newline="")
    buf.write(f"# tool-version: {__version__}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = []
        for cell in row:
            text = fmt(cell) if not isinstance(cell, str) else cell
            if any(ch in text for ch in ',"\n'):
                text = '"' + text.replace('"', '""') + '"'
            cells.append(text)
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class RunRecord:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)  # path -> sha256
    version: str = __version__
    rows: tuple[tuple[str, ...], ...] = ()

    @classmethod
    def build(cls, command: str, paths: Iterable[str | Path], csv: str) -> "RunRecord":
        inputs = {str(p): file_digest(p) for p in paths}
        rows = tuple(tuple(line.split(",")) for line in csv.splitlines()
                     if line and not line.startswith("#"))
        return cls(command, inputs, __version__, rows)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"
