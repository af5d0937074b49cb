"""Delimited output and run manifests.

Every emitted file is bit-reproducible: floats are rendered with 17
significant digits, line endings are LF regardless of platform, and
manifests carry content hashes instead of timestamps, so identical
(command, config, seed) runs hash identically.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


def format_value(v: object) -> str:
    """Render one CSV cell; floats at full double precision."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, complex):
        raise TypeError("split complex values into re/im columns")
    return str(v)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Write a CSV with header and LF endings; returns the sha256 hex digest."""
    parts = [",".join(header)]
    ncols = len(header)
    for row in rows:
        if len(row) != ncols:
            raise ValueError(f"row width {len(row)} does not match header width {ncols}")
        parts.append(",".join(format_value(v) for v in row))
    blob = ("\n".join(parts) + "\n").encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(blob)
    return hashlib.sha256(blob).hexdigest()


def file_sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


@dataclass
class RunManifest:
    """Provenance record written next to each run's outputs."""

    command: str
    config_sha256: str
    seed: int | None
    version: str
    outputs: list[tuple[str, str]] = field(default_factory=list)

    def add(self, path: str, digest: str | None = None) -> None:
        self.outputs.append((os.path.basename(path), digest or file_sha256(path)))

    def text(self) -> str:
        lines = [
            f"command = {self.command}",
            f"config_sha256 = {self.config_sha256}",
            f"seed = {self.seed if self.seed is not None else 'none'}",
            f"version = {self.version}",
        ]
        for name, digest in self.outputs:
            lines.append(f"output = {name} sha256 {digest}")
        return "\n".join(lines) + "\n"

    def write(self, path: str) -> None:
        with open(path, "wb") as fh:
            fh.write(self.text().encode("utf-8"))
