"""Swept-spectrum container and its on-disk CSV format.

The format is two comma-separated floating-point columns under a
``# field_gauss,amplitude`` header, preceded by ``# key=value`` metadata
lines. Floats are written with 9 significant digits so repeated runs are
byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

__all__ = ["Spectrum", "write_spectrum", "read_spectrum", "FLOAT_FORMAT"]

FLOAT_FORMAT = ".9g"


@dataclass
class Spectrum:
    """A sampled field sweep: field axis (gauss), detected amplitude (a.u.),
    sweep direction and free-form metadata."""

    field: np.ndarray
    amplitude: np.ndarray
    direction: str = "up"
    metadata: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.field = np.asarray(self.field, dtype=float)
        self.amplitude = np.asarray(self.amplitude, dtype=float)
        if self.field.shape != self.amplitude.shape or self.field.ndim != 1:
            raise ValueError("field and amplitude must be 1-D arrays of equal length")
        if self.direction not in ("up", "down"):
            raise ValueError("direction must be 'up' or 'down'")
        diffs = np.diff(self.field)
        if self.direction == "up" and np.any(diffs <= 0):
            raise ValueError("up-sweep field axis must be strictly increasing")
        if self.direction == "down" and np.any(diffs >= 0):
            raise ValueError("down-sweep field axis must be strictly decreasing")

    def ascending(self) -> "Spectrum":
        """Copy with an ascending field axis regardless of sweep direction."""
        if self.direction == "up":
            return Spectrum(self.field.copy(), self.amplitude.copy(), "up",
                            dict(self.metadata))
        return Spectrum(self.field[::-1].copy(), self.amplitude[::-1].copy(),
                        "up", dict(self.metadata))

    def __len__(self) -> int:
        return int(self.field.size)


def _fmt(x: float) -> str:
    return format(float(x), FLOAT_FORMAT)


def write_spectrum(path: str | Path, spectrum: Spectrum) -> None:
    lines = [f"# {key}={value}" for key, value in spectrum.metadata.items()]
    if "direction" not in spectrum.metadata:
        lines.append(f"# direction={spectrum.direction}")
    lines.append("# field_gauss,amplitude")
    for h, a in zip(spectrum.field, spectrum.amplitude):
        lines.append(f"{_fmt(h)},{_fmt(a)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_spectrum(path: str | Path) -> Spectrum:
    """Parse a spectrum CSV; direction comes from metadata or, failing that,
    from the order of the field column. Malformed rows raise with their
    1-based line number."""
    metadata: dict = {}
    fields: list[float] = []
    amplitudes: list[float] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                metadata[key.strip()] = value.strip()
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"row {lineno}: expected two comma-separated "
                             f"columns, got {len(parts)}")
        try:
            fields.append(float(parts[0]))
            amplitudes.append(float(parts[1]))
        except ValueError:
            raise ValueError(f"row {lineno}: unparseable value in {line!r}") from None
    if not fields:
        raise ValueError("spectrum file contains no data rows")
    axis = np.asarray(fields)
    direction = metadata.get("direction")
    if direction not in ("up", "down"):
        diffs = np.diff(axis)
        if axis.size >= 2 and np.all(diffs < 0):
            direction = "down"
        else:
            direction = "up"
    try:
        return Spectrum(axis, np.asarray(amplitudes), direction, metadata)
    except ValueError as exc:
        raise ValueError(f"invalid spectrum in {path}: {exc}") from exc
