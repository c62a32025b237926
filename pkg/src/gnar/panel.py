"""Multivariate time-series panels and the shared panel file format.

A panel holds a d x T matrix of observations, one row per node.  On disk a
panel is a plain comma-separated table with one row per time step: first
column the time label, remaining columns the node values, preceded by
optional ``# key: value`` metadata comments (simulation provenance such as
the RNG identity and seed lives there).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, GnarError


@dataclass(frozen=True)
class TimeSeriesPanel:
    """d x T observation matrix with node and time labels."""

    values: np.ndarray
    node_labels: tuple[str, ...]
    time_labels: tuple[str, ...]
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise GnarError(f"panel values must be 2-d, got shape {values.shape}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "node_labels", tuple(str(x) for x in self.node_labels))
        object.__setattr__(self, "time_labels", tuple(str(x) for x in self.time_labels))
        d, T = values.shape
        if T < 1:
            raise GnarError("panel must contain at least one time step")
        if len(self.node_labels) != d:
            raise GnarError(f"{len(self.node_labels)} node labels for {d} rows")
        if len(self.time_labels) != T:
            raise GnarError(f"{len(self.time_labels)} time labels for {T} columns")
        if not np.all(np.isfinite(values)):
            raise GnarError("panel contains non-finite values")

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]

    def with_values(self, values: np.ndarray, time_labels=None) -> "TimeSeriesPanel":
        """Same labels/metadata, new observation matrix."""
        return TimeSeriesPanel(
            values=values,
            node_labels=self.node_labels,
            time_labels=self.time_labels if time_labels is None else time_labels,
            meta=dict(self.meta),
        )


def default_node_labels(d: int) -> tuple[str, ...]:
    return tuple(f"n{i}" for i in range(1, d + 1))


def format_panel(panel: TimeSeriesPanel) -> str:
    """The shared panel format; floats use repr for exact round-trips."""
    lines = [f"# {k}: {v}" for k, v in panel.meta.items()]
    lines.append(",".join(("time",) + panel.node_labels))
    for t in range(panel.T):
        row = [panel.time_labels[t]] + [repr(float(v)) for v in panel.values[:, t]]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_panel(panel: TimeSeriesPanel, path: str | Path) -> None:
    Path(path).write_text(format_panel(panel))


def read_panel(path: str | Path) -> TimeSeriesPanel:
    lines = Path(path).read_text().splitlines()
    meta: dict[str, str] = {}
    header: list[str] | None = None
    times: list[str] = []
    rows: list[list[float]] = []
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                k, v = body.split(":", 1)
                meta[k.strip()] = v.strip()
            continue
        cells = line.split(",")
        if header is None:
            if cells[0].strip().lower() != "time":
                raise DataError(f"{path}:{ln}: first header column must be 'time'")
            header = [c.strip() for c in cells[1:]]
            if not header:
                raise DataError(f"{path}:{ln}: no node columns")
            continue
        if len(cells) != len(header) + 1:
            raise DataError(f"{path}:{ln}: expected {len(header) + 1} cells, got {len(cells)}")
        times.append(cells[0].strip())
        try:
            rows.append([float(c) for c in cells[1:]])
        except ValueError as exc:
            raise DataError(f"{path}:{ln}: non-numeric cell ({exc})") from None
    if header is None or not rows:
        raise DataError(f"{path}: no panel data found")
    values = np.asarray(rows, dtype=float).T
    return TimeSeriesPanel(values=values, node_labels=tuple(header),
                           time_labels=tuple(times), meta=meta)
