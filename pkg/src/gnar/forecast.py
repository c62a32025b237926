"""Iterated forecasts, prediction scoring and the model-comparison harness.

Forecasts iterate the fitted VAR form one step at a time, feeding
predictions back for longer horizons.  Accuracy is scored with the root
mean squared prediction error across nodes, both on the raw scale and on
per-node mean-centred data, where the centring means come from the
training range only.  Baselines fitted by external tools join the
comparison through forecast files in the shared panel format.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, GnarError
from .estimate import build_design, fit_ols
from .model import GnarCoefficients, GnarOrder, to_var
from .network import Network
from .panel import TimeSeriesPanel, read_panel
from .partition import CommunityPartition


def forecast(coeffs: GnarCoefficients, order: GnarOrder, net: Network,
             W: np.ndarray, panel: TimeSeriesPanel, horizon: int,
             part: CommunityPartition | None = None) -> np.ndarray:
    """Iterated one-step predictions; returns an array of shape (horizon, d)."""
    if horizon < 1:
        raise GnarError(f"horizon must be >= 1, got {horizon}")
    phi = to_var(coeffs, order, net, W, part)
    p = phi.shape[0]
    if panel.T < p:
        raise GnarError(f"panel has {panel.T} steps; forecasting needs at "
                        f"least the maximum lag {p}")
    history = panel.values.copy()
    out = np.zeros((horizon, panel.d))
    for step in range(horizon):
        pred = np.zeros(panel.d)
        for k in range(1, p + 1):
            pred += phi[k - 1] @ history[:, -k]
        out[step] = pred
        history = np.column_stack([history, pred])
    return out


def naive_forecast(panel: TimeSeriesPanel, horizon: int = 1) -> np.ndarray:
    """Previous-observation baseline: every step repeats the last value."""
    if horizon < 1:
        raise GnarError(f"horizon must be >= 1, got {horizon}")
    return np.tile(panel.values[:, -1], (horizon, 1))


def rmspe(actual: np.ndarray, predicted: np.ndarray) -> float:
    """Root mean squared prediction error across nodes."""
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.shape != predicted.shape:
        raise GnarError(f"dimension mismatch: actual {actual.shape}, "
                        f"predicted {predicted.shape}")
    return float(np.sqrt(np.mean((actual - predicted) ** 2)))


@dataclass(frozen=True)
class ModelSpec:
    """A named in-scope model to fit inside a comparison."""

    name: str
    order: GnarOrder


@dataclass(frozen=True)
class ExternalForecast:
    """Held-out predictions imported from an external tool.

    ``raw`` scores against the raw panel; ``centred`` (optional) against
    the mean-centred panel.  Parameter counts are unknown here.
    """

    name: str
    raw: np.ndarray
    centred: np.ndarray | None = None


def load_external_forecast(name: str, path: str | Path, d: int) -> ExternalForecast:
    """Read an external forecast file (panel format, rows 'raw'/'centred')."""
    panel = read_panel(path)
    if panel.d != d:
        raise DataError(f"{path}: forecast has {panel.d} nodes, panel has {d}")
    rows = {label: panel.values[:, t] for t, label in enumerate(panel.time_labels)}
    if "raw" not in rows:
        raise DataError(f"{path}: no row labelled 'raw'")
    return ExternalForecast(name=name, raw=rows["raw"], centred=rows.get("centred"))


@dataclass(frozen=True)
class ComparisonEntry:
    name: str
    prediction: np.ndarray
    rmspe: float
    rmspe_centred: float | None
    n_params: int | None


@dataclass(frozen=True)
class ForecastReport:
    """Per-model hold-out scores; the text export puts models in columns."""

    holdout_label: str
    entries: tuple[ComparisonEntry, ...]

    def entry(self, name: str) -> ComparisonEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_csv_text(self) -> str:
        names = [e.name for e in self.entries]
        lines = ["metric," + ",".join(names)]
        lines.append("rmspe," + ",".join(f"{e.rmspe:.6f}" for e in self.entries))
        lines.append("rmspe_centred," + ",".join(
            "NA" if e.rmspe_centred is None else f"{e.rmspe_centred:.6f}"
            for e in self.entries))
        lines.append("n_params," + ",".join(
            "NA" if e.n_params is None else str(e.n_params) for e in self.entries))
        return "\n".join(lines) + "\n"


def _fit_and_predict(panel: TimeSeriesPanel, order: GnarOrder, net: Network,
                     W: np.ndarray, part: CommunityPartition | None) -> np.ndarray:
    ds = build_design(panel, order, net, W,
                      part if order.variant == "community" else None)
    fit = fit_ols(ds)
    coeffs = fit.to_coefficients()
    return forecast(coeffs, order, net, W, panel, 1,
                    part if order.variant == "community" else None)[0]


def compare(panel: TimeSeriesPanel, net: Network, W: np.ndarray,
            specs: list[ModelSpec], part: CommunityPartition | None = None,
            holdout: int = -1,
            external: list[ExternalForecast] | None = None) -> ForecastReport:
    """Fit each spec before the hold-out step and score its one-step forecast.

    Every report includes the previous-observation baseline.  Raw-scale
    fits give the rmspe column; refits on per-node mean-centred training
    data give the centred column (training means only, so the held-out
    value leaks into neither).
    """
    idx = holdout if holdout >= 0 else panel.T + holdout
    if not (0 < idx < panel.T):
        raise GnarError(f"hold-out index {holdout} outside the panel")
    train = TimeSeriesPanel(values=panel.values[:, :idx],
                            node_labels=panel.node_labels,
                            time_labels=panel.time_labels[:idx])
    means = train.values.mean(axis=1)
    train_c = train.with_values(train.values - means[:, None])
    actual = panel.values[:, idx]
    actual_c = actual - means
    entries: list[ComparisonEntry] = []
    for spec in specs:
        pred = _fit_and_predict(train, spec.order, net, W, part)
        pred_c = _fit_and_predict(train_c, spec.order, net, W, part)
        entries.append(ComparisonEntry(
            name=spec.name, prediction=pred,
            rmspe=rmspe(actual, pred),
            rmspe_centred=rmspe(actual_c, pred_c),
            n_params=spec.order.param_count(panel.d)))
    naive = naive_forecast(train, 1)[0]
    entries.append(ComparisonEntry(
        name="naive", prediction=naive,
        rmspe=rmspe(actual, naive),
        rmspe_centred=rmspe(actual_c, naive - means),
        n_params=None))
    for ext in external or []:
        if ext.raw.shape != actual.shape:
            raise DataError(f"external forecast {ext.name!r} has shape "
                            f"{ext.raw.shape}, panel step has {actual.shape}")
        entries.append(ComparisonEntry(
            name=ext.name, prediction=ext.raw,
            rmspe=rmspe(actual, ext.raw),
            rmspe_centred=None if ext.centred is None else rmspe(actual_c, ext.centred),
            n_params=None))
    return ForecastReport(holdout_label=panel.time_labels[idx],
                          entries=tuple(entries))
