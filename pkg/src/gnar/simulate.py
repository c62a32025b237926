"""Seeded simulation of network autoregressive processes.

The process iterates the VAR form X_t = sum_k Phi_k X_{t-k} + u_t from zero
initial conditions, discards a burn-in prefix and returns the last T steps.
Innovations are i.i.d. Gaussian with covariance sigma^2 I.  All randomness
flows through numpy's default PCG64 generator; its identity, the seed and
the burn-in are recorded in the returned panel's metadata so a run can be
reproduced exactly from the panel file alone.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import GnarError
from .model import GnarCoefficients, GnarOrder, stationarity_margin, to_var
from .network import Network
from .panel import TimeSeriesPanel, default_node_labels
from .partition import CommunityPartition

RNG_NAME = "numpy-pcg64"


def simulate(coeffs: GnarCoefficients, order: GnarOrder, net: Network,
             W: np.ndarray, T: int, *, part: CommunityPartition | None = None,
             burn_in: int = 200, seed: int = 0, noise_sd: float | None = None,
             allow_nonstationary: bool = False) -> TimeSeriesPanel:
    """Generate one realisation of length T.

    Non-stationary coefficient sets are rejected unless
    ``allow_nonstationary`` is set, in which case a warning is issued and
    the run proceeds (trajectories may diverge).
    """
    if T < 1:
        raise GnarError(f"simulation length must be >= 1, got {T}")
    if burn_in < 0:
        raise GnarError(f"burn-in must be >= 0, got {burn_in}")
    sd = coeffs.noise_sd if noise_sd is None else noise_sd
    if sd <= 0:
        raise GnarError(f"noise sd must be positive, got {sd}")
    report = stationarity_margin(coeffs, order)
    if not report.stationary:
        if not allow_nonstationary:
            raise GnarError("coefficients violate the stationarity condition "
                            f"(largest group sum {np.max(report.sums):.4f} >= 1); "
                            "pass allow_nonstationary=True to simulate anyway")
        warnings.warn("simulating a model whose coefficients violate the "
                      "stationarity condition", stacklevel=2)
    phi = to_var(coeffs, order, net, W, part)
    p, d = phi.shape[0], net.d
    rng = np.random.default_rng(seed)
    steps = burn_in + T
    noise = rng.normal(0.0, sd, size=(steps, d))
    X = np.zeros((d, p + steps))
    for t in range(p, p + steps):
        acc = noise[t - p]
        for k in range(1, p + 1):
            acc = acc + phi[k - 1] @ X[:, t - k]
        X[:, t] = acc
    values = X[:, p + burn_in:]
    meta = {
        "rng": RNG_NAME,
        "seed": str(seed),
        "burn_in": str(burn_in),
        "noise_sd": repr(float(sd)),
    }
    return TimeSeriesPanel(values=values,
                           node_labels=default_node_labels(d),
                           time_labels=tuple(str(t) for t in range(1, T + 1)),
                           meta=meta)
