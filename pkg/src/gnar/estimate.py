"""Design-matrix construction and least-squares estimation.

The autoregression is estimated as a linear model: the response stacks the
observation vectors for t = p+1..T and the design stacks, per time step,
each group's lagged values and neighbourhood regressions, groups in
ascending order and lag-major inside a group.  Because community columns
are zero on rows of other communities, the Gram matrix is block-diagonal
across communities and the model can be fitted jointly or one community at
a time (the latter on each community's own, longer usable range).

Solving uses a column-pivoted QR decomposition throughout; the explicit
normal-equations formula appears only in the test suite as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CovarianceError, DesignError, OrderError, RankDeficiencyError
from .model import (GnarCoefficients, GnarOrder, ThetaEntry, stationarity_margin,
                    theta_index, to_var)
from .network import Network, bfs_distances, mask_weights, stage_adjacency
from .panel import TimeSeriesPanel
from .partition import CommunityPartition


@dataclass(frozen=True)
class DesignSystem:
    """Stacked linear system R theta = y plus the column/row bookkeeping.

    ``columns[j]`` says which coefficient column j estimates.  Rows cycle
    over ``node_ids`` (1-based) for each predicted time step; ``lag_offset``
    is the number of leading panel steps consumed by lags.
    """

    R: np.ndarray
    y: np.ndarray
    columns: tuple[ThetaEntry, ...]
    order: GnarOrder
    variant: str
    lag_offset: int
    node_ids: tuple[int, ...]
    node_labels: tuple[str, ...]
    time_labels: tuple[str, ...]
    group: int | None = None

    @property
    def n(self) -> int:
        return self.R.shape[0]

    @property
    def q(self) -> int:
        return self.R.shape[1]

    def column_names(self) -> tuple[str, ...]:
        return tuple(e.name(self.variant) for e in self.columns)


@dataclass(frozen=True)
class FitResult:
    """Estimates, uncertainty and residuals from one least-squares fit."""

    theta: np.ndarray
    columns: tuple[ThetaEntry, ...]
    names: tuple[str, ...]
    sigma2: float
    cov: np.ndarray
    se: np.ndarray
    residuals: TimeSeriesPanel
    df_resid: int
    stationary: bool
    stationarity_sums: np.ndarray
    order: GnarOrder
    variant: str
    group: int | None = None

    def to_coefficients(self) -> GnarCoefficients:
        """Rebuild a coefficient container from the estimates (joint fits only)."""
        if self.group is not None:
            raise DesignError("per-community results cover a single parameter block; "
                              "rebuild coefficients from a joint fit")
        d = len(self.residuals.node_labels)
        return GnarCoefficients.from_theta(self.theta, self.order,
                                           noise_sd=float(np.sqrt(self.sigma2)), d=d)


def _neighbourhood_series(X: np.ndarray, W: np.ndarray,
                          S: list[np.ndarray], stages: int) -> list[np.ndarray]:
    """(W . S_r) X for r = 1..stages; entry r-1 has shape d x T."""
    return [(W * S[r - 1]) @ X for r in range(1, stages + 1)]


def _group_mask_weights(order: GnarOrder, W: np.ndarray,
                        part: CommunityPartition | None, g: int) -> np.ndarray:
    if order.variant == "community":
        return mask_weights(W, part, g)
    return W


def _build_columns(X: np.ndarray, order: GnarOrder, net: Network, W: np.ndarray,
                   part: CommunityPartition | None, entries: list[ThetaEntry],
                   lag_offset: int, row_nodes: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Assemble (R, y) for the given column entries and node rows."""
    d, T = X.shape
    p0 = lag_offset
    if T <= p0:
        raise DesignError(f"panel length {T} cannot support maximum lag {p0}; "
                          f"need at least {p0 + 1} time steps")
    S = stage_adjacency(bfs_distances(net))
    if order.r_star > len(S):
        raise OrderError(f"order uses stage {order.r_star}, but the network's "
                         f"largest stage is {len(S)}")
    rows = [i - 1 for i in row_nodes]
    n_t = T - p0
    groups = sorted({e.group for e in entries})
    z_cache: dict[int, list[np.ndarray]] = {}
    xi_cache: dict[int, np.ndarray] = {}
    for g in groups:
        smax_g = max(order.stages[g - 1]) if order.stages[g - 1] else 0
        Wg = _group_mask_weights(order, W, part, g)
        z_cache[g] = _neighbourhood_series(X, Wg, S, smax_g)
        if order.variant == "community":
            xi_cache[g] = part.indicator(g)
        else:
            xi_cache[g] = np.ones(d)
    cols = np.empty((n_t * len(rows), len(entries)))
    for j, e in enumerate(entries):
        lo, hi = p0 - e.lag, T - e.lag
        if e.stage is None:
            if order.variant == "local":
                M = np.zeros((d, n_t))
                M[e.node - 1] = X[e.node - 1, lo:hi]
            else:
                M = xi_cache[e.group][:, None] * X[:, lo:hi]
        else:
            M = z_cache[e.group][e.stage - 1][:, lo:hi]
        cols[:, j] = M[rows].T.ravel()
    y = X[rows, p0:].T.ravel()
    return cols, y


def build_design(panel: TimeSeriesPanel, order: GnarOrder, net: Network,
                 W: np.ndarray, part: CommunityPartition | None = None) -> DesignSystem:
    """Joint design over all nodes, usable range t = p_max+1 .. T."""
    if panel.d != net.d:
        raise DesignError(f"panel has {panel.d} nodes, network has {net.d}")
    if order.variant == "community":
        if part is None:
            raise DesignError("community orders need a partition")
        if part.n_communities != order.n_groups:
            raise DesignError(f"order has {order.n_groups} communities, "
                              f"partition has {part.n_communities}")
        if part.d != panel.d:
            raise DesignError("partition and panel node counts differ")
    entries = theta_index(order, d=panel.d)
    p0 = order.p_max
    R, y = _build_columns(panel.values, order, net, W, part, entries, p0,
                          list(range(1, panel.d + 1)))
    return DesignSystem(R=R, y=y, columns=tuple(entries), order=order,
                        variant=order.variant, lag_offset=p0,
                        node_ids=tuple(range(1, panel.d + 1)),
                        node_labels=panel.node_labels,
                        time_labels=panel.time_labels[p0:])


def build_community_design(panel: TimeSeriesPanel, order: GnarOrder, net: Network,
                           W: np.ndarray, part: CommunityPartition,
                           c: int) -> DesignSystem:
    """Design block for one community on its own usable range t = p_c+1 .. T."""
    if order.variant != "community":
        raise DesignError("community blocks only exist for community orders")
    part.check_community(c)
    entries = [e for e in theta_index(order) if e.group == c]
    p0 = order.lags[c - 1]
    members = part.members(c)
    R, y = _build_columns(panel.values, order, net, W, part, entries, p0, members)
    return DesignSystem(R=R, y=y, columns=tuple(entries), order=order,
                        variant=order.variant, lag_offset=p0,
                        node_ids=tuple(members),
                        node_labels=tuple(panel.node_labels[i - 1] for i in members),
                        time_labels=panel.time_labels[p0:], group=c)


def solve_least_squares(R: np.ndarray, y: np.ndarray,
                        names: tuple[str, ...] | None = None):
    """Column-pivoted QR solve; returns (theta, unpivoted (R'R)^-1, rank data).

    Rank deficiency raises :class:`RankDeficiencyError` naming the columns
    that the pivoting pushed beyond the numerical rank.
    """
    n, q = R.shape
    if n < q:
        raise DesignError(f"system has {n} rows for {q} parameters")
    Q, Rf, piv = scipy.linalg.qr(R, mode="economic", pivoting=True)
    diag = np.abs(np.diag(Rf))
    tol = diag[0] * max(n, q) * np.finfo(float).eps if diag.size else 0.0
    rank = int(np.sum(diag > tol))
    if rank < q:
        dependent = [names[j] if names else f"column {j}" for j in piv[rank:]]
        raise RankDeficiencyError(
            f"design matrix is rank deficient (rank {rank} of {q}); "
            f"dependent columns: {', '.join(dependent)}", dependent)
    z = scipy.linalg.solve_triangular(Rf, Q.T @ y)
    theta = np.empty(q)
    theta[piv] = z
    r_inv = scipy.linalg.solve_triangular(Rf, np.eye(q))
    gram_inv_piv = r_inv @ r_inv.T
    gram_inv = np.empty((q, q))
    gram_inv[np.ix_(piv, piv)] = gram_inv_piv
    return theta, gram_inv


def _stationarity_for(ds: DesignSystem, theta: np.ndarray) -> tuple[bool, np.ndarray]:
    if ds.group is not None:
        block_sum = float(np.sum(np.abs(theta)))
        return block_sum < 1.0, np.asarray([block_sum])
    d = len(ds.node_labels)
    coeffs = GnarCoefficients.from_theta(theta, ds.order, noise_sd=1.0, d=d)
    report = stationarity_margin(coeffs, ds.order)
    return report.stationary, report.sums


def _finish_fit(ds: DesignSystem, theta: np.ndarray, cov: np.ndarray,
                sigma2: float) -> FitResult:
    resid = ds.y - ds.R @ theta
    m = len(ds.node_ids)
    resid_panel = TimeSeriesPanel(values=resid.reshape(-1, m).T,
                                  node_labels=ds.node_labels,
                                  time_labels=ds.time_labels)
    stationary, sums = _stationarity_for(ds, theta)
    return FitResult(theta=theta, columns=ds.columns, names=ds.column_names(),
                     sigma2=sigma2, cov=cov, se=np.sqrt(np.diag(cov)),
                     residuals=resid_panel, df_resid=ds.n - ds.q,
                     stationary=stationary, stationarity_sums=sums,
                     order=ds.order, variant=ds.variant, group=ds.group)


def fit_ols(ds: DesignSystem) -> FitResult:
    """Ordinary least squares with unbiased residual variance (n - q)."""
    theta, gram_inv = solve_least_squares(ds.R, ds.y, ds.column_names())
    resid = ds.y - ds.R @ theta
    if ds.n <= ds.q:
        raise DesignError(f"no residual degrees of freedom (n={ds.n}, q={ds.q})")
    sigma2 = float(resid @ resid) / (ds.n - ds.q)
    return _finish_fit(ds, theta, sigma2 * gram_inv, sigma2)


@dataclass(frozen=True)
class KroneckerCovariance:
    """Structured error covariance I_(T-p) kron Sigma_u (same block each step)."""

    sigma_u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sigma_u", np.asarray(self.sigma_u, dtype=float))
        s = self.sigma_u
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise CovarianceError("per-step covariance block must be square")


def _cholesky_or_reject(S: np.ndarray, what: str) -> np.ndarray:
    if not np.allclose(S, S.T, rtol=0.0, atol=1e-10 * max(1.0, np.abs(S).max())):
        raise CovarianceError(f"{what} is not symmetric")
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise CovarianceError(f"{what} is not positive definite") from None


def fit_gls(ds: DesignSystem, sigma) -> FitResult:
    """Generalised least squares under a full or Kronecker error covariance.

    The system is whitened with the Cholesky factor of the covariance and
    solved by the same pivoted QR path as OLS.  The reported coefficient
    covariance is (R' Sigma^-1 R)^-1; residuals stay on the raw scale.
    """
    if isinstance(sigma, KroneckerCovariance):
        m = len(ds.node_ids)
        if sigma.sigma_u.shape[0] != m:
            raise CovarianceError(f"per-step block is {sigma.sigma_u.shape[0]} x "
                                  f"{sigma.sigma_u.shape[0]}, rows cycle over {m} nodes")
        L = _cholesky_or_reject(sigma.sigma_u, "per-step covariance block")
        blocks_R = ds.R.reshape(-1, m, ds.q)
        blocks_y = ds.y.reshape(-1, m)
        Rw = np.empty_like(blocks_R)
        yw = np.empty_like(blocks_y)
        for b in range(blocks_R.shape[0]):
            Rw[b] = scipy.linalg.solve_triangular(L, blocks_R[b], lower=True)
            yw[b] = scipy.linalg.solve_triangular(L, blocks_y[b], lower=True)
        Rw = Rw.reshape(ds.n, ds.q)
        yw = yw.ravel()
    else:
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != (ds.n, ds.n):
            raise CovarianceError(f"covariance must be {ds.n} x {ds.n}, "
                                  f"got {sigma.shape}")
        L = _cholesky_or_reject(sigma, "error covariance")
        Rw = scipy.linalg.solve_triangular(L, ds.R, lower=True)
        yw = scipy.linalg.solve_triangular(L, ds.y, lower=True)
    theta, gram_inv = solve_least_squares(Rw, yw, ds.column_names())
    resid_w = yw - Rw @ theta
    sigma2 = float(resid_w @ resid_w) / (ds.n - ds.q) if ds.n > ds.q else float("nan")
    return _finish_fit(ds, theta, gram_inv, sigma2)


def fit_per_community(panel: TimeSeriesPanel, order: GnarOrder, net: Network,
                      W: np.ndarray, part: CommunityPartition) -> list[FitResult]:
    """Independent block fits, one per community, each on its own usable range.

    With equal maximum lags across communities these coincide with the
    joint fit sliced by block; smaller-lag communities gain the extra
    leading observations the joint range discards.
    """
    fits = []
    for c in range(1, part.n_communities + 1):
        ds = build_community_design(panel, order, net, W, part, c)
        fits.append(fit_ols(ds))
    return fits


def coefficient_table(fit: FitResult) -> str:
    """Delimited name/estimate/standard-error table for a fit."""
    lines = ["name,estimate,std_error"]
    for name, est, se in zip(fit.names, fit.theta, fit.se):
        lines.append(f"{name},{float(est)!r},{float(se)!r}")
    return "\n".join(lines) + "\n"
