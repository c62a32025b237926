"""Network autocorrelation (NACF) and partial NACF over lag/stage grids.

Values are computed on the per-node mean-centred panel.  With B_r the
stage-r masked weight matrix, A_r = B_r + I and lambda_r = 1 + sigma_max(B_r),

    nacf(h, r)  = sum_t e_{t+h}' A_r e_t  /  (lambda_r sum_t |e_t|^2),

which reduces to the pooled cross-sectional ACF at stage 0 (B_0 = 0) and is
bounded by 1 through the operator-norm bound and Cauchy-Schwarz.  The
partial version removes lags 1..h-1 first: the panel is regressed on its
lagged values and neighbourhood regressions up to stage r, forwards and
backwards in time, and the residual series take the place of e in the
numerator with the geometric mean of their energies in the denominator.

Community versions restrict everything to the community's nodes with the
community-masked weights; a stage with no within-subset pairs is flagged
degenerate (value zero) rather than silently reinterpreted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GnarError
from .network import Network, bfs_distances, max_stage, stage_adjacency
from .panel import TimeSeriesPanel
from .partition import CommunityPartition

KINDS = ("nacf", "pnacf")


@dataclass(frozen=True)
class AcfCell:
    """One autocorrelation value; degenerate cells carry value 0 and a note."""

    value: float
    degenerate: bool = False
    note: str = ""


def _centred(values: np.ndarray) -> np.ndarray:
    return values - values.mean(axis=1, keepdims=True)


def _stage_weight(net: Network, W: np.ndarray, r: int) -> np.ndarray | None:
    """W . S_r, or None for the stage-0 (pooled) convention."""
    if r == 0:
        return None
    dist = bfs_distances(net)
    rmax = max_stage(dist)
    if r > rmax:
        raise GnarError(f"stage {r} exceeds the network's largest stage {rmax}")
    S = stage_adjacency(dist)
    return W * S[r - 1]


def _subset_indices(d: int, nodes) -> list[int]:
    idx = [int(i) - 1 for i in nodes]
    if not idx:
        raise GnarError("node subset is empty")
    if len(set(idx)) != len(idx):
        raise GnarError("node subset contains duplicates")
    for i in idx:
        if not (0 <= i < d):
            raise GnarError(f"node {i + 1} outside 1..{d}")
    return idx


def _lambda(B: np.ndarray | None) -> float:
    if B is None or not np.any(B):
        return 1.0
    return 1.0 + float(np.linalg.norm(B, 2))


def _apply_A(B: np.ndarray | None, E: np.ndarray) -> np.ndarray:
    """(I + B) E, with B possibly absent (stage 0)."""
    return E if B is None else E + B @ E


def _nacf_cell(E: np.ndarray, B: np.ndarray | None, h: int,
               subset: bool) -> AcfCell:
    if subset and B is not None and not np.any(B):
        return AcfCell(0.0, True, "no within-subset stage pairs")
    den = _lambda(B) * float(np.sum(E * E))
    if den == 0.0:
        return AcfCell(0.0, True, "zero variance")
    AE = _apply_A(B, E)
    num = float(np.sum(E[:, h:] * AE[:, :-h]))
    return AcfCell(num / den)


def nacf(panel: TimeSeriesPanel, net: Network, W: np.ndarray, h: int, r: int,
         nodes=None) -> AcfCell:
    """Network autocorrelation at lag h and stage r (r = 0: pooled ACF).

    ``nodes`` restricts the computation to a node subset with the weight
    matrix masked to within-subset pairs.
    """
    if h < 1:
        raise GnarError(f"lag must be >= 1, got {h}")
    if h >= panel.T:
        raise GnarError(f"lag {h} needs more than {panel.T} time steps")
    if r < 0:
        raise GnarError(f"stage must be >= 0, got {r}")
    E = _centred(panel.values)
    B = _stage_weight(net, W, r)
    if nodes is not None:
        idx = _subset_indices(panel.d, nodes)
        E = E[idx]
        if B is not None:
            B = B[np.ix_(idx, idx)]
    return _nacf_cell(E, B, h, subset=nodes is not None)


def _aux_residuals(E: np.ndarray, Bs: list[np.ndarray], n_lags: int):
    """Residuals of the pooled regression on lags 1..n_lags with the given
    neighbourhood matrices; returns (residual matrix, rank flag note)."""
    m, T = E.shape
    n_t = T - n_lags
    q = n_lags * (1 + len(Bs))
    cols = np.empty((n_t * m, q))
    j = 0
    ZB = [B @ E for B in Bs]
    for k in range(1, n_lags + 1):
        lo, hi = n_lags - k, T - k
        cols[:, j] = E[:, lo:hi].T.ravel()
        j += 1
        for Z in ZB:
            cols[:, j] = Z[:, lo:hi].T.ravel()
            j += 1
    y = E[:, n_lags:].T.ravel()
    theta, _, rank, _ = np.linalg.lstsq(cols, y, rcond=None)
    if rank < q:
        return None, f"auxiliary fit rank deficient (rank {rank} of {q})"
    resid = y - cols @ theta
    return resid.reshape(n_t, m).T, ""


def pnacf(panel: TimeSeriesPanel, net: Network, W: np.ndarray, h: int, r: int,
          nodes=None) -> AcfCell:
    """Partial network autocorrelation at lag h and stage r.

    Equals ``nacf`` at h = 1.  For larger lags the order-(h-1) auxiliary
    regressions must be estimable; failures surface as degenerate cells.
    """
    if h < 1:
        raise GnarError(f"lag must be >= 1, got {h}")
    if h >= panel.T:
        raise GnarError(f"lag {h} needs more than {panel.T} time steps")
    if r < 0:
        raise GnarError(f"stage must be >= 0, got {r}")
    if h == 1:
        return nacf(panel, net, W, h, r, nodes=nodes)
    E = _centred(panel.values)
    dist = bfs_distances(net)
    rmax = max_stage(dist)
    if r > rmax:
        raise GnarError(f"stage {r} exceeds the network's largest stage {rmax}")
    S = stage_adjacency(dist)
    Bs = [W * S[j - 1] for j in range(1, r + 1)]
    if nodes is not None:
        idx = _subset_indices(panel.d, nodes)
        E = E[idx]
        Bs = [B[np.ix_(idx, idx)] for B in Bs]
    B_target = Bs[r - 1] if r >= 1 else None
    if nodes is not None and B_target is not None and not np.any(B_target):
        return AcfCell(0.0, True, "no within-subset stage pairs")
    F, note = _aux_residuals(E, Bs, h - 1)
    if F is None:
        return AcfCell(0.0, True, note)
    G_rev, note = _aux_residuals(E[:, ::-1], Bs, h - 1)
    if G_rev is None:
        return AcfCell(0.0, True, note + " (reversed)")
    G = G_rev[:, ::-1]
    den = _lambda(B_target) * float(np.sqrt(np.sum(F * F) * np.sum(G * G)))
    if den == 0.0:
        return AcfCell(0.0, True, "zero residual variance")
    AG = _apply_A(B_target, G)
    num = float(np.sum(F[:, 1:] * AG[:, :-1]))
    return AcfCell(num / den)


@dataclass(frozen=True)
class CorbitGrid:
    """(P)NACF values over lags 1..H and stages 1..R, optionally per community.

    Without communities ``values`` has shape (H, R); with communities it has
    shape (C, H, R) and ``mean_values`` carries the across-community mean at
    each cell (degenerate only when every community cell is).
    """

    kind: str
    max_lag: int
    max_stage: int
    values: np.ndarray
    degenerate: np.ndarray
    communities: tuple[str, ...] | None = None
    mean_values: np.ndarray | None = None
    mean_degenerate: np.ndarray | None = None

    @property
    def has_communities(self) -> bool:
        return self.communities is not None

    def to_csv_text(self) -> str:
        lines = ["kind,community,lag,stage,value,degenerate"]

        def emit(layer: str, vals: np.ndarray, degs: np.ndarray) -> None:
            for h in range(1, self.max_lag + 1):
                for r in range(1, self.max_stage + 1):
                    v, g = vals[h - 1, r - 1], degs[h - 1, r - 1]
                    lines.append(f"{self.kind},{layer},{h},{r},{float(v)!r},{int(g)}")

        if not self.has_communities:
            emit("all", self.values, self.degenerate)
        else:
            for ci, label in enumerate(self.communities):
                emit(label, self.values[ci], self.degenerate[ci])
            emit("mean", self.mean_values, self.mean_degenerate)
        return "\n".join(lines) + "\n"


def corbit_grid(panel: TimeSeriesPanel, net: Network, W: np.ndarray,
                max_lag: int, max_stage: int, kind: str,
                part: CommunityPartition | None = None) -> CorbitGrid:
    """Evaluate the full lag/stage grid; cell failures become degenerate flags."""
    if kind not in KINDS:
        raise GnarError(f"kind must be one of {KINDS}, got {kind!r}")
    if max_lag < 1 or max_lag >= panel.T:
        raise GnarError(f"max lag must satisfy 1 <= H < T={panel.T}, got {max_lag}")
    rmax = max_stage_of(net)
    if max_stage < 1 or max_stage > rmax:
        raise GnarError(f"max stage must satisfy 1 <= R <= r_max={rmax}, "
                        f"got {max_stage}")
    fn = nacf if kind == "nacf" else pnacf
    H, R = max_lag, max_stage

    def cell(h: int, r: int, nodes) -> AcfCell:
        try:
            return fn(panel, net, W, h, r, nodes=nodes)
        except GnarError as exc:
            return AcfCell(0.0, True, str(exc))

    if part is None:
        values = np.zeros((H, R))
        degs = np.zeros((H, R), dtype=bool)
        for h in range(1, H + 1):
            for r in range(1, R + 1):
                c = cell(h, r, None)
                values[h - 1, r - 1] = c.value
                degs[h - 1, r - 1] = c.degenerate
        return CorbitGrid(kind=kind, max_lag=H, max_stage=R,
                          values=values, degenerate=degs)
    if part.d != panel.d:
        raise GnarError("partition and panel node counts differ")
    C = part.n_communities
    values = np.zeros((C, H, R))
    degs = np.zeros((C, H, R), dtype=bool)
    for g in range(1, C + 1):
        members = part.members(g)
        for h in range(1, H + 1):
            for r in range(1, R + 1):
                c = cell(h, r, members)
                values[g - 1, h - 1, r - 1] = c.value
                degs[g - 1, h - 1, r - 1] = c.degenerate
    mean_values = values.mean(axis=0)
    mean_deg = degs.all(axis=0)
    return CorbitGrid(kind=kind, max_lag=H, max_stage=R, values=values,
                      degenerate=degs, communities=part.labels,
                      mean_values=mean_values, mean_degenerate=mean_deg)


def max_stage_of(net: Network) -> int:
    """Largest shortest-path distance realised in the network."""
    return max_stage(bfs_distances(net))
