"""Model orders and coefficients for network autoregressions.

Three coefficient-sharing variants are supported:

* ``global``: one coefficient set for every node,
* ``community``: one coefficient set per community, with neighbourhood
  regressions masked to within-community pairs,
* ``local``: node-specific autoregressive coefficients with neighbourhood
  coefficients shared across nodes.

The module also converts any variant to its equivalent VAR transition
matrices, checks the sufficient stationarity condition (every group's sum
of absolute coefficients below one) and maps community models to their
node-wise representation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DataError, OrderError
from .network import Network, bfs_distances, mask_weights, stage_adjacency
from .partition import CommunityPartition

VARIANTS = ("global", "community", "local")


@dataclass(frozen=True)
class GnarOrder:
    """Lag and stage orders, per coefficient group.

    ``lags[g]`` is the maximum lag of group g and ``stages[g][k-1]`` the
    maximum neighbourhood stage used at lag k.  A stage order of 0 means no
    neighbourhood term at that lag.  Global and local variants have a
    single group; the community variant has one group per community.
    """

    variant: str
    lags: tuple[int, ...]
    stages: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise OrderError(f"unknown variant {self.variant!r}")
        if self.variant in ("global", "local") and len(self.lags) != 1:
            raise OrderError(f"{self.variant} orders have a single group")
        if len(self.lags) != len(self.stages):
            raise OrderError("lags and stages must have one entry per group")
        if not self.lags:
            raise OrderError("order needs at least one group")
        for g, (p, s) in enumerate(zip(self.lags, self.stages), start=1):
            if p < 1:
                raise OrderError(f"group {g}: maximum lag must be >= 1, got {p}")
            if len(s) != p:
                raise OrderError(f"group {g}: {len(s)} stage orders for {p} lags")
            if any(int(sk) != sk or sk < 0 for sk in s):
                raise OrderError(f"group {g}: stage orders must be nonnegative integers")

    # -- constructors -----------------------------------------------------
    @classmethod
    def global_order(cls, p: int, stages: list[int]) -> "GnarOrder":
        return cls("global", (p,), (tuple(stages),))

    @classmethod
    def community_order(cls, lags: list[int], stages: list[list[int]]) -> "GnarOrder":
        return cls("community", tuple(lags), tuple(tuple(s) for s in stages))

    @classmethod
    def local_order(cls, p: int, stages: list[int]) -> "GnarOrder":
        return cls("local", (p,), (tuple(stages),))

    # -- derived quantities -----------------------------------------------
    @property
    def n_groups(self) -> int:
        return len(self.lags)

    @property
    def p_max(self) -> int:
        """Global maximum lag across groups."""
        return max(self.lags)

    @property
    def r_star(self) -> int:
        """Maximum stage depth used anywhere in the model."""
        return max((max(s) if s else 0) for s in self.stages)

    def group_param_count(self, g: int) -> int:
        """Parameters of group g (1-based): one alpha per lag plus stage betas."""
        return self.lags[g - 1] + sum(self.stages[g - 1])

    def param_count(self, d: int | None = None) -> int:
        """Total parameter count; the local variant needs the node count d."""
        if self.variant == "local":
            if d is None:
                raise OrderError("local orders need the node count for parameter counts")
            p, s = self.lags[0], self.stages[0]
            return d * p + sum(s)
        return sum(self.group_param_count(g) for g in range(1, self.n_groups + 1))


class ThetaEntry(NamedTuple):
    """One coefficient slot in the stacked parameter vector."""

    group: int
    lag: int
    stage: int | None
    node: int | None

    def name(self, variant: str) -> str:
        if self.stage is None:
            if variant == "community":
                return f"alpha.{self.lag}.{self.group}"
            if variant == "local":
                return f"alpha.node{self.node}.{self.lag}"
            return f"alpha.{self.lag}"
        if variant == "community":
            return f"beta.{self.lag}.{self.stage}.{self.group}"
        return f"beta.{self.lag}.{self.stage}"


def theta_index(order: GnarOrder, d: int | None = None) -> list[ThetaEntry]:
    """Slots of the parameter vector, groups ascending, lag-major inside."""
    entries: list[ThetaEntry] = []
    if order.variant == "local":
        if d is None:
            raise OrderError("local orders need the node count to lay out parameters")
        p, s = order.lags[0], order.stages[0]
        for k in range(1, p + 1):
            for i in range(1, d + 1):
                entries.append(ThetaEntry(group=1, lag=k, stage=None, node=i))
            for r in range(1, s[k - 1] + 1):
                entries.append(ThetaEntry(group=1, lag=k, stage=r, node=None))
        return entries
    for g in range(1, order.n_groups + 1):
        p, s = order.lags[g - 1], order.stages[g - 1]
        for k in range(1, p + 1):
            entries.append(ThetaEntry(group=g, lag=k, stage=None, node=None))
            for r in range(1, s[k - 1] + 1):
                entries.append(ThetaEntry(group=g, lag=k, stage=r, node=None))
    return entries


@dataclass(frozen=True)
class GnarCoefficients:
    """Coefficient values matching a :class:`GnarOrder`.

    * global/community: ``alpha[g][k-1]`` and ``beta[g][k-1][r-1]`` hold the
      group-g coefficients at lag k (stage r).
    * local: ``alpha_nodes[i-1, k-1]`` is node i's lag-k coefficient and
      ``beta[0][k-1][r-1]`` the stage coefficients shared by all nodes.
    """

    variant: str
    alpha: tuple[np.ndarray, ...]
    beta: tuple[tuple[np.ndarray, ...], ...]
    noise_sd: float
    alpha_nodes: np.ndarray | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise OrderError(f"unknown variant {self.variant!r}")
        if self.noise_sd <= 0:
            raise OrderError(f"noise sd must be positive, got {self.noise_sd}")
        object.__setattr__(self, "alpha",
                           tuple(np.asarray(a, dtype=float) for a in self.alpha))
        object.__setattr__(self, "beta",
                           tuple(tuple(np.asarray(b, dtype=float) for b in group)
                                 for group in self.beta))
        if self.alpha_nodes is not None:
            object.__setattr__(self, "alpha_nodes",
                               np.asarray(self.alpha_nodes, dtype=float))

    def validate_against(self, order: GnarOrder, d: int | None = None) -> None:
        if self.variant != order.variant:
            raise OrderError(f"coefficients are {self.variant}, order is {order.variant}")
        if order.variant == "local":
            if self.alpha_nodes is None:
                raise OrderError("local coefficients need node-wise alphas")
            p = order.lags[0]
            if self.alpha_nodes.ndim != 2 or self.alpha_nodes.shape[1] != p:
                raise OrderError(f"node-wise alphas must be d x {p}")
            if d is not None and self.alpha_nodes.shape[0] != d:
                raise OrderError(f"node-wise alphas for {self.alpha_nodes.shape[0]} nodes, "
                                 f"expected {d}")
        else:
            if len(self.alpha) != order.n_groups:
                raise OrderError(f"{len(self.alpha)} alpha groups for {order.n_groups}")
            for g in range(order.n_groups):
                if self.alpha[g].shape != (order.lags[g],):
                    raise OrderError(f"group {g + 1}: alpha length {self.alpha[g].shape} "
                                     f"does not match lag order {order.lags[g]}")
        if len(self.beta) != len(self.beta_groups_expected(order)):
            raise OrderError("beta group count does not match the order")
        for g, stages in enumerate(self.beta_groups_expected(order)):
            if len(self.beta[g]) != len(stages):
                raise OrderError(f"group {g + 1}: beta lag count mismatch")
            for k, s in enumerate(stages):
                if self.beta[g][k].shape != (s,):
                    raise OrderError(f"group {g + 1}, lag {k + 1}: expected {s} stage "
                                     f"coefficients, got {self.beta[g][k].shape[0]}")

    @staticmethod
    def beta_groups_expected(order: GnarOrder) -> tuple[tuple[int, ...], ...]:
        return order.stages

    # -- flat parameter vector --------------------------------------------
    def to_theta(self, order: GnarOrder) -> np.ndarray:
        self.validate_against(order)
        out: list[float] = []
        if order.variant == "local":
            p, s = order.lags[0], order.stages[0]
            for k in range(1, p + 1):
                out.extend(self.alpha_nodes[:, k - 1])
                out.extend(self.beta[0][k - 1])
            return np.asarray(out)
        for g in range(order.n_groups):
            p, s = order.lags[g], order.stages[g]
            for k in range(1, p + 1):
                out.append(float(self.alpha[g][k - 1]))
                out.extend(self.beta[g][k - 1])
        return np.asarray(out)

    @classmethod
    def from_theta(cls, theta: np.ndarray, order: GnarOrder,
                   noise_sd: float = 1.0, d: int | None = None) -> "GnarCoefficients":
        theta = np.asarray(theta, dtype=float)
        expected = order.param_count(d)
        if theta.shape != (expected,):
            raise OrderError(f"theta length {theta.shape} does not match {expected}")
        pos = 0
        if order.variant == "local":
            p, s = order.lags[0], order.stages[0]
            alpha_nodes = np.zeros((d, p))
            betas: list[np.ndarray] = []
            for k in range(p):
                alpha_nodes[:, k] = theta[pos:pos + d]
                pos += d
                betas.append(theta[pos:pos + s[k]])
                pos += s[k]
            return cls(variant="local", alpha=(), beta=(tuple(betas),),
                       noise_sd=noise_sd, alpha_nodes=alpha_nodes)
        alphas: list[np.ndarray] = []
        beta_groups: list[tuple[np.ndarray, ...]] = []
        for g in range(order.n_groups):
            p, s = order.lags[g], order.stages[g]
            a = np.zeros(p)
            bs: list[np.ndarray] = []
            for k in range(p):
                a[k] = theta[pos]
                pos += 1
                bs.append(theta[pos:pos + s[k]])
                pos += s[k]
            alphas.append(a)
            beta_groups.append(tuple(bs))
        return cls(variant=order.variant, alpha=tuple(alphas),
                   beta=tuple(beta_groups), noise_sd=noise_sd)


@dataclass(frozen=True)
class StationarityReport:
    """Per-group absolute-coefficient sums and the resulting verdict.

    The sufficient condition is strict: every group (or node) sum below 1.
    ``margin`` is 1 minus the largest sum, so positive margin certifies the
    verdict and a small margin warns of a near-boundary model.
    """

    sums: np.ndarray
    labels: tuple[str, ...]

    @property
    def stationary(self) -> bool:
        return bool(np.all(self.sums < 1.0))

    @property
    def margin(self) -> float:
        return float(1.0 - np.max(self.sums))


def stationarity_margin(coeffs: GnarCoefficients, order: GnarOrder) -> StationarityReport:
    """Sum |alpha| + |beta| per group and compare against the unit bound."""
    coeffs.validate_against(order)
    if order.variant == "local":
        p, s = order.lags[0], order.stages[0]
        beta_total = sum(float(np.sum(np.abs(b))) for b in coeffs.beta[0])
        sums = np.sum(np.abs(coeffs.alpha_nodes), axis=1) + beta_total
        labels = tuple(f"node{i}" for i in range(1, coeffs.alpha_nodes.shape[0] + 1))
        return StationarityReport(sums=sums, labels=labels)
    sums = []
    for g in range(order.n_groups):
        total = float(np.sum(np.abs(coeffs.alpha[g])))
        total += sum(float(np.sum(np.abs(b))) for b in coeffs.beta[g])
        sums.append(total)
    labels = tuple(str(g) for g in range(1, order.n_groups + 1))
    return StationarityReport(sums=np.asarray(sums), labels=labels)


def to_var(coeffs: GnarCoefficients, order: GnarOrder, net: Network,
           W: np.ndarray, part: CommunityPartition | None = None) -> np.ndarray:
    """Transition matrices of the equivalent VAR(p), shape (p_max, d, d).

    Group g contributes a diagonal block of its alphas on its member nodes
    plus its stage betas times the community-masked, stage-masked weight
    matrix; lags beyond a group's own order contribute zero.
    """
    coeffs.validate_against(order, d=net.d)
    S = stage_adjacency(bfs_distances(net))
    if order.r_star > len(S):
        raise OrderError(f"order uses stage {order.r_star}, but the network's "
                         f"largest stage is {len(S)}")
    d, p = net.d, order.p_max
    phi = np.zeros((p, d, d))
    if order.variant == "local":
        for k in range(1, p + 1):
            phi[k - 1] += np.diag(coeffs.alpha_nodes[:, k - 1])
            for r in range(1, order.stages[0][k - 1] + 1):
                phi[k - 1] += coeffs.beta[0][k - 1][r - 1] * (W * S[r - 1])
        return phi
    if order.variant == "community":
        if part is None:
            raise OrderError("community models need a partition")
        if part.n_communities != order.n_groups:
            raise OrderError(f"order has {order.n_groups} communities, "
                             f"partition has {part.n_communities}")
        if part.d != d:
            raise OrderError("partition and network node counts differ")
    for g in range(1, order.n_groups + 1):
        if order.variant == "community":
            xi = part.indicator(g)
            Wg = mask_weights(W, part, g)
        else:
            xi = np.ones(d)
            Wg = W
        for k in range(1, order.lags[g - 1] + 1):
            phi[k - 1] += np.diag(coeffs.alpha[g - 1][k - 1] * xi)
            for r in range(1, order.stages[g - 1][k - 1] + 1):
                phi[k - 1] += coeffs.beta[g - 1][k - 1][r - 1] * (Wg * S[r - 1])
    return phi


@dataclass(frozen=True)
class NodewiseCoefficients:
    """Node-wise representation of a community model.

    ``alpha[i-1, k-1]`` and ``beta[i-1, k-1, r-1]`` carry each node's
    coefficients, zero-padded to the global maximum lag and stage depth.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def abs_sums(self) -> np.ndarray:
        return np.sum(np.abs(self.alpha), axis=1) + np.sum(np.abs(self.beta), axis=(1, 2))

    @property
    def stationary(self) -> bool:
        return bool(np.all(self.abs_sums() < 1.0))

    @property
    def margin(self) -> float:
        return float(1.0 - np.max(self.abs_sums()))


def to_local_alpha(coeffs: GnarCoefficients, order: GnarOrder,
                   part: CommunityPartition) -> NodewiseCoefficients:
    """Expand a community model into per-node coefficient arrays.

    Node i inherits the coefficients of its community; slots beyond the
    community's own lag or stage order are zero.
    """
    if order.variant != "community":
        raise OrderError("node-wise expansion applies to community models")
    coeffs.validate_against(order)
    if part.n_communities != order.n_groups:
        raise OrderError("partition and order community counts differ")
    d, p = part.d, order.p_max
    smax = order.r_star
    alpha = np.zeros((d, p))
    beta = np.zeros((d, p, smax))
    for i in range(1, d + 1):
        c = part.community_of(i)
        for k in range(1, order.lags[c - 1] + 1):
            alpha[i - 1, k - 1] = coeffs.alpha[c - 1][k - 1]
            for r in range(1, order.stages[c - 1][k - 1] + 1):
                beta[i - 1, k - 1, r - 1] = coeffs.beta[c - 1][k - 1][r - 1]
    return NodewiseCoefficients(alpha=alpha, beta=beta)


# ---------------------------------------------------------------------------
# order grammar:  global:p;[s...]   community:[p...];{[s...],...}   local:p;[s...]
# ---------------------------------------------------------------------------

_INT_LIST = re.compile(r"^\[\s*(-?\d+(\s*,\s*-?\d+)*)?\s*\]$")


def _parse_int_list(text: str, where: str) -> list[int]:
    text = text.strip()
    if not _INT_LIST.match(text):
        raise OrderError(f"{where}: expected an integer list like [1,2], got {text!r}")
    inner = text[1:-1].strip()
    return [int(x) for x in inner.split(",")] if inner else []


def parse_order(text: str) -> GnarOrder:
    """Parse the single-line order grammar used by model files and the CLI."""
    text = text.strip()
    if ":" not in text:
        raise OrderError(f"order string needs a variant prefix, got {text!r}")
    variant, rest = text.split(":", 1)
    variant = variant.strip()
    if variant in ("global", "local"):
        try:
            p_text, s_text = rest.split(";", 1)
            p = int(p_text)
        except ValueError:
            raise OrderError(f"malformed {variant} order {text!r}") from None
        s = _parse_int_list(s_text, "stage list")
        if variant == "global":
            return GnarOrder.global_order(p, s)
        return GnarOrder.local_order(p, s)
    if variant == "community":
        try:
            p_text, s_text = rest.split(";", 1)
        except ValueError:
            raise OrderError(f"malformed community order {text!r}") from None
        lags = _parse_int_list(p_text, "lag list")
        s_text = s_text.strip()
        if not (s_text.startswith("{") and s_text.endswith("}")):
            raise OrderError(f"community stage lists must sit in braces, got {s_text!r}")
        body = s_text[1:-1].strip()
        lists = re.findall(r"\[[^\[\]]*\]", body)
        if len(lists) != len(lags):
            raise OrderError(f"{len(lists)} stage lists for {len(lags)} communities")
        stages = [_parse_int_list(x, "stage list") for x in lists]
        return GnarOrder.community_order(lags, stages)
    raise OrderError(f"unknown variant {variant!r}")


def format_order(order: GnarOrder) -> str:
    if order.variant in ("global", "local"):
        s = ",".join(str(x) for x in order.stages[0])
        return f"{order.variant}:{order.lags[0]};[{s}]"
    lags = ",".join(str(p) for p in order.lags)
    stage_lists = ",".join("[" + ",".join(str(x) for x in s) + "]" for s in order.stages)
    return f"community:[{lags}];{{{stage_lists}}}"


# ---------------------------------------------------------------------------
# model files: plain-text key/value lines, exact round trips
# ---------------------------------------------------------------------------

def format_model(coeffs: GnarCoefficients, order: GnarOrder,
                 d: int | None = None) -> str:
    """Model-file text; floats use repr so reads reproduce values exactly."""
    coeffs.validate_against(order, d=d)
    lines = ["gnar-model v1", f"variant {order.variant}"]
    if order.variant == "community":
        lines.append(f"C {order.n_groups}")
        lines.append("p " + " ".join(str(p) for p in order.lags))
        for g in range(1, order.n_groups + 1):
            lines.append(f"s {g} " + " ".join(str(x) for x in order.stages[g - 1]))
    else:
        if order.variant == "local":
            lines.append(f"d {coeffs.alpha_nodes.shape[0]}")
        lines.append(f"p {order.lags[0]}")
        lines.append("s " + " ".join(str(x) for x in order.stages[0]))
    lines.append(f"sigma {float(coeffs.noise_sd)!r}")
    if order.variant == "local":
        dd, p = coeffs.alpha_nodes.shape
        for k in range(1, p + 1):
            for i in range(1, dd + 1):
                lines.append(f"alpha {i} {k} {float(coeffs.alpha_nodes[i - 1, k - 1])!r}")
            for r in range(1, order.stages[0][k - 1] + 1):
                lines.append(f"beta {k} {r} {float(coeffs.beta[0][k - 1][r - 1])!r}")
    elif order.variant == "community":
        for g in range(1, order.n_groups + 1):
            for k in range(1, order.lags[g - 1] + 1):
                lines.append(f"alpha {k} {g} {float(coeffs.alpha[g - 1][k - 1])!r}")
                for r in range(1, order.stages[g - 1][k - 1] + 1):
                    lines.append(f"beta {k} {r} {g} {float(coeffs.beta[g - 1][k - 1][r - 1])!r}")
    else:
        for k in range(1, order.lags[0] + 1):
            lines.append(f"alpha {k} {float(coeffs.alpha[0][k - 1])!r}")
            for r in range(1, order.stages[0][k - 1] + 1):
                lines.append(f"beta {k} {r} {float(coeffs.beta[0][k - 1][r - 1])!r}")
    return "\n".join(lines) + "\n"


def write_model(coeffs: GnarCoefficients, order: GnarOrder, path: str | Path,
                d: int | None = None) -> None:
    Path(path).write_text(format_model(coeffs, order, d=d))


def read_model(path: str | Path) -> tuple[GnarCoefficients, GnarOrder]:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != "gnar-model v1":
        raise DataError(f"{path}: not a model file (missing 'gnar-model v1' header)")
    fields: dict[str, list[list[str]]] = {}
    for ln in lines[1:]:
        parts = ln.split()
        fields.setdefault(parts[0], []).append(parts[1:])
    try:
        variant = fields["variant"][0][0]
        sigma = float(fields["sigma"][0][0])
        if variant == "community":
            lags = [int(x) for x in fields["p"][0]]
            C = int(fields["C"][0][0])
            stages: list[list[int]] = [[] for _ in range(C)]
            for row in fields["s"]:
                stages[int(row[0]) - 1] = [int(x) for x in row[1:]]
            order = GnarOrder.community_order(lags, stages)
            alphas = [np.zeros(p) for p in lags]
            betas = [[np.zeros(s) for s in stages[g]] for g in range(C)]
            for row in fields.get("alpha", []):
                k, g, v = int(row[0]), int(row[1]), float(row[2])
                alphas[g - 1][k - 1] = v
            for row in fields.get("beta", []):
                k, r, g, v = int(row[0]), int(row[1]), int(row[2]), float(row[3])
                betas[g - 1][k - 1][r - 1] = v
            coeffs = GnarCoefficients(variant="community", alpha=tuple(alphas),
                                      beta=tuple(tuple(b) for b in betas), noise_sd=sigma)
        elif variant in ("global", "local"):
            p = int(fields["p"][0][0])
            s = [int(x) for x in fields["s"][0]]
            if variant == "global":
                order = GnarOrder.global_order(p, s)
                alpha = np.zeros(p)
                beta = [np.zeros(sk) for sk in s]
                for row in fields.get("alpha", []):
                    alpha[int(row[0]) - 1] = float(row[1])
                for row in fields.get("beta", []):
                    beta[int(row[0]) - 1][int(row[1]) - 1] = float(row[2])
                coeffs = GnarCoefficients(variant="global", alpha=(alpha,),
                                          beta=(tuple(beta),), noise_sd=sigma)
            else:
                order = GnarOrder.local_order(p, s)
                d = int(fields["d"][0][0])
                alpha_nodes = np.zeros((d, p))
                beta = [np.zeros(sk) for sk in s]
                for row in fields.get("alpha", []):
                    alpha_nodes[int(row[0]) - 1, int(row[1]) - 1] = float(row[2])
                for row in fields.get("beta", []):
                    beta[int(row[0]) - 1][int(row[1]) - 1] = float(row[2])
                coeffs = GnarCoefficients(variant="local", alpha=(), beta=(tuple(beta),),
                                          noise_sd=sigma, alpha_nodes=alpha_nodes)
        else:
            raise DataError(f"{path}: unknown variant {variant!r}")
    except (KeyError, IndexError, ValueError) as exc:
        raise DataError(f"{path}: malformed model file ({exc})") from None
    coeffs.validate_against(order)
    return coeffs, order
