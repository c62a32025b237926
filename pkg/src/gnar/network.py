"""Static undirected networks: shortest-path stages and association weights.

A network is a simple undirected graph on nodes 1..d.  From it we derive
the integer shortest-path distance matrix, the per-stage adjacency matrices
(stage r marks pairs at shortest-path distance exactly r) and the weight
matrix that splits each node's stage-r neighbourhood effect equally among
its stage-r neighbours.  Disconnected graphs are allowed: unreachable pairs
carry the ``UNREACHABLE`` sentinel, appear in no stage matrix, and isolated
nodes get all-zero weight rows.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, NetworkError

#: Sentinel distance for unreachable pairs.
UNREACHABLE = -1


@dataclass(frozen=True)
class Network:
    """Simple undirected graph on nodes 1..d.

    Edges are stored as sorted 1-based pairs.  No self-loops, no duplicates.
    """

    d: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.d < 1:
            raise NetworkError(f"node count must be >= 1, got {self.d}")
        for i, j in self.edges:
            if i == j:
                raise NetworkError(f"self-loop at node {i}")
            if not (1 <= i <= self.d) or not (1 <= j <= self.d):
                raise NetworkError(f"edge ({i},{j}) out of range 1..{self.d}")
            if i > j:
                raise NetworkError(f"edge ({i},{j}) not stored in sorted order")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (d x d, zero diagonal, symmetric)."""
        A = np.zeros((self.d, self.d))
        for i, j in self.edges:
            A[i - 1, j - 1] = 1.0
            A[j - 1, i - 1] = 1.0
        return A

    def neighbours(self, i: int) -> list[int]:
        """1-based ids of the direct neighbours of node i."""
        out = []
        for a, b in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)


def build_network(d: int, edges: list[tuple[int, int]]) -> Network:
    """Validate an edge list and build a :class:`Network`.

    Self-loops, out-of-range ids and duplicate edges (order-insensitive)
    are hard errors: fail fast on malformed fixtures.
    """
    if d < 1:
        raise NetworkError(f"node count must be >= 1, got {d}")
    seen: set[tuple[int, int]] = set()
    for i, j in edges:
        if i == j:
            raise NetworkError(f"self-loop at node {i}")
        if not (1 <= i <= d) or not (1 <= j <= d):
            raise NetworkError(f"edge ({i},{j}) out of range 1..{d}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise NetworkError(f"duplicate edge ({i},{j})")
        seen.add(key)
    return Network(d=d, edges=frozenset(seen))


def bfs_distances(net: Network) -> np.ndarray:
    """All-pairs unweighted shortest-path distances via per-source BFS.

    Returns an integer d x d matrix with zero diagonal; unreachable pairs
    hold :data:`UNREACHABLE`.
    """
    d = net.d
    adj: list[list[int]] = [[] for _ in range(d)]
    for i, j in net.edges:
        adj[i - 1].append(j - 1)
        adj[j - 1].append(i - 1)
    dist = np.full((d, d), UNREACHABLE, dtype=np.int64)
    for s in range(d):
        dist[s, s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if dist[s, v] == UNREACHABLE:
                    dist[s, v] = dist[s, u] + 1
                    queue.append(v)
    return dist


def max_stage(dist: np.ndarray) -> int:
    """Largest finite off-diagonal distance; 0 when no pair is reachable."""
    off = dist[~np.eye(dist.shape[0], dtype=bool)]
    finite = off[off != UNREACHABLE]
    return int(finite.max()) if finite.size else 0


def stage_adjacency(dist: np.ndarray) -> list[np.ndarray]:
    """Binary stage matrices S_1..S_rmax from a distance matrix.

    ``S_r[i, j] = 1`` exactly when the shortest path from i to j has length
    r.  Returns an empty list for graphs with no reachable pair.
    """
    rmax = max_stage(dist)
    return [(dist == r).astype(float) for r in range(1, rmax + 1)]


def default_weights(dist: np.ndarray) -> np.ndarray:
    """Equal-split association weights: w_ij = 1 / #{stage-d(i,j) neighbours of i}.

    Entries are zero on the diagonal and for unreachable pairs.  Rows of
    isolated nodes are all zero.  The matrix need not be symmetric: i and j
    may have different neighbourhood sizes at their common distance.
    """
    d = dist.shape[0]
    W = np.zeros((d, d))
    rmax = max_stage(dist)
    for r in range(1, rmax + 1):
        mask = dist == r
        counts = mask.sum(axis=1)
        rows = counts > 0
        W[mask] = np.repeat(1.0 / counts[rows], counts[rows])
    return W


def mask_weights(W: np.ndarray, part, c: int) -> np.ndarray:
    """Zero all weights outside community c x community c.

    Surviving entries keep their original values (no renormalisation), so
    the mask is idempotent and commutes with stage masking.
    """
    part.check_community(c)
    member = np.asarray([part.community_of(i + 1) == c for i in range(W.shape[0])])
    return W * np.outer(member, member)


# ---------------------------------------------------------------------------
# file formats: edge lists and weight overrides
# ---------------------------------------------------------------------------

def read_edge_list(path: str | Path, d: int | None = None) -> Network:
    """Read a ``from,to`` edge list with 1-based node ids.

    The node count comes from a ``# d: N`` metadata comment in the file or
    from the ``d`` argument (the argument wins if both are present).
    """
    lines = Path(path).read_text().splitlines()
    meta_d = None
    rows = []
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.lower().startswith("d:"):
                meta_d = int(body.split(":", 1)[1])
            continue
        if line.lower().replace(" ", "") == "from,to":
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DataError(f"{path}:{ln}: expected 'from,to', got {line!r}")
        rows.append((int(parts[0]), int(parts[1])))
    n = d if d is not None else meta_d
    if n is None:
        raise DataError(f"{path}: node count missing (no '# d: N' line and no override)")
    return build_network(n, rows)


def format_edge_list(net: Network) -> str:
    lines = [f"# d: {net.d}", "from,to"]
    lines += [f"{i},{j}" for i, j in sorted(net.edges)]
    return "\n".join(lines) + "\n"


def write_edge_list(net: Network, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(net))


def load_weight_overrides(path: str | Path, W: np.ndarray) -> np.ndarray:
    """Apply ``from,to,w`` overrides on a copy of W; unlisted pairs keep defaults.

    Overrides must be off-diagonal, in range and inside [0, 1].  Row sums
    are not re-normalised: custom weightings are the caller's contract.
    """
    out = W.copy()
    d = W.shape[0]
    lines = Path(path).read_text().splitlines()
    for ln, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().replace(" ", "") == "from,to,w":
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise DataError(f"{path}:{ln}: expected 'from,to,w', got {line!r}")
        i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        if i == j:
            raise DataError(f"{path}:{ln}: self-pair ({i},{j}) cannot carry weight")
        if not (1 <= i <= d) or not (1 <= j <= d):
            raise DataError(f"{path}:{ln}: pair ({i},{j}) out of range 1..{d}")
        if not (0.0 <= w <= 1.0):
            raise DataError(f"{path}:{ln}: weight {w} outside [0, 1]")
        out[i - 1, j - 1] = w
    return out
