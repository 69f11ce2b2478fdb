"""Structural statistics and community detection on threshold networks."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .simnet import ThresholdNetwork


@dataclass(frozen=True)
class NetworkStats:
    nodes: int
    edges: int
    average_degree: float
    isolated: int
    clustering: float
    average_path_length: float | None
    components: int
    largest_component_share: float

    def to_json(self) -> dict:
        return asdict(self)


def _adjacency(H) -> np.ndarray:
    A = H.adjacency if isinstance(H, ThresholdNetwork) else np.asarray(H)
    A = np.asarray(A, dtype=bool)
    return A & ~np.eye(A.shape[0], dtype=bool)


def network_stats(H) -> NetworkStats:
    """Counts, degree, clustering and path length of a simple graph.

    Clustering averages local clustering over all nodes, with nodes of degree
    below 2 counted as 0.  Path length is the mean over unordered node pairs
    of the largest connected component (``None`` if it has a single node).
    """
    A = _adjacency(H)
    n = A.shape[0]
    if n == 0:
        return NetworkStats(0, 0, 0.0, 0, 0.0, None, 0, 0.0)
    deg = A.sum(axis=1)
    m = int(deg.sum()) // 2
    Af = A.astype(float)
    triangles = ((Af @ Af) * Af).sum(axis=1) / 2
    pairs = deg * (deg - 1) / 2
    local = np.divide(triangles, pairs, out=np.zeros(n), where=pairs > 0)
    ncomp, labels = connected_components(csr_matrix(A), directed=False)
    sizes = np.bincount(labels)
    biggest = int(np.argmax(sizes))  # ties go to the component of the lowest node
    members = np.flatnonzero(labels == biggest)
    apl = None
    if len(members) > 1:
        sub = csr_matrix(A[np.ix_(members, members)])
        d = shortest_path(sub, directed=False, unweighted=True)
        iu = np.triu_indices(len(members), k=1)
        apl = float(d[iu].mean())
    return NetworkStats(
        nodes=n,
        edges=m,
        average_degree=2 * m / n,
        isolated=int((deg == 0).sum()),
        clustering=float(local.mean()),
        average_path_length=apl,
        components=int(ncomp),
        largest_component_share=float(sizes[biggest] / n),
    )


@dataclass(frozen=True)
class CommunityAssignment:
    """``labels[i]`` is node ``i``'s community, or -1 for isolated nodes."""

    labels: np.ndarray
    modularity: float
    seed: int
    isolated_excluded: bool = True

    @property
    def n_communities(self) -> int:
        return int(self.labels.max()) + 1 if (self.labels >= 0).any() else 0

    def members(self) -> list[list[int]]:
        return [np.flatnonzero(self.labels == c).tolist() for c in range(self.n_communities)]


def modularity(A: np.ndarray, labels: np.ndarray) -> float:
    """Newman modularity of ``labels`` on the nodes with ``labels >= 0``."""
    A = np.asarray(A, dtype=float)
    keep = labels >= 0
    A = A[np.ix_(keep, keep)]
    lab = labels[keep]
    k = A.sum(axis=1)
    two_m = k.sum()
    if two_m == 0:
        return 0.0
    q = 0.0
    for c in np.unique(lab):
        idx = lab == c
        q += A[np.ix_(idx, idx)].sum() / two_m - (k[idx].sum() / two_m) ** 2
    return float(q)


def _local_moves(W: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    """One Louvain level: move nodes (ascending order) to their best neighbor community."""
    n = W.shape[0]
    k = W.sum(axis=1)
    two_m = k.sum()
    comm = np.arange(n)
    tot = k.copy()
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in range(n):
            ci = comm[i]
            tot[ci] -= k[i]
            nbrs = np.flatnonzero(W[i])
            nbrs = nbrs[nbrs != i]
            links: dict[int, float] = {}
            for j in nbrs:
                links[comm[j]] = links.get(comm[j], 0.0) + W[i, j]
            stay = links.get(ci, 0.0) - tot[ci] * k[i] / two_m
            gains = {c: w - tot[c] * k[i] / two_m for c, w in links.items()}
            best_gain = max(gains.values(), default=stay)
            target = ci
            if best_gain > stay + 1e-12:
                tied = sorted(c for c, g in gains.items() if g >= best_gain - 1e-12)
                target = tied[rng.integers(len(tied))] if len(tied) > 1 else tied[0]
            comm[i] = target
            tot[target] += k[i]
            if target != ci:
                improved = True
                moved_any = True
    _, comm = np.unique(comm, return_inverse=True)
    return comm, moved_any


def detect_communities(H, seed: int = 0) -> CommunityAssignment:
    """Louvain-style modularity maximization on the non-isolated nodes.

    Nodes are visited in ascending index order; equal-gain moves are broken
    at random from ``seed``.  Community ids are numbered by smallest member.
    """
    A = _adjacency(H)
    deg = A.sum(axis=1)
    active = np.flatnonzero(deg > 0)
    if len(active) == 0:
        raise ValueError("community detection needs at least one edge")
    rng = np.random.default_rng(seed)
    W = A[np.ix_(active, active)].astype(float)
    membership = np.arange(len(active))
    while True:
        comm, moved = _local_moves(W, rng)
        if not moved:
            break
        membership = comm[membership]
        S = np.zeros((W.shape[0], comm.max() + 1))
        S[np.arange(W.shape[0]), comm] = 1.0
        W = S.T @ W @ S
    # renumber by smallest member node
    order = {}
    for c in membership:
        order.setdefault(int(c), len(order))
    labels = np.full(A.shape[0], -1)
    labels[active] = [order[int(c)] for c in membership]
    return CommunityAssignment(labels, modularity(A, labels), seed)


def stats_record(stats: NetworkStats, alpha: float) -> dict:
    """Stats JSON payload for one threshold level."""
    return {"alpha": alpha, **stats.to_json()}


def write_communities_csv(H: ThresholdNetwork, comm: CommunityAssignment, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["agent_id", "community"])
        for a, c in zip(H.agents, comm.labels):
            w.writerow([a, int(c) if c >= 0 else ""])
