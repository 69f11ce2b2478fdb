"""Revealed-preference relations, GARP_e checks and violating-cycle enumeration.

Observation ``n`` is e-directly revealed preferred to ``k`` when the deflated
expenditure ``e[n] * p[n].q[n]`` still covers ``p[n].q[k]`` (or the two bundles
coincide); strictly so when it exceeds it.  A dataset violates GARP_e iff some
weak-preference cycle carries a strict edge, i.e. iff a strongly connected
component of the weak digraph contains a strict edge.
"""

from __future__ import annotations

import time
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .data import Dataset, InputError, as_precision


@dataclass(frozen=True)
class RelationGraph:
    """Dense boolean relation matrices over ``rows`` (dataset row indices).

    ``weak[a, b]``: row ``rows[a]`` is e-directly revealed preferred to
    ``rows[b]``; ``strict`` the strict version; ``closure`` the transitive
    closure of ``weak``.
    """

    rows: tuple[int, ...]
    weak: np.ndarray
    strict: np.ndarray
    closure: np.ndarray


@dataclass(frozen=True)
class ViolationCycle:
    """Elementary cycle ``t_1 -> ... -> t_M -> t_1`` of weak edges.

    ``observations`` holds ``(agent_id, obs_id)`` keys.  The edge leaving
    position ``strict_edge_index`` is strict; cycles built here are rotated so
    that this is the closing edge ``t_M -> t_1``.
    """

    observations: tuple[tuple[str, str], ...]
    strict_edge_index: int

    def __post_init__(self):
        if len(self.observations) < 2:
            raise ValueError("a violation cycle needs at least two observations")
        if len(set(self.observations)) != len(self.observations):
            raise ValueError("violation cycle must be elementary")

    @property
    def agents(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.observations)

    def __len__(self) -> int:
        return len(self.observations)


@dataclass(frozen=True)
class GarpResult:
    satisfied: bool
    witness: ViolationCycle | None = None

    def __bool__(self) -> bool:
        return self.satisfied


def _resolve_rows(dataset: Dataset, subset) -> np.ndarray:
    """Map an optional observation filter to sorted dataset rows.

    ``subset`` may hold ``(agent_id, obs_id)`` keys or integer row indices.
    """
    if subset is None:
        return np.arange(len(dataset))
    rows = set()
    for item in subset:
        if isinstance(item, tuple):
            rows.add(dataset.row(*item))
        else:
            r = int(item)
            if not 0 <= r < len(dataset):
                raise InputError(f"unknown observation row {r}")
            rows.add(r)
    if not rows:
        raise InputError("observation subset must be non-empty")
    return np.array(sorted(rows))


def direct_relations(dataset: Dataset, e, tol: float | None = None):
    """Weak and strict direct relation matrices over all dataset rows."""
    e_arr = as_precision(e).for_dataset(dataset)
    P, Q = dataset.prices, dataset.quantities
    if tol is None:
        tol = dataset.tolerance
    cost = P @ Q.T  # cost[n, k] = p^n . q^k
    budget = e_arr * np.diag(cost)
    same = np.all(np.abs(Q[:, None, :] - Q[None, :, :]) <= tol, axis=2)
    weak = (budget[:, None] >= cost - tol) | same
    strict = budget[:, None] > cost + tol
    np.fill_diagonal(weak, True)
    np.fill_diagonal(strict, False)
    return weak, strict


def transitive_closure(weak: np.ndarray) -> np.ndarray:
    """Boolean Floyd-Warshall."""
    R = np.array(weak, dtype=bool, copy=True)
    for k in range(R.shape[0]):
        R |= np.outer(R[:, k], R[k, :])
    return R


def build_relations(dataset: Dataset, e, subset=None) -> RelationGraph:
    rows = _resolve_rows(dataset, subset)
    weak, strict = direct_relations(dataset, e)
    ix = np.ix_(rows, rows)
    w, s = weak[ix], strict[ix]
    return RelationGraph(tuple(int(r) for r in rows), w, s, transitive_closure(w))


def _bfs_path(weak: np.ndarray, src: int, dst: int, allowed: np.ndarray | None = None) -> list[int]:
    """Shortest weak path ``src -> dst`` (local indices), avoiding self-loops."""
    n = weak.shape[0]
    pred = np.full(n, -1)
    pred[src] = src
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        for v in np.flatnonzero(weak[u]):
            if pred[v] < 0 and (allowed is None or allowed[v]):
                pred[v] = u
                queue.append(v)
    if pred[dst] < 0:
        raise RuntimeError("no weak path between observations in the same component")
    path = [dst]
    while path[-1] != src:
        path.append(int(pred[path[-1]]))
    return path[::-1]


def find_violation(weak: np.ndarray, strict: np.ndarray) -> list[int] | None:
    """Local indices ``[t_1, ..., t_M]`` of a violating cycle, or ``None``.

    The cycle's consecutive pairs are weak edges and ``t_M -> t_1`` is strict.
    """
    n = weak.shape[0]
    if n < 2:
        return None
    ncomp, labels = connected_components(csr_matrix(weak), directed=True, connection="strong")
    if ncomp == n:
        return None
    same = labels[:, None] == labels[None, :]
    hits = np.argwhere(strict & same)
    if len(hits) == 0:
        return None
    # strict edge k -> m closes a weak path m -> ... -> k
    k, m = (int(x) for x in hits[0])
    return _bfs_path(weak, m, k, allowed=labels == labels[k])


def _cycle_from_rows(dataset: Dataset, rows: Sequence[int]) -> ViolationCycle:
    return ViolationCycle(
        tuple(dataset.observations[r].key for r in rows), strict_edge_index=len(rows) - 1
    )


def garp_check(dataset: Dataset, e, subset=None) -> GarpResult:
    """GARP_e test; on failure the witness cycle names the offending observations."""
    rows = _resolve_rows(dataset, subset)
    weak, strict = direct_relations(dataset, e)
    return garp_check_rows(dataset, weak, strict, rows)


def garp_check_rows(dataset: Dataset, weak, strict, rows) -> GarpResult:
    """GARP check on a row subset of precomputed full-dataset relations."""
    rows = np.asarray(rows)
    ix = np.ix_(rows, rows)
    local = find_violation(weak[ix], strict[ix])
    if local is None:
        return GarpResult(True)
    return GarpResult(False, _cycle_from_rows(dataset, [int(rows[i]) for i in local]))


@dataclass(frozen=True)
class CycleEnumeration:
    cycles: list[ViolationCycle]
    complete: bool


def _johnson_cycles(adj: list[list[int]], nodes: Iterable[int]):
    """Elementary circuits of the subgraph induced by ``nodes`` (iterative Johnson)."""
    nodes = sorted(nodes)
    for start_pos, s in enumerate(nodes):
        # restrict to nodes >= s and to the strong component of s within them
        active = set(nodes[start_pos:])
        sub = {u: [v for v in adj[u] if v in active] for u in active}
        comp = _component_of(sub, s)
        if len(comp) < 2:
            continue
        sub = {u: [v for v in sub[u] if v in comp] for u in comp}
        blocked = {u: False for u in comp}
        B = {u: set() for u in comp}
        path = [s]
        blocked[s] = True
        stack = [(s, iter(sub[s]))]
        closed = [False]
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if v == s:
                    yield list(path)
                    closed[-1] = True
                elif not blocked[v]:
                    path.append(v)
                    blocked[v] = True
                    stack.append((v, iter(sub[v])))
                    closed.append(False)
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            was_closed = closed.pop()
            if was_closed:
                _unblock(u, blocked, B)
                if closed:
                    closed[-1] = True
            else:
                for v in sub[u]:
                    B[v].add(u)
            path.pop()


def _unblock(u, blocked, B):
    todo = [u]
    while todo:
        w = todo.pop()
        if blocked[w]:
            blocked[w] = False
            todo.extend(B[w])
            B[w].clear()


def _component_of(sub: dict[int, list[int]], s: int) -> set[int]:
    fwd = {s}
    todo = [s]
    while todo:
        u = todo.pop()
        for v in sub[u]:
            if v not in fwd:
                fwd.add(v)
                todo.append(v)
    rev_adj: dict[int, list[int]] = {u: [] for u in sub}
    for u, vs in sub.items():
        for v in vs:
            rev_adj[v].append(u)
    bwd = {s}
    todo = [s]
    while todo:
        u = todo.pop()
        for v in rev_adj[u]:
            if v not in bwd:
                bwd.add(v)
                todo.append(v)
    return fwd & bwd


def enumerate_violating_cycles(
    dataset: Dataset,
    e,
    subset=None,
    max_cycles: int = 10_000,
    time_limit: float | None = None,
) -> CycleEnumeration:
    """All elementary weak cycles carrying at least one strict edge.

    Enumeration stops after ``max_cycles`` cycles or ``time_limit`` seconds,
    in which case ``complete`` is False.
    """
    if max_cycles < 1:
        raise ValueError("max_cycles must be >= 1")
    rows = _resolve_rows(dataset, subset)
    weak_full, strict_full = direct_relations(dataset, e)
    ix = np.ix_(rows, rows)
    weak, strict = weak_full[ix].copy(), strict_full[ix]
    np.fill_diagonal(weak, False)
    n = len(rows)
    ncomp, labels = connected_components(csr_matrix(weak), directed=True, connection="strong")
    hot = {int(labels[a]) for a, b in np.argwhere(strict) if labels[a] == labels[b]}
    adj = [list(map(int, np.flatnonzero(weak[u]))) for u in range(n)]
    deadline = None if time_limit is None else time.monotonic() + time_limit
    cycles: list[ViolationCycle] = []
    for c in sorted(hot):
        members = [u for u in range(n) if labels[u] == c]
        for cyc in _johnson_cycles(adj, members):
            if deadline is not None and time.monotonic() > deadline:
                return CycleEnumeration(cycles, False)
            M = len(cyc)
            strict_pos = [i for i in range(M) if strict[cyc[i], cyc[(i + 1) % M]]]
            if not strict_pos:
                continue
            # rotate so the first strict edge closes the cycle
            j = strict_pos[0] + 1
            if len(cycles) == max_cycles:
                return CycleEnumeration(cycles, False)
            rotated = cyc[j:] + cyc[:j]
            cycles.append(_cycle_from_rows(dataset, [int(rows[i]) for i in rotated]))
    return CycleEnumeration(cycles, True)
