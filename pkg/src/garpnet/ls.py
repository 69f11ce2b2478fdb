"""Largest jointly GARP_e-consistent subset of agents.

``solve_ls_exact`` is a depth-first branch-and-bound over agent inclusion.
Feasibility is hereditary (dropping agents only removes relation edges), so a
branch dies as soon as the pooled data of the included agents violate GARP_e.
Every violation found yields a witness cycle whose owning agents form a
no-good cut; cuts and pairwise conflicts are checked before any GARP test.
"""

from __future__ import annotations

import itertools
import time
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, PrecisionAssignment, as_precision
from .relations import GarpResult, build_relations, direct_relations, garp_check_rows

BRUTEFORCE_MAX_AGENTS = 20


class TimeLimitReached(Exception):
    pass


@dataclass(frozen=True)
class LsProblem:
    dataset: Dataset
    e: PrecisionAssignment | float = 1.0
    agents: tuple[str, ...] | None = None
    time_limit: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "e", as_precision(self.e))
        agents = self.dataset.agents if self.agents is None else sorted(set(self.agents))
        if not agents:
            raise ValueError("agent set must be non-empty")
        for a in agents:
            self.dataset.rows_of(a)
        object.__setattr__(self, "agents", tuple(agents))
        # coverage of e is validated eagerly
        self.e.for_dataset(self.dataset)


@dataclass(frozen=True)
class LsSolution:
    selected: tuple[str, ...]
    status: str  # "optimal" | "time_limit"
    certificate: GarpResult
    inconsistent: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def cardinality(self) -> int:
        return len(self.selected)


class FeasibilityOracle:
    """Pooled GARP_e feasibility of agent sets, with a shared cut pool.

    Relations are computed once for the whole dataset; a pooled check only
    slices the precomputed matrices.  Every violation adds the witness cycle's
    owner set as a cut, so later supersets are rejected without a GARP test.
    """

    def __init__(self, dataset: Dataset, e):
        self.dataset = dataset
        self.weak, self.strict = direct_relations(dataset, e)
        self.cuts: list[frozenset[str]] = []
        self._cuts_by_agent: dict[str, list[frozenset[str]]] = {}
        self._self_ok: dict[str, bool] = {}
        self._pair: dict[tuple[str, str], bool] = {}
        self.garp_calls = 0

    def _add_cut(self, owners: frozenset[str]) -> None:
        if owners in self._cuts_by_agent.get(next(iter(owners)), ()):
            return
        self.cuts.append(owners)
        for a in owners:
            self._cuts_by_agent.setdefault(a, []).append(owners)

    def violates_cut(self, group: Iterable[str], newcomer: str) -> bool:
        members = set(group)
        members.add(newcomer)
        return any(c <= members for c in self._cuts_by_agent.get(newcomer, ()))

    def check(self, agents: Iterable[str]) -> GarpResult:
        agents = sorted(set(agents))
        self.garp_calls += 1
        res = garp_check_rows(
            self.dataset, self.weak, self.strict, self.dataset.rows_for_agents(agents)
        )
        if not res.satisfied:
            self._add_cut(res.witness.agents)
        return res

    def self_consistent(self, a: str) -> bool:
        if a not in self._self_ok:
            self._self_ok[a] = self.check([a]).satisfied
        return self._self_ok[a]

    def compatible(self, a: str, b: str) -> bool:
        key = (a, b) if a < b else (b, a)
        if key not in self._pair:
            self._pair[key] = self.check(key).satisfied
        return self._pair[key]

    def conflict_bits(self, order: list[str]) -> list[int]:
        """Bitmask of pairwise conflicts over positions in ``order``."""
        n = len(order)
        bits = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if not self.compatible(order[i], order[j]):
                    bits[i] |= 1 << j
                    bits[j] |= 1 << i
        return bits

    def can_join(self, group: list[str], newcomer: str) -> bool:
        """Whether ``group + [newcomer]`` is feasible, given ``group`` is."""
        if self.violates_cut(group, newcomer):
            return False
        if len(group) < 2:
            # pairwise compatibility already decided it
            return all(self.compatible(g, newcomer) for g in group)
        return self.check([*group, newcomer]).satisfied


def _clique_cover_size(cands: list[int], conflict: list[int]) -> int:
    """Greedy clique cover of the conflict graph; bounds any feasible subset."""
    cliques: list[int] = []
    for j in cands:
        for ci, c in enumerate(cliques):
            if c & ~conflict[j] == 0:
                cliques[ci] = c | (1 << j)
                break
        else:
            cliques.append(1 << j)
    return len(cliques)


def solve_ls_exact(problem: LsProblem, oracle: FeasibilityOracle | None = None) -> LsSolution:
    """Maximum-cardinality agent subset whose pooled data satisfy GARP_e.

    Agents are branched in ascending id order, inclusion first; among
    maximum subsets the lexicographically smallest sorted id sequence wins.
    """
    start = time.monotonic()
    deadline = None if problem.time_limit is None else start + problem.time_limit
    if oracle is None:
        oracle = FeasibilityOracle(problem.dataset, problem.e)
    cuts_before = len(oracle.cuts)
    inconsistent = tuple(a for a in problem.agents if not oracle.self_consistent(a))
    order = [a for a in problem.agents if a not in inconsistent]
    n = len(order)
    conflict = oracle.conflict_bits(order)
    full = (1 << n) - 1

    best: list[int] = []
    nodes = 0

    def dfs(k: int, included: list[int], blocked: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if deadline is not None and nodes % 64 == 1 and time.monotonic() > deadline:
            raise TimeLimitReached
        cand_mask = full & ~blocked & ~((1 << k) - 1)
        cands = [j for j in range(k, n) if cand_mask >> j & 1]
        if len(included) + len(cands) <= len(best):
            return
        if not cands:
            best = list(included)
            return
        if len(included) + _clique_cover_size(cands, conflict) <= len(best):
            return
        j = cands[0]
        group = [order[i] for i in included]
        if oracle.can_join(group, order[j]):
            dfs(j + 1, included + [j], blocked | conflict[j])
        dfs(j + 1, included, blocked)

    status = "optimal"
    try:
        if n:
            dfs(0, [], 0)
    except TimeLimitReached:
        status = "time_limit"
    selected = tuple(order[i] for i in best)
    cert = (
        oracle.check(selected) if selected else GarpResult(True)
    )
    return LsSolution(
        selected,
        status,
        cert,
        inconsistent,
        {
            "nodes": nodes,
            "cuts_added": len(oracle.cuts) - cuts_before,
            "garp_calls": oracle.garp_calls,
            "seconds": time.monotonic() - start,
        },
    )


def solve_ls_bruteforce(problem: LsProblem) -> LsSolution:
    """Reference solver: scan subsets by decreasing size, lexicographically.

    Each candidate is tested through the transitive closure of the weak
    relation, independently of the SCC-based check used by the exact solver.
    """
    agents = list(problem.agents)
    if len(agents) > BRUTEFORCE_MAX_AGENTS:
        raise ValueError(f"brute force limited to {BRUTEFORCE_MAX_AGENTS} agents")
    ds = problem.dataset

    def consistent(subset) -> bool:
        rel = build_relations(ds, problem.e, ds.rows_for_agents(subset))
        return not np.any(rel.closure & rel.strict.T)

    inconsistent = tuple(a for a in agents if not consistent([a]))
    for size in range(len(agents), 0, -1):
        for subset in itertools.combinations(agents, size):
            if consistent(subset):
                return LsSolution(subset, "optimal", GarpResult(True), inconsistent)
    return LsSolution((), "optimal", GarpResult(True), inconsistent)
