"""Partitions of agents into GARP_e-consistent types.

Two routes: the greedy recursion that repeatedly peels off a largest
consistent subset, and an exact minimum partition found by iterative
deepening over the number of groups with lazily generated cycle cuts.
"""

from __future__ import annotations

import time
from collections.abc import Iterable
from dataclasses import dataclass, field

from .data import Dataset, as_precision
from .ls import FeasibilityOracle, LsProblem, TimeLimitReached, solve_ls_exact


@dataclass(frozen=True)
class Partition:
    blocks: tuple[tuple[str, ...], ...]
    method: str  # "greedy" | "minimum"
    status: str = "optimal"  # "optimal" | "time_limit_fallback"
    certificates: tuple[bool, ...] = ()
    # agents whose own data violate GARP_e; each sits alone in a trailing block
    inconsistent: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        seen: set[str] = set()
        for b in self.blocks:
            if seen.intersection(b):
                raise ValueError("partition blocks overlap")
            seen.update(b)
        object.__setattr__(self, "_block_of", {a: i for i, b in enumerate(self.blocks) for a in b})

    @property
    def agents(self) -> list[str]:
        return sorted(self._block_of)

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, agent: str) -> int:
        try:
            return self._block_of[agent]
        except KeyError:
            raise KeyError(f"agent {agent!r} is not partitioned") from None

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "status": self.status,
            "blocks": [list(b) for b in self.blocks],
            "sizes": [len(b) for b in self.blocks],
            "inconsistent": list(self.inconsistent),
        }


def co_type_indicator(partition: Partition, i: str, j: str) -> int:
    """1 when ``i`` and ``j`` share a block (always 1 for ``i == j``)."""
    return int(partition.block_of(i) == partition.block_of(j))


def _certify(oracle: FeasibilityOracle, blocks) -> tuple[bool, ...]:
    return tuple(oracle.check(b).satisfied for b in blocks)


def partition_greedy(
    dataset: Dataset,
    e,
    agents: Iterable[str] | None = None,
    oracle: FeasibilityOracle | None = None,
) -> Partition:
    e = as_precision(e)
    remaining = sorted(set(dataset.agents if agents is None else agents))
    if not remaining:
        raise ValueError("agent set must be non-empty")
    if oracle is None:
        oracle = FeasibilityOracle(dataset, e)
    blocks: list[tuple[str, ...]] = []
    inconsistent: tuple[str, ...] = ()
    nodes = 0
    while remaining:
        sol = solve_ls_exact(LsProblem(dataset, e, tuple(remaining)), oracle)
        nodes += sol.diagnostics["nodes"]
        if not inconsistent:
            inconsistent = sol.inconsistent
        if not sol.selected:
            break
        blocks.append(sol.selected)
        chosen = set(sol.selected)
        remaining = [a for a in remaining if a not in chosen and a not in inconsistent]
    blocks.extend((a,) for a in inconsistent)
    return Partition(
        tuple(blocks),
        "greedy",
        "optimal",
        _certify(oracle, blocks),
        inconsistent,
        {"nodes": nodes, "cuts": len(oracle.cuts)},
    )


def _greedy_clique(conflict: list[int]) -> int:
    """Size of a large clique in the conflict graph (lower bound on groups)."""
    n = len(conflict)
    best = 1 if n else 0
    for start in range(n):
        clique = 1 << start
        cand = conflict[start]
        while cand:
            # take the candidate with most conflicts inside the candidate set
            j = max(
                (j for j in range(n) if cand >> j & 1),
                key=lambda j: (bin(conflict[j] & cand).count("1"), -j),
            )
            clique |= 1 << j
            cand &= conflict[j]
        best = max(best, bin(clique).count("1"))
    return best


def partition_minimum(
    dataset: Dataset,
    e,
    agents: Iterable[str] | None = None,
    time_limit: float | None = 1.0,
) -> Partition:
    """Fewest GARP_e-consistent blocks covering ``agents``.

    Group counts are tried upward from a clique lower bound on the pairwise
    conflict graph.  Agents are placed in ascending id order; a new group may
    only be opened by the lowest unplaced agent, which removes relabelings.
    Placements are screened by pairwise conflicts and by the cut pool, then
    confirmed with a pooled GARP test whose failures add new cuts.  If the
    time limit expires the greedy partition is returned instead.
    """
    if time_limit is not None and time_limit <= 0:
        raise ValueError("time_limit must be positive")
    e = as_precision(e)
    start = time.monotonic()
    deadline = None if time_limit is None else start + time_limit
    oracle = FeasibilityOracle(dataset, e)
    pool = sorted(set(dataset.agents if agents is None else agents))
    if not pool:
        raise ValueError("agent set must be non-empty")

    greedy = partition_greedy(dataset, e, pool, oracle)
    inconsistent = greedy.inconsistent
    order = [a for a in pool if a not in inconsistent]
    n = len(order)
    conflict = oracle.conflict_bits(order)
    upper = len(greedy.blocks) - len(inconsistent)
    lower = _greedy_clique(conflict)
    nodes = 0

    def place(i: int, groups: list[list[int]], k: int) -> list[list[int]] | None:
        nonlocal nodes
        nodes += 1
        if deadline is not None and nodes % 64 == 1 and time.monotonic() > deadline:
            raise TimeLimitReached
        if i == n:
            return groups
        name = order[i]
        for g in groups:
            if any(conflict[i] >> m & 1 for m in g):
                continue
            if not oracle.can_join([order[m] for m in g], name):
                continue
            g.append(i)
            found = place(i + 1, groups, k)
            if found is not None:
                return found
            g.pop()
        if len(groups) < k:
            groups.append([i])
            found = place(i + 1, groups, k)
            if found is not None:
                return found
            groups.pop()
        return None

    blocks = None
    status = "optimal"
    try:
        for k in range(lower, upper):
            found = place(0, [], k)
            if found is not None:
                blocks = [tuple(order[m] for m in g) for g in found]
                break
    except TimeLimitReached:
        status = "time_limit_fallback"
    if status == "time_limit_fallback":
        return Partition(
            greedy.blocks,
            "minimum",
            status,
            greedy.certificates,
            inconsistent,
            {"nodes": nodes, "cuts": len(oracle.cuts), "lower_bound": lower},
        )
    if blocks is None:
        blocks = list(greedy.blocks[: upper])
    blocks.extend((a,) for a in inconsistent)
    return Partition(
        tuple(blocks),
        "minimum",
        status,
        _certify(oracle, blocks),
        inconsistent,
        {
            "nodes": nodes,
            "cuts": len(oracle.cuts),
            "lower_bound": lower,
            "greedy_blocks": len(greedy.blocks),
            "seconds": time.monotonic() - start,
        },
    )
