"""Brute-force references used across the test suite."""

from __future__ import annotations

import numpy as np

from garpnet.relations import build_relations


def consistent(ds, e, agents) -> bool:
    """GARP via the transitive closure (independent of the SCC route)."""
    rel = build_relations(ds, e, ds.rows_for_agents(agents))
    return not np.any(rel.closure & rel.strict.T)


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first], *part]
        for i in range(len(part)):
            yield [*part[:i], [first, *part[i]], *part[i + 1:]]


def min_partition_size(ds, e, agents=None) -> int:
    agents = list(ds.agents if agents is None else agents)
    cache: dict[frozenset, bool] = {}

    def ok(block):
        key = frozenset(block)
        if key not in cache:
            cache[key] = consistent(ds, e, block)
        return cache[key]

    # self-inconsistent agents cannot share a block with anyone
    bad = [a for a in agents if not ok([a])]
    good = [a for a in agents if a not in bad]
    best = len(good)
    for part in set_partitions(good):
        if len(part) < best and all(ok(b) for b in part):
            best = len(part)
    return best + len(bad)
