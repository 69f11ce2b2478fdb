"""Small hand-built datasets with known revealed-preference structure.

Each observation buys one unit of its own good; at its own prices that good
costs 1 and every other good costs either 0.5 (affordable, so the pair
violates WARP when the relation is mutual) or 2 (unaffordable, no relation).
Only the listed pairs are related, so every larger pool is consistent exactly
when it contains no listed pair.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .data import Dataset


def unit_bundle_dataset(
    owners: list[str],
    mutual: Iterable[tuple[int, int]] = (),
    directed: dict[tuple[int, int], float] | None = None,
    obs_ids: list[str] | None = None,
) -> Dataset:
    """Observation ``n`` buys good ``n``; ``p^n_k`` encodes the relation ``n -> k``.

    ``mutual`` pairs get price 0.5 both ways; ``directed`` sets individual
    off-diagonal prices (0.5 strict, 1.0 weak only, 2.0 none).
    """
    n = len(owners)
    P = np.full((n, n), 2.0)
    np.fill_diagonal(P, 1.0)
    for a, b in mutual:
        P[a, b] = P[b, a] = 0.5
    for (a, b), v in (directed or {}).items():
        P[a, b] = v
    return Dataset.from_arrays(owners, P, np.eye(n), obs_ids)


def three_agent_dataset() -> Dataset:
    """Three agents, two decisions each: A chooses x then y; B chooses z twice; C w twice.

    The WARP-violating pairs are (x, z), (y, w) and (z, w).
    """
    x, y, z, w = range(4)
    base = unit_bundle_dataset(["A", "A", "B", "C"], mutual=[(x, z), (y, w), (z, w)])
    P, Q = base.prices, base.quantities
    rows = [x, y, z, z, w, w]
    return Dataset.from_arrays(
        ["A", "A", "B", "B", "C", "C"],
        P[rows],
        Q[rows],
        ["x", "y", "z1", "z2", "w1", "w2"],
    )


def six_agent_dataset() -> Dataset:
    """Six single-observation agents whose maximal consistent sets are
    {1, 2, 5, 6}, {1, 2, 3} and {4, 5, 6}."""
    conflicts = [(1, 4), (2, 4), (3, 4), (3, 5), (3, 6)]
    return unit_bundle_dataset(
        [str(i) for i in range(1, 7)], mutual=[(a - 1, b - 1) for a, b in conflicts]
    )


def money_pump_dataset() -> Dataset:
    """Three observations forming the cycle 1 -> 2 -> 3 -> 1; only 3 -> 1 is strict."""
    return unit_bundle_dataset(
        ["a", "b", "c"], directed={(0, 1): 1.0, (1, 2): 1.0, (2, 0): 0.5}
    )
