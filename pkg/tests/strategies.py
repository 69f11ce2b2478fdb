"""Hypothesis strategies for small consumption panels."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from garpnet.data import Dataset


@st.composite
def panels(draw, max_agents=5, max_obs=3, K=3, min_agents=1):
    """Random panels on a coarse price/quantity grid, so ties and cycles are common."""
    n_agents = draw(st.integers(min_agents, max_agents))
    counts = [draw(st.integers(1, max_obs)) for _ in range(n_agents)]
    N = sum(counts)
    grid = st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0])
    P = np.array(draw(st.lists(grid, min_size=N * K, max_size=N * K))).reshape(N, K)
    qgrid = st.sampled_from([0.0, 1.0, 2.0, 3.0])
    Q = np.array(draw(st.lists(qgrid, min_size=N * K, max_size=N * K))).reshape(N, K)
    Q[Q.sum(axis=1) == 0, 0] = 1.0
    owners = [f"a{i}" for i, c in enumerate(counts) for _ in range(c)]
    return Dataset.from_arrays(owners, P, Q)


def random_panel(rng: np.random.Generator, n_agents: int, max_obs: int, K: int = 3) -> Dataset:
    """Seeded counterpart of ``panels`` for fixed-count oracle sweeps."""
    counts = rng.integers(1, max_obs + 1, size=n_agents)
    N = int(counts.sum())
    P = rng.choice([0.5, 1.0, 1.5, 2.0, 3.0], size=(N, K))
    Q = rng.choice([0.0, 1.0, 2.0, 3.0], size=(N, K))
    Q[Q.sum(axis=1) == 0, 0] = 1.0
    owners = [f"a{i}" for i, c in enumerate(counts) for _ in range(c)]
    return Dataset.from_arrays(owners, P, Q)
