"""Simulated panels with planted Cobb-Douglas preference types."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset


@dataclass(frozen=True)
class SimConfig:
    n_agents: int = 40
    n_types: int = 2
    n_obs: int = 20
    K: int = 5
    seed: int = 0
    noise: float = 0.0
    concentration: float = 0.1
    price_loc: float = 0.0
    price_scale: float = 0.5
    income_low: float = 50.0
    income_high: float = 150.0
    demand_pressure: float = 1.5

    def __post_init__(self):
        if self.n_agents < 1 or self.n_obs < 1:
            raise ValueError("n_agents and n_obs must be >= 1")
        if not 1 <= self.n_types <= self.n_agents:
            raise ValueError("need 1 <= n_types <= n_agents")
        if self.K < 2:
            raise ValueError("K must be >= 2")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")
        if self.concentration <= 0 or self.price_scale < 0:
            raise ValueError("concentration must be > 0 and price_scale >= 0")
        if not 0 < self.income_low <= self.income_high:
            raise ValueError("need 0 < income_low <= income_high")


@dataclass(frozen=True)
class SimOutput:
    dataset: Dataset
    types: dict[str, int]
    exponents: np.ndarray  # (n_types, K)
    covariates: dict[str, dict[str, str]]


def agent_name(i: int, n: int) -> str:
    return f"h{i:0{max(3, len(str(n - 1)))}d}"


def simulate_population(config: SimConfig) -> SimOutput:
    """Cobb-Douglas demands ``q_k = a_k m / p_k`` with optional log-normal noise.

    Types are assigned round-robin; each type's exponents come from a
    symmetric Dirichlet.  Every random stream is keyed by (seed, purpose,
    index), so an agent's data do not depend on how many agents follow it.
    """
    c = config

    def stream(*key: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([c.seed, *key]))

    exps = np.array(
        [stream(0, t).dirichlet(np.full(c.K, c.concentration)) for t in range(c.n_types)]
    )
    agents, P_all, Q_all, types = [], [], [], {}
    for i in range(c.n_agents):
        a = agent_name(i, c.n_agents)
        t = i % c.n_types
        types[a] = t
        rng = stream(1, i)
        shift = c.demand_pressure * (exps[t] - exps.mean(axis=0))
        P = np.exp(c.price_loc + shift + c.price_scale * rng.standard_normal((c.n_obs, c.K)))
        m = rng.uniform(c.income_low, c.income_high, size=c.n_obs)
        Q = exps[t][None, :] * m[:, None] / P
        if c.noise > 0:
            Q = Q * np.exp(c.noise * rng.standard_normal(Q.shape))
        agents += [a] * c.n_obs
        P_all.append(P)
        Q_all.append(Q)
    ds = Dataset.from_arrays(agents, np.vstack(P_all), np.vstack(Q_all))

    rng = stream(2)
    names = list(types)
    covariates = {
        "type": {a: f"T{types[a]}" for a in names},
        "decoy_binary": {a: str(v) for a, v in zip(names, rng.integers(0, 2, len(names)))},
        "decoy_level": {
            a: ("Low", "Mid", "High")[v] for a, v in zip(names, rng.integers(0, 3, len(names)))
        },
    }
    return SimOutput(ds, types, exps, covariates)
