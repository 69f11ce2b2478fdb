"""Resampled co-typing frequencies and their threshold networks."""

from __future__ import annotations

import csv
import hashlib
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset, as_precision
from .partition import Partition, partition_greedy, partition_minimum

EXHAUSTIVE_CAP = 100_000


def agent_key(agent_id: str) -> int:
    """Stable 64-bit integer for an agent id (seed material)."""
    return int.from_bytes(hashlib.sha256(agent_id.encode()).digest()[:8], "little")


@dataclass(frozen=True)
class SamplingPlan:
    """How synthetic datasets are drawn.

    ``s`` is either one draw count for every agent or a per-agent mapping.
    In exhaustive mode ``T`` is ignored and every distinct combination of
    per-agent draws is visited once.
    """

    s: int | dict = 1
    T: int = 50
    seed: int = 0
    mode: str = "random"
    cap: int = EXHAUSTIVE_CAP

    def __post_init__(self):
        if self.mode not in ("random", "exhaustive"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        if self.mode == "random" and self.T < 1:
            raise ValueError("T must be >= 1")

    def draws_for(self, agent: str) -> int:
        s = self.s.get(agent) if isinstance(self.s, dict) else self.s
        if s is None or s < 1:
            raise ValueError(f"draw count for agent {agent!r} must be >= 1")
        return int(s)

    def n_datasets(self, dataset: Dataset) -> int:
        if self.mode == "random":
            return self.T
        return math.prod(len(c) for c in _agent_combinations(dataset, self).values())


def _agent_combinations(dataset: Dataset, plan: SamplingPlan) -> dict[str, list[tuple[int, ...]]]:
    """Distinct per-agent row combinations, in lexicographic row order.

    Combinations selecting identical observation contents are visited once.
    """
    out = {}
    total = 1
    for a in dataset.agents:
        rows = dataset.rows_of(a)
        s = plan.draws_for(a)
        if s > len(rows):
            raise ValueError(f"agent {a!r}: s={s} exceeds its {len(rows)} observations")
        seen = set()
        combos = []
        for combo in itertools.combinations(rows, s):
            content = tuple(
                sorted(
                    (dataset.observations[r].prices, dataset.observations[r].quantities)
                    for r in combo
                )
            )
            if content not in seen:
                seen.add(content)
                combos.append(combo)
        out[a] = combos
        total *= len(combos)
        if total > plan.cap:
            raise ValueError(f"exhaustive sampling exceeds the cap of {plan.cap} datasets")
    return out


def draw_synthetic(dataset: Dataset, plan: SamplingPlan, t: int) -> Dataset:
    """The ``t``-th synthetic dataset (1-based)."""
    if plan.mode == "exhaustive":
        combos = _agent_combinations(dataset, plan)
        n = math.prod(len(c) for c in combos.values())
        if not 1 <= t <= n:
            raise ValueError(f"t must lie in [1, {n}]")
        idx = t - 1
        picks: list[int] = []
        # first agent is the most significant digit
        for a in reversed(dataset.agents):
            c = combos[a]
            idx, r = divmod(idx, len(c))
            picks.extend(c[r])
        return Dataset(tuple(dataset.observations[r] for r in sorted(picks)))

    if not 1 <= t <= plan.T:
        raise ValueError(f"t must lie in [1, {plan.T}]")
    picks = []
    for a in dataset.agents:
        rows = dataset.rows_of(a)
        s = plan.draws_for(a)
        if s > len(rows):
            raise ValueError(f"agent {a!r}: s={s} exceeds its {len(rows)} observations")
        rng = np.random.default_rng(np.random.SeedSequence([plan.seed, t, agent_key(a)]))
        chosen = rng.choice(len(rows), size=s, replace=False)
        picks.extend(rows[i] for i in chosen)
    return Dataset(tuple(dataset.observations[r] for r in sorted(picks)))


@dataclass(frozen=True)
class SimilarityMatrix:
    agents: tuple[str, ...]
    counts: np.ndarray
    T_effective: int
    dropped: tuple[int, ...] = ()
    partitions: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def G(self) -> np.ndarray:
        return self.counts / self.T_effective

    def off_diagonal(self) -> np.ndarray:
        iu = np.triu_indices(len(self.agents), k=1)
        return self.G[iu]


def _partition_one(args) -> tuple[int, Partition]:
    dataset, plan, e, method, time_limit, t = args
    draw = draw_synthetic(dataset, plan, t)
    if method == "greedy":
        return t, partition_greedy(draw, e)
    if method == "minimum":
        return t, partition_minimum(draw, e, time_limit=time_limit)
    raise ValueError(f"unknown partition method {method!r}")


def compute_similarity(
    dataset: Dataset,
    plan: SamplingPlan,
    e=1.0,
    method: str = "greedy",
    time_limit: float | None = 1.0,
    drop_on_timeout: bool = True,
    workers: int = 1,
    keep_partitions: bool = False,
) -> SimilarityMatrix:
    """Share of synthetic datasets in which each agent pair is co-typed.

    ``time_limit`` bounds each minimum-partition solve; a solve that runs out
    is dropped (reducing the denominator) unless ``drop_on_timeout`` is False,
    in which case its greedy fallback is counted.
    """
    e = as_precision(e)
    agents = tuple(dataset.agents)
    pos = {a: i for i, a in enumerate(agents)}
    T = plan.n_datasets(dataset)
    jobs = [(dataset, plan, e, method, time_limit, t) for t in range(1, T + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_partition_one, jobs, chunksize=max(1, T // (4 * workers))))
    else:
        results = [_partition_one(j) for j in jobs]

    counts = np.zeros((len(agents), len(agents)), dtype=np.int64)
    dropped = []
    kept = {}
    for t, part in results:
        if part.status == "time_limit_fallback" and drop_on_timeout:
            dropped.append(t)
            continue
        for block in part.blocks:
            ix = [pos[a] for a in block]
            counts[np.ix_(ix, ix)] += 1
        if keep_partitions:
            kept[t] = part
    T_eff = T - len(dropped)
    if T_eff == 0:
        raise RuntimeError("every synthetic dataset was dropped")
    counts.setflags(write=False)
    return SimilarityMatrix(agents, counts, T_eff, tuple(dropped), kept)


@dataclass(frozen=True)
class ThresholdNetwork:
    agents: tuple[str, ...]
    alpha: float
    adjacency: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    @classmethod
    def from_edges(cls, n: int, edges, alpha: float = 0.0, agents=None) -> ThresholdNetwork:
        A = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i != j:
                A[i, j] = A[j, i] = True
        agents = tuple(agents) if agents is not None else tuple(str(i) for i in range(n))
        return cls(agents, alpha, A)


def threshold(sim: SimilarityMatrix, alpha: float) -> ThresholdNetwork:
    """Link agents co-typed in at least a ``1 - alpha`` share of datasets."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    # integer comparison keeps the boundary inclusive and exact
    need = (1 - alpha) * sim.T_effective
    A = sim.counts >= need - 1e-9 * max(1, sim.T_effective)
    A = A.copy()
    np.fill_diagonal(A, False)
    return ThresholdNetwork(sim.agents, alpha, A)


def write_similarity_csv(sim: SimilarityMatrix, path) -> None:
    G = sim.G
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["agent_id", *sim.agents])
        for a, row in zip(sim.agents, G):
            w.writerow([a, *(repr(float(v)) for v in row)])


def density_histogram(sim: SimilarityMatrix, bins: int = 20) -> list[tuple[float, float, int]]:
    counts, edges = np.histogram(sim.off_diagonal(), bins=bins, range=(0.0, 1.0))
    return [(float(edges[i]), float(edges[i + 1]), int(c)) for i, c in enumerate(counts)]


def write_histogram_csv(sim: SimilarityMatrix, path, bins: int = 20) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count"])
        for lo, hi, c in density_histogram(sim, bins):
            w.writerow([f"{lo:.4f}", f"{hi:.4f}", c])


def write_edges_csv(H: ThresholdNetwork, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j"])
        for i, j in H.edges():
            w.writerow([H.agents[i], H.agents[j]])


def read_similarity_csv(path) -> SimilarityMatrix:
    """Inverse of ``write_similarity_csv`` up to the count denominator (unit T)."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    agents = tuple(rows[0][1:])
    G = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return SimilarityMatrix(agents, G, 1)


def read_edges_csv(path, agents) -> ThresholdNetwork:
    pos = {a: i for i, a in enumerate(agents)}
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return ThresholdNetwork.from_edges(
        len(agents), [(pos[r["i"]], pos[r["j"]]) for r in rows], agents=agents
    )
