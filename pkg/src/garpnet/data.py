"""Consumer panel data: observations, datasets, precision levels and CSV ingestion."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class InputError(ValueError):
    """Raised for malformed or inconsistent input data."""


@dataclass(frozen=True)
class Observation:
    agent_id: str
    obs_id: str
    prices: tuple[float, ...]
    quantities: tuple[float, ...]

    def __post_init__(self):
        if len(self.prices) != len(self.quantities):
            raise InputError(
                f"observation ({self.agent_id}, {self.obs_id}): "
                f"{len(self.prices)} prices vs {len(self.quantities)} quantities"
            )
        if any(not np.isfinite(p) or p <= 0 for p in self.prices):
            raise InputError(f"observation ({self.agent_id}, {self.obs_id}): prices must be > 0")
        if any(not np.isfinite(q) or q < 0 for q in self.quantities):
            raise InputError(f"observation ({self.agent_id}, {self.obs_id}): quantities must be >= 0")
        if float(np.dot(self.prices, self.quantities)) <= 0:
            raise InputError(f"observation ({self.agent_id}, {self.obs_id}): zero expenditure")

    @property
    def key(self) -> tuple[str, str]:
        return (self.agent_id, self.obs_id)


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of observations over ``K`` goods.

    Prices and quantities are also exposed as read-only ``(N, K)`` arrays in
    observation order; ``agent_of`` gives the owning agent per row.
    """

    observations: tuple[Observation, ...]
    K: int = field(init=False)
    prices: np.ndarray = field(init=False, repr=False, compare=False)
    quantities: np.ndarray = field(init=False, repr=False, compare=False)
    agent_of: tuple[str, ...] = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)
    _agent_rows: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        obs = tuple(self.observations)
        if not obs:
            raise InputError("dataset has no observations")
        K = len(obs[0].prices)
        index: dict[tuple[str, str], int] = {}
        agent_rows: dict[str, list[int]] = {}
        for row, o in enumerate(obs):
            if len(o.prices) != K:
                raise InputError(f"observation {o.key} has {len(o.prices)} goods, expected {K}")
            if o.key in index:
                raise InputError(f"duplicate observation {o.key}")
            index[o.key] = row
            agent_rows.setdefault(o.agent_id, []).append(row)
        P = np.array([o.prices for o in obs], dtype=float)
        Q = np.array([o.quantities for o in obs], dtype=float)
        P.setflags(write=False)
        Q.setflags(write=False)
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "prices", P)
        object.__setattr__(self, "quantities", Q)
        object.__setattr__(self, "agent_of", tuple(o.agent_id for o in obs))
        object.__setattr__(self, "_index", index)
        object.__setattr__(
            self, "_agent_rows", {a: tuple(rows) for a, rows in agent_rows.items()}
        )

    @classmethod
    def from_arrays(cls, agent_ids, prices, quantities, obs_ids=None) -> Dataset:
        P = np.asarray(prices, dtype=float)
        Q = np.asarray(quantities, dtype=float)
        if P.shape != Q.shape or P.ndim != 2:
            raise InputError(f"prices {P.shape} and quantities {Q.shape} must be equal 2-d shapes")
        agent_ids = [str(a) for a in agent_ids]
        if len(agent_ids) != P.shape[0]:
            raise InputError("one agent id per row required")
        if obs_ids is None:
            counter: dict[str, int] = {}
            obs_ids = []
            for a in agent_ids:
                counter[a] = counter.get(a, 0) + 1
                obs_ids.append(str(counter[a]))
        return cls(
            tuple(
                Observation(a, str(o), tuple(map(float, p)), tuple(map(float, q)))
                for a, o, p, q in zip(agent_ids, obs_ids, P, Q)
            )
        )

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def agents(self) -> list[str]:
        """Agent ids in ascending order."""
        return sorted(self._agent_rows)

    def rows_of(self, agent_id: str) -> tuple[int, ...]:
        try:
            return self._agent_rows[agent_id]
        except KeyError:
            raise InputError(f"unknown agent {agent_id!r}") from None

    def observations_of(self, agent_id: str) -> list[Observation]:
        return [self.observations[r] for r in self.rows_of(agent_id)]

    def row(self, agent_id: str, obs_id: str) -> int:
        try:
            return self._index[(agent_id, obs_id)]
        except KeyError:
            raise InputError(f"unknown observation ({agent_id!r}, {obs_id!r})") from None

    def rows_for_agents(self, agents: Iterable[str]) -> list[int]:
        rows: list[int] = []
        for a in agents:
            rows.extend(self.rows_of(a))
        return sorted(rows)

    def restrict(self, agents: Iterable[str]) -> Dataset:
        """Sub-dataset holding all observations of ``agents``."""
        return Dataset(tuple(self.observations[r] for r in self.rows_for_agents(agents)))

    @property
    def expenditures(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.prices, self.quantities)

    @property
    def tolerance(self) -> float:
        """Absolute comparison tolerance: 1e-9 times the largest expenditure."""
        return 1e-9 * float(self.expenditures.max())


@dataclass(frozen=True)
class PrecisionAssignment:
    """Per-observation efficiency levels ``e`` in [0, 1].

    Keys are ``(agent_id, obs_id)`` pairs; ``default`` covers any observation
    without an explicit entry (``None`` means every observation must be listed).
    """

    values: Mapping[tuple[str, str], float] = field(default_factory=dict)
    default: float | None = None

    def __post_init__(self):
        vals = dict(self.values)
        for k, v in vals.items():
            if not 0.0 <= v <= 1.0:
                raise InputError(f"precision for {k} must lie in [0, 1], got {v}")
        if self.default is not None and not 0.0 <= self.default <= 1.0:
            raise InputError(f"precision must lie in [0, 1], got {self.default}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def uniform(cls, e: float) -> PrecisionAssignment:
        return cls({}, float(e))

    def for_dataset(self, dataset: Dataset) -> np.ndarray:
        """Precision levels aligned with ``dataset`` rows."""
        out = np.empty(len(dataset))
        for r, o in enumerate(dataset.observations):
            v = self.values.get(o.key, self.default)
            if v is None:
                raise InputError(f"no precision level for observation {o.key}")
            out[r] = v
        return out


def as_precision(e) -> PrecisionAssignment:
    if isinstance(e, PrecisionAssignment):
        return e
    return PrecisionAssignment.uniform(float(e))


OBS_HEADER = ("agent_id", "obs_id", "good_id", "price", "quantity")


def read_observations_csv(path: str | Path) -> Dataset:
    """Read the long-format panel (one row per observation and good)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InputError(f"{path}: empty file")
        missing = set(OBS_HEADER) - set(reader.fieldnames)
        if missing:
            raise InputError(f"{path}: missing columns {sorted(missing)}")
        cells: dict[tuple[str, str], dict[str, tuple[float, float]]] = {}
        goods: list[str] = []
        seen_goods: set[str] = set()
        for lineno, rec in enumerate(reader, start=2):
            try:
                price = float(rec["price"])
                qty = float(rec["quantity"])
            except (TypeError, ValueError):
                raise InputError(f"{path}:{lineno}: non-numeric price/quantity") from None
            key = (rec["agent_id"], rec["obs_id"])
            g = rec["good_id"]
            if g not in seen_goods:
                seen_goods.add(g)
                goods.append(g)
            bucket = cells.setdefault(key, {})
            if g in bucket:
                raise InputError(f"{path}:{lineno}: duplicate good {g!r} for observation {key}")
            bucket[g] = (price, qty)
    if not cells:
        raise InputError(f"{path}: no observations")
    observations = []
    for key, bucket in cells.items():
        absent = [g for g in goods if g not in bucket]
        if absent:
            raise InputError(f"{path}: observation {key} lacks goods {absent}")
        observations.append(
            Observation(
                key[0],
                key[1],
                tuple(bucket[g][0] for g in goods),
                tuple(bucket[g][1] for g in goods),
            )
        )
    return Dataset(tuple(observations))


def write_observations_csv(dataset: Dataset, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(OBS_HEADER)
        for o in dataset.observations:
            for g, (p, q) in enumerate(zip(o.prices, o.quantities)):
                w.writerow([o.agent_id, o.obs_id, f"g{g}", repr(p), repr(q)])


def read_covariates_csv(path: str | Path) -> dict[str, dict[str, str]]:
    """Covariate table as ``{name: {agent_id: value}}``; blank cells are missing."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "agent_id" not in reader.fieldnames:
            raise InputError(f"{path}: covariate file needs an agent_id column")
        names = [c for c in reader.fieldnames if c != "agent_id"]
        table: dict[str, dict[str, str]] = {n: {} for n in names}
        for rec in reader:
            for n in names:
                v = (rec[n] or "").strip()
                if v:
                    table[n][rec["agent_id"]] = v
    return table


def write_covariates_csv(table: Mapping[str, Mapping[str, str]], agents, path) -> None:
    names = list(table)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["agent_id", *names])
        for a in agents:
            w.writerow([a, *(table[n].get(a, "") for n in names)])
