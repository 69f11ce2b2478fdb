"""Alignment of observable covariates with a threshold network.

Four metrics, each evaluated on a fixed network with fixed communities:

* ``R``: share of links whose endpoints match on the covariate;
* ``C``: share of same-community node pairs that match;
* ``H``: community-size-weighted entropy of the covariate (natural log);
* ``D``: mean degree of the nodes flagged by a binary covariate.

Matching has two modes.  ``indicator`` (the default for per-category dummies)
counts a pair only when both nodes carry the flag; ``categorical`` counts any
equal pair.  The null distribution shuffles labels over nodes.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .netmetrics import CommunityAssignment, detect_communities
from .simnet import ThresholdNetwork

METRICS = ("R", "C", "H", "D")
MAX_RESAMPLE = 100


class UndefinedMetric(ValueError):
    """The metric has a zero denominator for these labels."""


def _adj(H) -> np.ndarray:
    A = H.adjacency if isinstance(H, ThresholdNetwork) else np.asarray(H)
    A = np.asarray(A, dtype=bool)
    return A & ~np.eye(A.shape[0], dtype=bool)


def _labels(communities) -> np.ndarray:
    if isinstance(communities, CommunityAssignment):
        return communities.labels
    return np.asarray(communities)


def _codes(Z) -> np.ndarray:
    Z = np.asarray(Z)
    if Z.dtype.kind in "iub":
        return Z.astype(np.int64)
    _, codes = np.unique(Z, return_inverse=True)
    return codes.astype(np.int64)


@dataclass
class _Prepared:
    """Network pieces shared by every shuffle of one covariate test."""

    edges: np.ndarray  # (m, 2) node pairs
    comm_pairs: np.ndarray  # (p, 2) same-community node pairs
    comm_nodes: np.ndarray
    comm_of: np.ndarray  # community per entry of comm_nodes
    degree: np.ndarray
    mode: str

    @classmethod
    def build(cls, H, communities, mode: str, keep: np.ndarray | None = None) -> _Prepared:
        if mode not in ("indicator", "categorical"):
            raise ValueError(f"unknown match mode {mode!r}")
        A = _adj(H)
        n = A.shape[0]
        keep = np.ones(n, dtype=bool) if keep is None else keep
        iu, ju = np.nonzero(np.triu(A, 1))
        sel = keep[iu] & keep[ju]
        edges = np.column_stack([iu[sel], ju[sel]])
        if communities is None:
            comm = np.full(n, -1)
        else:
            comm = _labels(communities)
        in_comm = (comm >= 0) & keep
        nodes = np.flatnonzero(in_comm)
        pi, pj = np.triu_indices(len(nodes), k=1)
        same = comm[nodes[pi]] == comm[nodes[pj]]
        pairs = np.column_stack([nodes[pi[same]], nodes[pj[same]]])
        return cls(edges, pairs, nodes, comm[nodes], A.sum(axis=1), mode)

    def _match(self, Z: np.ndarray, pairs: np.ndarray) -> np.ndarray:
        a, b = Z[..., pairs[:, 0]], Z[..., pairs[:, 1]]
        if self.mode == "indicator":
            return (a == 1) & (b == 1)
        return a == b

    def R(self, Z: np.ndarray) -> np.ndarray:
        if len(self.edges) == 0:
            raise UndefinedMetric("network has no links")
        return self._match(Z, self.edges).mean(axis=-1)

    def C(self, Z: np.ndarray) -> np.ndarray:
        if len(self.comm_pairs) == 0:
            raise UndefinedMetric("no same-community node pairs")
        out = self._match(Z, self.comm_pairs).mean(axis=-1).astype(float)
        if self.mode == "indicator":
            # a flag carried only outside communities leaves C undefined
            flagged = (Z[..., self.comm_nodes] == 1).any(axis=-1)
            out = np.where(flagged, out, np.nan)
        return out

    def H(self, Z: np.ndarray) -> np.ndarray:
        if len(self.comm_nodes) == 0:
            raise UndefinedMetric("no community members")
        Zc = Z[..., self.comm_nodes]
        total = len(self.comm_nodes)
        out = np.zeros(Zc.shape[:-1])
        for c in np.unique(self.comm_of):
            members = Zc[..., self.comm_of == c]
            size = members.shape[-1]
            h = np.zeros(Zc.shape[:-1])
            for v in np.unique(Zc):
                share = (members == v).sum(axis=-1) / size
                h -= np.where(share > 0, share * np.log(np.where(share > 0, share, 1.0)), 0.0)
            out += size / total * h
        return out

    def D(self, Z: np.ndarray) -> np.ndarray:
        flag = (Z == 1).astype(float)
        n1 = flag.sum(axis=-1)
        reach = (flag * (self.degree > 0)).sum(axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = (flag @ self.degree.astype(float)) / n1
        return np.where(reach > 0, out, np.nan)

    def evaluate(self, metric: str, Z: np.ndarray) -> np.ndarray:
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}")
        return np.asarray(getattr(self, metric)(Z), dtype=float)


def _single(prep: _Prepared, metric: str, Z) -> float | None:
    try:
        v = float(prep.evaluate(metric, _codes(Z)))
    except UndefinedMetric:
        return None
    return None if math.isnan(v) else v


def metric_pairwise_R(H, Z, mode: str = "categorical") -> float:
    v = _single(_Prepared.build(H, None, mode), "R", Z)
    if v is None:
        raise UndefinedMetric("network has no links")
    return v


def metric_community_C(H, Z, communities, mode: str = "categorical") -> float | None:
    return _single(_Prepared.build(H, communities, mode), "C", Z)


def metric_entropy_H(H, Z, communities) -> float:
    v = _single(_Prepared.build(H, communities, "categorical"), "H", Z)
    if v is None:
        raise UndefinedMetric("no community members")
    return v


def metric_degree_D(H, Z) -> float | None:
    return _single(_Prepared.build(H, None, "indicator"), "D", Z)


def stars(p: float) -> str:
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


@dataclass(frozen=True)
class MetricResult:
    covariate: str
    metric: str
    alpha: float | None
    observed: float | None
    null_mean: float | None
    null_sd: float | None
    beta: float | None
    p_value: float | None
    tau: int
    seed: int
    category: str = ""
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def stars(self) -> str:
        return "" if self.p_value is None else stars(self.p_value)

    def row(self) -> list[str]:
        def fmt(v):
            return "-" if v is None else f"{v:.6g}"

        return [
            self.covariate,
            self.category,
            self.metric,
            "-" if self.alpha is None else f"{self.alpha:g}",
            fmt(self.observed),
            fmt(self.null_mean),
            fmt(self.null_sd),
            fmt(self.beta),
            fmt(self.p_value),
            self.stars if self.p_value is not None else "-",
        ]


def shuffle_permutation(seed: int, t: int, n: int, attempt: int = 0) -> np.ndarray:
    """Permutation for shuffle ``t``; counter-based so shuffles are independent of order."""
    key = [seed, t] if attempt == 0 else [seed, t, attempt]
    return np.random.default_rng(np.random.SeedSequence(key)).permutation(n)


def permutation_test(
    H,
    Z,
    metric: str,
    tau: int = 1000,
    seed: int = 0,
    gamma: float = 0.05,
    tail: str = "upper",
    communities=None,
    mode: str = "indicator",
    covariate: str = "",
    category: str = "",
    keep: np.ndarray | None = None,
) -> MetricResult:
    """Label-shuffle test of one metric; upper-tail p by default.

    ``p = #{t : M_t >= M_obs} / tau``.  Shuffles under which the metric is
    undefined are redrawn from a fresh substream.  ``beta`` standardizes the
    observed value by the null mean and sample standard deviation.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if tail not in ("upper", "two-sided"):
        raise ValueError(f"unknown tail {tail!r}")
    A = _adj(H)
    n = A.shape[0]
    keep = np.ones(n, dtype=bool) if keep is None else np.asarray(keep, dtype=bool)
    if metric in ("C", "H") and communities is None:
        communities = detect_communities(A, seed)
    prep = _Prepared.build(A, communities, mode, keep)
    Z = np.asarray(Z)
    if Z.shape[0] != n:
        raise ValueError(f"need one label per node ({n}), got {Z.shape[0]}")
    codes = np.zeros(n, dtype=np.int64)
    codes[keep] = _codes(Z[keep])
    alpha = getattr(H, "alpha", None)
    kept = np.flatnonzero(keep)

    def result(observed, mean=None, sd=None, beta=None, p=None, diag=None):
        return MetricResult(
            covariate, metric, alpha, observed, mean, sd, beta, p, tau, seed, category, diag or {}
        )

    try:
        observed = float(prep.evaluate(metric, codes))
    except UndefinedMetric:
        return result(None)
    if math.isnan(observed):
        return result(None)

    null = np.empty(tau)
    resampled = 0
    perms = np.stack([shuffle_permutation(seed, t, len(kept)) for t in range(1, tau + 1)])
    shuffled = np.tile(codes, (tau, 1))
    shuffled[:, kept] = codes[kept][perms]
    null[:] = prep.evaluate(metric, shuffled)
    for t in np.flatnonzero(np.isnan(null)):
        for attempt in range(1, MAX_RESAMPLE + 1):
            row = codes.copy()
            row[kept] = codes[kept][shuffle_permutation(seed, int(t) + 1, len(kept), attempt)]
            resampled += 1
            v = float(prep.evaluate(metric, row))
            if not math.isnan(v):
                null[t] = v
                break
    valid = ~np.isnan(null)
    if not valid.all():
        return result(observed, diag={"resampled": resampled, "unresolved": int((~valid).sum())})

    mean = float(null.mean())
    sd = float(null.std(ddof=1)) if tau > 1 else 0.0
    eps = 1e-12 * max(1.0, abs(observed))
    if tail == "upper":
        p = float(np.count_nonzero(null >= observed - eps)) / tau
    else:
        p = float(np.count_nonzero(np.abs(null - mean) >= abs(observed - mean) - eps)) / tau
    beta = (observed - mean) / sd if sd > 1e-12 * max(1.0, abs(mean)) else None
    return result(observed, mean, sd, beta, p, {"resampled": resampled, "rejected": p <= gamma})


@dataclass(frozen=True)
class CovariateTable:
    """Categorical covariates per agent: ``{name: {agent_id: value}}``."""

    values: Mapping[str, Mapping[str, str]]

    @property
    def names(self) -> list[str]:
        return list(self.values)

    def categories(self, name: str) -> list[str]:
        return sorted(set(self.values[name].values()))

    def indicator(self, name: str, category: str, agents) -> tuple[np.ndarray, np.ndarray]:
        """0/1 dummy for ``name == category`` and the mask of agents with a value."""
        col = self.values[name]
        keep = np.array([a in col for a in agents])
        z = np.array([int(col.get(a) == category) for a in agents])
        return z, keep

    def column(self, name: str, agents) -> tuple[np.ndarray, np.ndarray]:
        col = self.values[name]
        keep = np.array([a in col for a in agents])
        return np.array([col.get(a, "") for a in agents]), keep


EFFECT_HEADER = [
    "covariate", "category", "metric", "alpha", "observed",
    "null_mean", "null_sd", "beta", "p", "stars",
]


def effect_size_table(
    H: ThresholdNetwork,
    table: CovariateTable,
    tau: int = 1000,
    seed: int = 0,
    gamma: float = 0.05,
    mode: str = "indicator",
    metrics=METRICS,
    community_seed: int | None = None,
    tail: str = "upper",
) -> list[MetricResult]:
    """Every (covariate category, metric) test on one network.

    Communities are detected once per network and held fixed for all shuffles.
    """
    agents = list(H.agents)
    comm = None
    if H.n_edges > 0:
        comm = detect_communities(H, seed if community_seed is None else community_seed)

    def run(name, cat, metric, z, keep, match):
        if comm is None and metric in ("C", "H"):
            return MetricResult(name, metric, H.alpha, None, None, None, None, None, tau, seed, cat)
        return permutation_test(
            H, z, metric, tau=tau, seed=seed, gamma=gamma, tail=tail, communities=comm,
            mode=match, covariate=name, category=cat, keep=keep,
        )

    out = []
    for name in table.names:
        if mode == "categorical":
            zc, keep = table.column(name, agents)
            out.extend(run(name, "", m, zc, keep, "categorical") for m in metrics if m != "D")
        for cat in table.categories(name):
            z, keep = table.indicator(name, cat, agents)
            for m in metrics:
                if mode == "indicator" or m == "D":
                    out.append(run(name, cat, m, z, keep, "indicator"))
    return out


def write_effect_table(results, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EFFECT_HEADER)
        for r in results:
            w.writerow(r.row())
