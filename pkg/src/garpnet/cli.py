"""Command-line front end: ``garpnet <subcommand> [options]``.

Settings come from defaults, then an optional JSON config file, then flags.
Every randomized stage draws from a named substream of one root seed, and
each command leaves a ``<command>.manifest.json`` sidecar recording the
resolved config, its hash, the seed and the sha256 of every file written.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .covtests import CovariateTable, effect_size_table, write_effect_table
from .data import InputError, read_covariates_csv, read_observations_csv, write_covariates_csv, write_observations_csv
from .datagen import SimConfig, simulate_population
from .ls import LsProblem, solve_ls_exact
from .milp import export_milp
from .netmetrics import detect_communities, network_stats, write_communities_csv, stats_record
from .partition import partition_greedy, partition_minimum
from .relations import garp_check
from .simnet import (
    SamplingPlan,
    compute_similarity,
    read_similarity_csv,
    threshold,
    write_edges_csv,
    write_histogram_csv,
    write_similarity_csv,
)

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 1, 2
SUBSTREAMS = ("sampling", "permutation", "community", "simulate")


@dataclass
class RunConfig:
    observations: str | None = None
    covariates: str | None = None
    similarity: str | None = None
    out: str = "out"
    e: float = 0.95
    T: int = 50
    s: int = 1
    sampling: str = "random"
    alphas: list[float] = field(default_factory=lambda: [0.05, 0.10, 0.15, 0.20])
    tau: int = 1000
    gamma: float = 0.05
    seed: int = 0
    method: str = "greedy"
    time_limit: float | None = 1.0
    drop_on_timeout: bool = True
    match_mode: str = "indicator"
    tail: str = "upper"
    bins: int = 20
    workers: int = 0  # 0 = available parallelism
    simulate: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not 0 <= self.e <= 1:
            raise ValueError("e must lie in [0, 1]")
        if self.T < 1 or self.s < 1 or self.tau < 1 or self.bins < 1:
            raise ValueError("T, s, tau and bins must be >= 1")
        if not self.alphas or any(not 0 < a < 1 for a in self.alphas):
            raise ValueError("alphas must be a non-empty list in (0, 1)")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.method not in ("greedy", "minimum"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.sampling not in ("random", "exhaustive"):
            raise ValueError(f"unknown sampling mode {self.sampling!r}")
        if self.match_mode not in ("indicator", "categorical"):
            raise ValueError(f"unknown match mode {self.match_mode!r}")
        if self.tail not in ("upper", "two-sided"):
            raise ValueError(f"unknown tail {self.tail!r}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive (or null for none)")
        if self.workers < 0:
            raise ValueError("workers must be >= 0")
        SimConfig(**self.simulate)  # raises on unknown keys or bad values

    @property
    def n_workers(self) -> int:
        return self.workers or os.cpu_count() or 1

    def substream(self, name: str) -> int:
        """Seed of the named stage, derived from the root seed."""
        if name not in SUBSTREAMS:
            raise KeyError(name)
        ss = np.random.SeedSequence([self.seed, SUBSTREAMS.index(name)])
        return int(ss.generate_state(1, dtype=np.uint32)[0])

    def canonical(self) -> dict:
        # paths and pool size do not affect results, so they stay out of the hash
        d = dataclasses.asdict(self)
        for k in ("out", "workers"):
            d.pop(k)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Defaults < JSON file < flag overrides (``None`` overrides are ignored)."""
    values: dict = {}
    if path:
        try:
            values.update(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise InputError(f"unknown config keys {unknown}")
    try:
        cfg = RunConfig(**values)
        cfg.validate()
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    return cfg


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(cfg: RunConfig, command: str, outdir: Path, files: list[str]) -> Path:
    manifest = {
        "command": command,
        "config": cfg.canonical(),
        "config_hash": cfg.digest(),
        "seed": cfg.seed,
        "substreams": {n: cfg.substream(n) for n in SUBSTREAMS},
        "files": {f: _sha256(outdir / f) for f in sorted(files)},
    }
    path = outdir / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _need(value, what: str):
    if not value:
        raise InputError(f"missing {what}")
    return value


def _alpha_tag(alpha: float) -> str:
    return f"a{alpha:.2f}"


def _cycle_json(cycle) -> dict | None:
    if cycle is None:
        return None
    return {
        "observations": [list(o) for o in cycle.observations],
        "strict_edge_index": cycle.strict_edge_index,
    }


# ---------------------------------------------------------------- commands


def cmd_check_garp(cfg: RunConfig, outdir: Path) -> tuple[list[str], int]:
    ds = read_observations_csv(_need(cfg.observations, "--observations"))
    per_agent = {}
    for a in ds.agents:
        r = garp_check(ds, cfg.e, ds.rows_for_agents([a]))
        per_agent[a] = {"satisfied": r.satisfied, "witness": _cycle_json(r.witness)}
    pooled = garp_check(ds, cfg.e)
    report = {
        "e": cfg.e,
        "n_agents": len(ds.agents),
        "n_observations": len(ds),
        "pooled": {"satisfied": pooled.satisfied, "witness": _cycle_json(pooled.witness)},
        "agents": per_agent,
    }
    _write_json(outdir / "garp.json", report)
    return ["garp.json"], EXIT_OK


def cmd_solve_ls(cfg: RunConfig, outdir: Path) -> tuple[list[str], int]:
    ds = read_observations_csv(_need(cfg.observations, "--observations"))
    sol = solve_ls_exact(LsProblem(ds, cfg.e, time_limit=cfg.time_limit))
    diag = {k: v for k, v in sol.diagnostics.items() if k != "seconds"}
    report = {
        "e": cfg.e,
        "status": sol.status,
        "cardinality": sol.cardinality,
        "selected": list(sol.selected),
        "inconsistent": list(sol.inconsistent),
        "certified": sol.certificate.satisfied,
        "diagnostics": diag,
    }
    _write_json(outdir / "ls.json", report)
    return ["ls.json"], EXIT_OK if sol.status == "optimal" else EXIT_RUNTIME


def cmd_partition(cfg: RunConfig, outdir: Path) -> tuple[list[str], int]:
    ds = read_observations_csv(_need(cfg.observations, "--observations"))
    if cfg.method == "greedy":
        part = partition_greedy(ds, cfg.e)
    else:
        part = partition_minimum(ds, cfg.e, time_limit=cfg.time_limit)
    report = part.to_json()
    report["certificates"] = list(part.certificates)
    _write_json(outdir / "partition.json", report)
    return ["partition.json"], EXIT_OK


def cmd_export_milp(cfg: RunConfig, outdir: Path) -> tuple[list[str], int]:
    ds = read_observations_csv(_need(cfg.observations, "--observations"))
    (outdir / "model.lp").write_text(export_milp(LsProblem(ds, cfg.e)))
    return ["model.lp"], EXIT_OK


def cmd_simulate(cfg: RunConfig, outdir: Path) -> tuple[list[str], int]:
    sim = simulate_population(SimConfig(**{"seed": cfg.substream("simulate"), **cfg.simulate}))
    write_observations_csv(sim.dataset, outdir / "observations.csv")
    write_covariates_csv(sim.covariates, sim.dataset.agents, outdir / "covariates.csv")
    return ["observations.csv", "covariates.csv"], EXIT_OK


def _similarity(cfg: RunConfig):
    ds = read_observations_csv(_need(cfg.observations, "--observations"))
    plan = SamplingPlan(s=cfg.s, T=cfg.T, seed=cfg.substream("sampling"), mode=cfg.sampling)
    sim = compute_similarity(
        ds,
        plan,
        cfg.e,
        method=cfg.method,
        time_limit=cfg.time_limit,
        drop_on_timeout=cfg.drop_on_timeout,
        workers=cfg.n_workers,
    )
    return ds, sim


def _network_outputs(cfg: RunConfig, sim, outdir: Path) -> list[str]:
    files = []
    for alpha in cfg.alphas:
        H = threshold(sim, alpha)
        tag = _alpha_tag(alpha)
        write_edges_csv(H, outdir / f"edges_{tag}.csv")
        _write_json(outdir / f"stats_{tag}.json", stats_record(network_stats(H), alpha))
        files += [f"edges_{tag}.csv", f"stats_{tag}.json"]
        if H.n_edges:
            comm = detect_communities(H, cfg.substream("community"))
            write_communities_csv(H, comm, outdir / f"communities_{tag}.csv")
            files.append(f"communities_{tag}.csv")
    return files


def cmd_similarity(cfg: RunConfig, outdir: Path) -> tuple[list[str], int]:
    _, sim = _similarity(cfg)
    write_similarity_csv(sim, outdir / "G.csv")
    write_histogram_csv(sim, outdir / "histogram.csv", cfg.bins)
    _write_json(
        outdir / "similarity.json",
        {"T": cfg.T, "T_effective": sim.T_effective, "dropped": list(sim.dropped)},
    )
    files = ["G.csv", "histogram.csv", "similarity.json"]
    return files + _network_outputs(cfg, sim, outdir), EXIT_OK


def _load_similarity(cfg: RunConfig):
    if cfg.similarity:
        return read_similarity_csv(cfg.similarity)
    return _similarity(cfg)[1]


def cmd_network_stats(cfg: RunConfig, outdir: Path) -> tuple[list[str], int]:
    if not (cfg.similarity or cfg.observations):
        raise InputError("need --similarity or --observations")
    return _network_outputs(cfg, _load_similarity(cfg), outdir), EXIT_OK


def cmd_test_covariates(cfg: RunConfig, outdir: Path) -> tuple[list[str], int]:
    if not (cfg.similarity or cfg.observations):
        raise InputError("need --similarity or --observations")
    table = CovariateTable(read_covariates_csv(_need(cfg.covariates, "--covariates")))
    sim = _load_similarity(cfg)
    stray = sorted({a for col in table.values.values() for a in col} - set(sim.agents))
    if stray:
        raise InputError(f"covariate file names agents absent from the network: {stray[:5]}")
    rows = []
    for alpha in cfg.alphas:
        rows += effect_size_table(
            threshold(sim, alpha),
            table,
            tau=cfg.tau,
            seed=cfg.substream("permutation"),
            gamma=cfg.gamma,
            mode=cfg.match_mode,
            community_seed=cfg.substream("community"),
            tail=cfg.tail,
        )
    write_effect_table(rows, outdir / "effects.csv")
    return ["effects.csv"], EXIT_OK


COMMANDS = {
    "check-garp": cmd_check_garp,
    "solve-ls": cmd_solve_ls,
    "partition": cmd_partition,
    "similarity": cmd_similarity,
    "network-stats": cmd_network_stats,
    "test-covariates": cmd_test_covariates,
    "export-milp": cmd_export_milp,
    "simulate": cmd_simulate,
}


HELP = {
    "check-garp": "per-agent and pooled GARP_e report (garp.json)",
    "solve-ls": "largest jointly consistent agent subset (ls.json)",
    "partition": "greedy or minimum type partition (partition.json)",
    "similarity": "co-typing matrix G, histogram, H^alpha edges and stats",
    "network-stats": "stats and communities of H^alpha from G",
    "test-covariates": "permutation effect-size table (effects.csv)",
    "export-milp": "LP-format model of the largest-subset MILP (model.lp)",
    "simulate": "synthetic panel with planted types",
}

# ---------------------------------------------------------------- parsing


def _time_limit(text: str) -> float:
    return -1.0 if text.lower() in ("none", "null", "0") else float(text)


def _bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes"):
        return True
    if text.lower() in ("0", "false", "no"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", help="JSON file with RunConfig fields")
    g.add_argument("--observations", help="long-format observation CSV")
    g.add_argument("--covariates", help="covariate CSV (agent_id, <name>...)")
    g.add_argument("--similarity", help="G CSV written by the similarity command")
    g.add_argument("--out", help="output directory")
    g.add_argument("--e", type=float, help="precision level (default 0.95)")
    g.add_argument("--T", type=int, help="synthetic datasets (default 50)")
    g.add_argument("--s", type=int, help="draws per agent (default 1)")
    g.add_argument("--sampling", choices=["random", "exhaustive"])
    g.add_argument("--alphas", type=float, nargs="+", help="link thresholds")
    g.add_argument("--tau", type=int, help="label shuffles (default 1000)")
    g.add_argument("--gamma", type=float, help="significance level (default 0.05)")
    g.add_argument("--seed", type=int, help="root seed")
    g.add_argument("--method", choices=["greedy", "minimum"])
    g.add_argument("--time-limit", dest="time_limit", type=_time_limit,
                   help="seconds per solve; 'none' disables")
    g.add_argument("--drop-on-timeout", dest="drop_on_timeout", type=_bool)
    g.add_argument("--match-mode", dest="match_mode", choices=["indicator", "categorical"])
    g.add_argument("--tail", choices=["upper", "two-sided"])
    g.add_argument("--bins", type=int, help="histogram bins (default 20)")
    g.add_argument("--workers", type=int, help="process pool size (0 = all cores)")
    s = common.add_argument_group("simulate")
    s.add_argument("--n-agents", type=int)
    s.add_argument("--n-types", type=int)
    s.add_argument("--n-obs", type=int)
    s.add_argument("--goods", type=int)
    s.add_argument("--noise", type=float)
    s.add_argument("--concentration", type=float)
    s.add_argument("--demand-pressure", type=float)

    parser = argparse.ArgumentParser(prog="garpnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


SIM_FLAGS = {
    "n_agents": "n_agents", "n_types": "n_types", "n_obs": "n_obs", "goods": "K",
    "noise": "noise", "concentration": "concentration", "demand_pressure": "demand_pressure",
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    ns = vars(args)
    command = ns.pop("command")
    config_path = ns.pop("config")
    sim_flags = {SIM_FLAGS[k]: ns.pop(k) for k in SIM_FLAGS}
    sim_flags = {k: v for k, v in sim_flags.items() if v is not None}
    tl = ns.get("time_limit")
    try:
        if tl is not None and tl < 0:
            ns["time_limit"] = None
            cfg = load_config(config_path, ns)
            cfg.time_limit = None
        else:
            cfg = load_config(config_path, ns)
        if sim_flags:
            cfg.simulate = {**cfg.simulate, **sim_flags}
            cfg.validate()
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        files, code = COMMANDS[command](cfg, outdir)
    except (InputError, ValueError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"garpnet {command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - exit code contract
        print(f"garpnet {command}: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    write_manifest(cfg, command, outdir, files)
    print(f"garpnet {command}: wrote {', '.join(sorted(files))} to {outdir}")
    return code


if __name__ == "__main__":
    sys.exit(main())
