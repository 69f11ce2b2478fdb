"""Type-I error of the R-metric permutation test under random labels.

Builds one threshold network from simulated data, then draws uniformly random
binary covariates and records how often the test rejects at level gamma.

    python scripts/null_calibration.py --reps 500 --tau 200
"""

import argparse

import numpy as np
from scipy.stats import binomtest

from garpnet.covtests import permutation_test
from garpnet.datagen import SimConfig, simulate_population
from garpnet.netmetrics import network_stats
from garpnet.simnet import SamplingPlan, compute_similarity, threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--agents", type=int, default=60)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--tau", type=int, default=200)
    ap.add_argument("--gamma", type=float, default=0.05)
    ap.add_argument("--alpha", type=float, default=0.10)
    ap.add_argument("--metric", choices=["R", "D"], default="R")
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    sim = simulate_population(SimConfig(n_agents=args.agents, seed=args.seed))
    H = threshold(compute_similarity(sim.dataset, SamplingPlan(T=50, seed=args.seed), 0.95), args.alpha)
    print(network_stats(H))
    rng = np.random.default_rng(args.seed + 50)
    hits = 0
    for rep in range(args.reps):
        Z = rng.integers(0, 2, len(H.agents))
        r = permutation_test(H, Z, args.metric, tau=args.tau, seed=1000 + rep, gamma=args.gamma)
        hits += r.p_value is not None and r.p_value <= args.gamma
    ci = binomtest(hits, args.reps, args.gamma).proportion_ci()
    print(f"rejections {hits}/{args.reps} = {hits / args.reps:.3f} "
          f"(95% CI {ci.low:.3f}-{ci.high:.3f}, nominal {args.gamma})")


if __name__ == "__main__":
    main()
