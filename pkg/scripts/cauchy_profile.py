#!/usr/bin/env python3
"""Seed-averaged Cauchy gap sup_{m in [M, 2M]} |A_m - A_M| of the discrete averages.

Prints one row per (system, functional, M).  The gap is a Monte Carlo
quantity: rows for adjacent M are often within noise of each other.
"""
import argparse

from cpshift.chain import ChainSystem, make_rng, sample_state
from cpshift.ergodic import discrete_series, functional
from cpshift.extension import theta
from cpshift.translation import RetryPolicy, ensure_window

CASES = [
    ("cantor", ChainSystem.cantor(), "occupied:2"),
    ("cantor", ChainSystem.cantor(), "pattern:2,6"),
    ("bernoulli", ChainSystem.bernoulli(2, ["2/3", "1/3"]), "unit_mass:1"),
]


def mean_gaps(system, name, starts, trajectories, seed):
    f = functional(name)
    top = 2 * max(starts)
    marks = range(min(starts), top + 1)
    gaps = {m: 0.0 for m in starts}
    for t in range(trajectories):
        rng = make_rng(seed, t)
        e = theta(sample_state(system, 6, rng), resolution=f.min_resolution)
        e = ensure_window(e, min(0, f.lo), top + 1 + f.hi, rng, RetryPolicy(8, 16))
        series = discrete_series(f, e, marks)
        for m in starts:
            gaps[m] += series.cauchy_sup(m) / trajectories
    return gaps


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trajectories", type=int, default=64)
    parser.add_argument("--seeds", type=int, nargs="+", default=[100, 200, 300, 400])
    parser.add_argument("--starts", type=int, nargs="+", default=[250, 500, 1000])
    args = parser.parse_args()
    print("system,functional,seed," + ",".join(f"D({m})" for m in args.starts))
    for label, system, name in CASES:
        for seed in args.seeds:
            gaps = mean_gaps(system, name, args.starts, args.trajectories, seed)
            print(f"{label},{name},{seed}," + ",".join(f"{gaps[m]:.4f}" for m in args.starts), flush=True)
