#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the pure-numpy paths.

Covers the two hot spots: the robustness SDP solve (per-sample loop with
closed-form 2x2 cone arithmetic vs stacked-array twin) and the Monte Carlo
violation counters (per-sample loop vs vectorized batch).  Run directly:

    python benchmarks/bench_kernels.py [--samples 20000] [--solves 200]

The first numba call compiles (cached on disk), so a warmup round runs
before timing.
"""

import argparse
import time

import numpy as np

from qsteer.backend import NUMBA_ENABLED
from qsteer.criteria import CriterionKind
from qsteer.measurements import assemblage_from_directions
from qsteer.qstate import random_state, werner
from qsteer.robustness import _sigma_array, deterministic_strategies
from qsteer import sdp
from qsteer.volume import estimate_volume


def time_sdp(n_solves: int):
    rng = np.random.default_rng(0)
    Dm = deterministic_strategies(3).d_matrix()
    sigmas = [
        _sigma_array(assemblage_from_directions(random_state(rng), np.eye(3)))
        for _ in range(n_solves)
    ]
    results = {}
    for label, use_numba in (("numba", True), ("numpy", False)):
        if use_numba and not NUMBA_ENABLED:
            results[label] = None
            continue
        sdp.solve_robustness(sigmas[0], Dm, use_numba=use_numba)  # warmup/compile
        t0 = time.perf_counter()
        for sigma in sigmas:
            sdp.solve_robustness(sigma, Dm, use_numba=use_numba)
        results[label] = (time.perf_counter() - t0) / n_solves
    return results


def time_volume(n_samples: int):
    rho = werner(0.8)
    rows = {}
    for kind in CriterionKind:
        rows[kind.value] = {}
        for label, use_numba in (("numba", True), ("numpy", False)):
            if use_numba and not NUMBA_ENABLED:
                rows[kind.value][label] = None
                continue
            estimate_volume(rho, kind, 3, 1000, 0, use_numba=use_numba)  # warmup
            t0 = time.perf_counter()
            estimate_volume(rho, kind, 3, n_samples, 1, use_numba=use_numba)
            rows[kind.value][label] = time.perf_counter() - t0
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=20_000)
    parser.add_argument("--solves", type=int, default=200)
    args = parser.parse_args()

    if not NUMBA_ENABLED:
        print("numba backend unavailable (not installed or QSTEER_NUMBA=0);")
        print("only the numpy path will be timed.\n")

    def fmt(seconds):
        return "    n/a" if seconds is None else f"{seconds * 1e3:7.2f}"

    print(f"robustness SDP solve, {args.solves} random states (ms per solve)")
    res = time_sdp(args.solves)
    print(f"  numba: {fmt(res['numba'])}   numpy: {fmt(res['numpy'])}")
    if res["numba"]:
        print(f"  speedup: {res['numpy'] / res['numba']:.1f}x")

    print(f"\nvolume kernels, {args.samples} samples on werner(0.8), m=3 (ms per batch)")
    rows = time_volume(args.samples)
    for kind, timing in rows.items():
        line = f"  {kind:9s} numba: {fmt(timing['numba'])}   numpy: {fmt(timing['numpy'])}"
        if timing["numba"]:
            line += f"   ratio: {timing['numpy'] / timing['numba']:.2f}x"
        print(line)


if __name__ == "__main__":
    main()
