#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs itself twice in subprocesses — once with the default backend and once
with MATPROBE_NO_NUMBA=1 — and prints a comparison table.

    python3 benchmarks/bench_kernels.py
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _bench(fn, *args, reps: int, warmup: int = 1) -> float:
    for _ in range(warmup):
        fn(*args)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps


def run_measurements() -> dict:
    from matprobe._kernels import USE_NUMBA, cycle_mean, gf_rank, rigidity_search
    import itertools

    rng = np.random.default_rng(0)
    out = {"backend": "numba" if USE_NUMBA else "numpy"}

    A = rng.integers(0, 3, size=(300, 300), dtype=np.int64)
    out["gf_rank_300x300_gf3"] = _bench(
        lambda: gf_rank(A.copy(), 3), reps=10)

    B = np.ascontiguousarray(rng.standard_normal((512, 512)))
    I = rng.integers(0, 512, size=(50_000, 3), dtype=np.int64)
    J = rng.integers(0, 512, size=(50_000, 3), dtype=np.int64)
    out["cycle_mean_50k_q3"] = _bench(lambda: cycle_mean(B, I, J), reps=10)

    C = rng.integers(0, 2, size=(6, 6), dtype=np.int64)
    combos = np.array(list(itertools.product(range(2), repeat=2)), dtype=np.int64)
    out["rigidity_6x6_gf2_r2"] = _bench(
        lambda: rigidity_search(C, 2, 2, 2**12, combos), reps=3)
    return out


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--measure", action="store_true",
                    help="run measurements in-process and print JSON")
    args = ap.parse_args()
    if args.measure:
        print(json.dumps(run_measurements()))
        return 0

    results = []
    for no_numba in (False, True):
        env = dict(os.environ)
        env.pop("MATPROBE_NO_NUMBA", None)
        if no_numba:
            env["MATPROBE_NO_NUMBA"] = "1"
        proc = subprocess.run([sys.executable, __file__, "--measure"],
                              env=env, capture_output=True, text=True, check=True)
        results.append(json.loads(proc.stdout))

    fast, slow = results
    keys = [k for k in fast if k != "backend"]
    width = max(len(k) for k in keys)
    print(f"{'kernel':<{width}}  {'numba':>12}  {'numpy':>12}  {'speedup':>8}")
    for k in keys:
        ratio = slow[k] / fast[k]
        print(f"{k:<{width}}  {fast[k] * 1e3:>10.3f}ms  {slow[k] * 1e3:>10.3f}ms"
              f"  {ratio:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
