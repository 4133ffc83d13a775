#!/usr/bin/env python3
"""
Numba vs NumPy kernel benchmark.

Times the lowest eigenpair of a p-block, its full spectrum, and a batched
slope search over many blocks through both kernel backends, warming the jitted path first so compilation is excluded.
Prints a table, or JSON with --json.
"""

import argparse
import json
import statistics
import time

import numpy as np

from dickeqpt import _kernels
from dickeqpt.eigen import full_spectrum, ground_eigenpair, lowest_eigenvalues
from dickeqpt.subspace import ModelParams, build_block

WARMUP_RUNS = 2
BENCH_RUNS = 5
EIGENPAIR_SIZES = [(10, 100), (100, 100), (1000, 1000), (5000, 5000)]
SPECTRUM_SIZES = [(20, 20), (100, 100), (400, 400)]
# (N, p_max): every branch slope K^(0..p_max) in one batch, as a ground-state search does
SEARCH_SIZES = [(100, 200), (1000, 1500)]


def time_call(func, warmup, runs):
    for _ in range(warmup):
        func()
    samples = []
    for _ in range(runs):
        start = time.perf_counter()
        func()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def _search(blocks, backend):
    return lowest_eigenvalues([b.offdiag for b in blocks], backend)


def bench(kind, sizes, warmup, runs):
    solver = {"eigenpair": ground_eigenpair, "spectrum": full_spectrum, "search": _search}[kind]
    results = []
    for n, p in sizes:
        if kind == "search":
            block = [build_block(ModelParams(n), q) for q in range(p + 1)]
            dim = max(b.dim for b in block)
        else:
            block = build_block(ModelParams(n), p)
            dim = block.dim
        row = {"kind": kind, "n_atoms": n, "p": p, "dim": dim}
        outputs = {}
        for backend in ("numba", "numpy"):
            row[f"{backend}_s"] = time_call(lambda b=backend: solver(block, b), warmup, runs)
            outputs[backend] = solver(block, backend)
        if kind == "eigenpair":
            a, b = np.array([outputs["numba"].k_slope]), np.array([outputs["numpy"].k_slope])
        else:
            a, b = outputs["numba"], outputs["numpy"]
        row["max_rel_diff"] = float(np.abs(a - b).max() / max(1.0, np.abs(b).max()))
        row["speedup"] = row["numpy_s"] / row["numba_s"]
        results.append(row)
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--runs", type=int, default=BENCH_RUNS)
    parser.add_argument("--warmup", type=int, default=WARMUP_RUNS)
    parser.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    args = parser.parse_args()

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    results = bench("eigenpair", EIGENPAIR_SIZES, args.warmup, args.runs)
    results += bench("spectrum", SPECTRUM_SIZES, args.warmup, args.runs)
    results += bench("search", SEARCH_SIZES, args.warmup, args.runs)

    if args.json:
        print(json.dumps(results, indent=1))
        return
    print(f"{'kind':<10}{'N':>6}{'p':>6}{'dim':>6}{'numba ms':>12}{'numpy ms':>12}{'speedup':>9}{'rel diff':>11}")
    for r in results:
        print(
            f"{r['kind']:<10}{r['n_atoms']:>6}{r['p']:>6}{r['dim']:>6}"
            f"{1e3 * r['numba_s']:>12.3f}{1e3 * r['numpy_s']:>12.3f}{r['speedup']:>9.1f}{r['max_rel_diff']:>11.1e}"
        )


if __name__ == "__main__":
    main()
