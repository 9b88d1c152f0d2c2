#!/usr/bin/env python3
"""Benchmark the fused fusion kernel: compiled extension vs numpy fallback.

Workloads mirror the two decode regimes: wide batch windows with 4-way
overlap, and stride-1 realtime windows. Run as:

    python3 benchmarks/bench_fuse.py [--words N] [--repeats K]
"""

import argparse
import time

import numpy as np

from winpunct import _fuse_py
from winpunct.core import CombinerKind, DecodingConfig, WindowPrediction, generate_windows
from winpunct.fuse import _kernels, fuse_predictions
from winpunct.strategies import build_custom, preset_realtime


def make_predictions(n_words, config, seed=0):
    rng = np.random.default_rng(seed)
    predictions = []
    for spec in generate_windows(n_words, config):
        mat = rng.random((spec.length, 4)) + 1e-3
        predictions.append(WindowPrediction(spec, mat / mat.sum(axis=1, keepdims=True)))
    return predictions


def bench(predictions, n_words, kind, impl, repeats):
    fuse_predictions(predictions, n_words, kind, impl=impl)  # warm up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fuse_predictions(predictions, n_words, kind, impl=impl)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--words", type=int, default=50_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _kernels is None:
        print("compiled kernel not built; showing numpy fallback only")

    workloads = {
        "batch w=120 n=4": build_custom(120, 30, 15, 4)[0],
        "batch w=120 n=1": build_custom(120, 30, 15, 1)[0],
        "realtime w=30 l=2": preset_realtime(30, 2),
    }

    header = f"{'workload':<20}{'combiner':<10}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, config in workloads.items():
        predictions = make_predictions(args.words, config)
        for kind in CombinerKind:
            pure = bench(predictions, args.words, kind, _fuse_py, args.repeats)
            row = f"{name:<20}{kind.value:<10}{pure * 1e3:>12.2f}"
            if _kernels is not None:
                compiled = bench(predictions, args.words, kind, _kernels, args.repeats)
                row += f"{compiled * 1e3:>15.2f}{pure / compiled:>9.1f}x"
                _check_agreement(predictions, args.words, kind)
            print(row)
    print(f"\n{args.words} words per workload; best of {args.repeats} runs.")


def _check_agreement(predictions, n_words, kind):
    a = fuse_predictions(predictions, n_words, kind, impl=_fuse_py)
    b = fuse_predictions(predictions, n_words, kind, impl=_kernels)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


if __name__ == "__main__":
    main()
