"""Benchmark the compiled kernels against the pure-numpy fallback.

Run: python3 benchmarks/bench_kernels.py

Verifies output equality on each workload, times both backends, and also
times an end-to-end forest fit (the kernel-heaviest code path).
"""

from __future__ import annotations

import time

import numpy as np

from fairsearch import learners
from fairsearch._kernels import _pykernels

try:
    from fairsearch._kernels import _ckernels
except ImportError:
    _ckernels = None


def _time(fn, repeats=5):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def _row(name, py_seconds, c_seconds):
    speedup = py_seconds / c_seconds if c_seconds else float("nan")
    print(f"{name:32s} {py_seconds * 1e3:10.2f} ms {c_seconds * 1e3:10.2f} ms {speedup:8.1f}x")


def bench_pareto(rng):
    scores = rng.random((4000, 4))
    py_t, py_out = _time(lambda: _pykernels.pareto_nondominated(scores))
    c_t, c_out = _time(lambda: _ckernels.pareto_nondominated(scores))
    assert np.array_equal(py_out, c_out)
    _row("pareto_nondominated n=4000 m=4", py_t, c_t)


def bench_best_split(rng):
    x = rng.normal(size=(4000, 12))
    y = (rng.random(4000) < 0.4).astype(float)
    w = rng.random(4000) + 0.01
    py_t, py_out = _time(lambda: _pykernels.best_split(x, y, w, 5))
    c_t, c_out = _time(lambda: _ckernels.best_split(x, y, w, 5))
    assert py_out == c_out
    _row("best_split m=4000 f=12", py_t, c_t)


def bench_knn(rng):
    x = rng.normal(size=(1500, 6))
    py_t, py_out = _time(lambda: _pykernels.knn_indices(x, 5), repeats=3)
    c_t, c_out = _time(lambda: _ckernels.knn_indices(x, 5), repeats=3)
    assert np.array_equal(py_out, c_out)
    _row("knn_indices n=1500 f=6 k=5", py_t, c_t)


def bench_forest(rng):
    x = rng.normal(size=(2000, 8))
    y = (rng.random(2000) < 0.4).astype(int)
    w = np.ones(2000)
    hp = {"n_trees": 16, "max_depth": 8, "min_leaf": 5, "feature_subsample_fraction": 0.7}

    def fit_with(backend):
        original = learners._kernels.best_split
        learners._kernels.best_split = backend.best_split
        try:
            return learners.train_forest(x, y, w, hp, seed=3)
        finally:
            learners._kernels.best_split = original

    py_t, py_model = _time(lambda: fit_with(_pykernels), repeats=3)
    c_t, c_model = _time(lambda: fit_with(_ckernels), repeats=3)
    for ta, tb in zip(py_model.trees, c_model.trees):
        assert np.array_equal(ta.threshold, tb.threshold)
    _row("train_forest n=2000 trees=16", py_t, c_t)


def main():
    if _ckernels is None:
        print("compiled kernels unavailable; build the extension first")
        return
    rng = np.random.default_rng(0)
    print(f"{'workload':32s} {'pure numpy':>13s} {'compiled':>13s} {'speedup':>9s}")
    bench_pareto(rng)
    bench_best_split(rng)
    bench_knn(rng)
    bench_forest(rng)
    print("\noutputs verified identical across backends on every workload")


if __name__ == "__main__":
    main()
