"""Timing comparison of the compiled kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``.  The same comparison is
what the DPMINIMAX_DISABLE_NUMBA environment flag switches at import time;
this script calls both implementations directly so one process can report
both numbers.
"""

import time

import numpy as np

from dpminimax import _kernels
from dpminimax._rng import derived_rng


def _time(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_races() -> tuple[str, float, float]:
    rng = derived_rng(100)
    trials, k, N = 200_000, 6, 3
    clocks = rng.exponential(size=(trials, k))
    probs = rng.random((N, k))
    probs /= probs.sum(axis=1, keepdims=True)

    def run_numpy():
        _kernels._races_winners_numpy(clocks, probs)

    def run_jit():
        out = np.empty((trials, N), dtype=np.int64)
        _kernels._races_winners_jit(clocks, probs, out)

    if _kernels.HAVE_NUMBA:
        run_jit()
        return "races_winners", _time(run_numpy), _time(run_jit)
    return "races_winners", _time(run_numpy), float("nan")


def bench_pairs() -> tuple[str, float, float]:
    rng = derived_rng(101)
    trials = 200_000
    u = rng.random((trials, 3))
    agree = 0.75
    common_cdf = np.array([0.4, 1.0])
    pos_cdf = np.array([0.3, 1.0])
    neg_cdf = np.array([0.6, 1.0])

    def run_numpy():
        _kernels._pair_assignments_numpy(u, agree, common_cdf, pos_cdf, neg_cdf)

    def run_jit():
        out = np.empty((trials, 2), dtype=np.int64)
        _kernels._pair_assignments_jit(u, agree, common_cdf, pos_cdf, neg_cdf, out)

    if _kernels.HAVE_NUMBA:
        run_jit()
        return "pair_assignments", _time(run_numpy), _time(run_jit)
    return "pair_assignments", _time(run_numpy), float("nan")


def bench_dpsgml() -> tuple[str, float, float]:
    rng = derived_rng(102)
    trials, n, d, K, m = 128, 500, 5, 649, 64
    data = rng.standard_normal((trials, n, d))
    theta0 = rng.standard_normal((trials, d)) * 0.1
    batch_idx = rng.integers(0, n, size=(trials, K, m))
    step_noise = rng.standard_normal((trials, K, d))
    center = np.zeros(d)
    args = (data, theta0, batch_idx, step_noise, 1.0, 4.0, 1.0 / 64.0, 0.01, center, 10.0)

    def run_numpy():
        _kernels._dpsgml_trials_numpy(*args)

    def run_jit():
        out = np.empty_like(theta0)
        _kernels._dpsgml_trials_jit(*args, out)

    if _kernels.HAVE_NUMBA:
        run_jit()
        return "dpsgml_trials", _time(run_numpy, 3), _time(run_jit, 3)
    return "dpsgml_trials", _time(run_numpy, 3), float("nan")


def main() -> None:
    print(f"active backend: {_kernels.backend()}")
    print(f"{'kernel':<18} {'numpy (s)':>10} {'numba (s)':>10} {'speedup':>8}")
    for name, t_np, t_jit in (bench_races(), bench_pairs(), bench_dpsgml()):
        speedup = t_np / t_jit if t_jit == t_jit and t_jit > 0 else float("nan")
        print(f"{name:<18} {t_np:>10.4f} {t_jit:>10.4f} {speedup:>8.2f}")


if __name__ == "__main__":
    main()
