"""Benchmark the compiled kernels against the numpy fallback.

Times the two per-timestep kernel pairs (forward step, gradient
accumulate + sensitivity advance) and a full training epoch, at a few
layer widths.  Run from the repo root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from ftkit import kernels
from ftkit.activations import SplitTanh
from ftkit.cbp import Dataset, GradientAccumulator, SensitivityState, TrainConfig, run_window, train
from ftkit.network import FTNetwork


def time_kernel_pair(mod, n, m, steps=2000):
    rng = np.random.default_rng(0)
    V = rng.normal(size=(n, n)) * 0.3
    wvec = rng.normal(size=n)
    pbeta = rng.uniform(0.1, 1.0, size=n)
    s_prev = rng.normal(size=m)
    r_prev = rng.normal(size=n)
    sw = np.zeros((n, n, m))
    sv = np.zeros((n, n, n))
    buf_w = np.zeros_like(sw)
    buf_v = np.zeros_like(sv)
    g_w = np.zeros((n, m))
    g_v = np.zeros((n, n))
    start = time.perf_counter()
    for _ in range(steps):
        mod.accumulate_full(V, 1.0, 1.0, wvec, s_prev, r_prev, sw, sv, g_w, g_v)
        mod.advance_full(V, 1.0, 1.0, pbeta, s_prev, r_prev, sw, sv, buf_w, buf_v)
        sw, buf_w = buf_w, sw
        sv, buf_v = buf_v, sv
    return (time.perf_counter() - start) / steps


def time_epoch(n_hidden, steps=400, epochs=20):
    rng = np.random.default_rng(1)
    ds = Dataset(
        rng.uniform(-1, 1, size=(steps, 1)),
        rng.uniform(-0.8, 0.8, size=(steps, 1)),
    )
    net = FTNetwork.create([1, n_hidden, 1], activation=SplitTanh(), seed=2)
    state = SensitivityState(net, "full")
    acc = GradientAccumulator(net)
    start = time.perf_counter()
    for _ in range(epochs):
        net.reset_state()
        state.zero()
        acc.zero()
        run_window(net, ds.train_inputs, ds.train_targets, state, acc)
    return (time.perf_counter() - start) / epochs


def main():
    available = kernels.backends()
    print(f"backends available: {', '.join(sorted(available))}")
    print(f"active backend: {kernels.BACKEND}")
    print()
    print("per-timestep kernel pair (accumulate_full + advance_full), seconds/step")
    print(f"{'n':>4} {'m':>4}" + "".join(f" {name:>12}" for name in sorted(available)) + "   speedup")
    for n, m in [(4, 4), (10, 1), (16, 16), (32, 32), (64, 64)]:
        times = {name: time_kernel_pair(mod, n, m) for name, mod in available.items()}
        row = f"{n:>4} {m:>4}" + "".join(f" {times[name]:>12.2e}" for name in sorted(available))
        if len(times) == 2:
            row += f"   {times['python'] / times['compiled']:.1f}x"
        print(row)
    print()
    print("whole training epoch via run_window (T=400), seconds/epoch")
    saved_active, saved_name = kernels.active, kernels.BACKEND
    try:
        for n_hidden in (4, 10, 32):
            times = {}
            for name, mod in available.items():
                kernels.active = mod
                times[name] = time_epoch(n_hidden)
            row = f"n_hidden={n_hidden:<3}" + "".join(
                f" {name}: {times[name]:.2e}s" for name in sorted(available)
            )
            if len(times) == 2:
                row += f"   speedup {times['python'] / times['compiled']:.1f}x"
            print(row)
    finally:
        kernels.active, kernels.BACKEND = saved_active, saved_name


if __name__ == "__main__":
    main()
