#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run:  python bench/bench_kernels.py
The same comparison can be forced package-wide by setting
SHIFTPRESS_NUMBA=0, which selects the numpy path at import time.
"""

import time

import numpy as np

from shiftpress import kernels
from shiftpress.core import ShiftSystem, count_words


def timeit(fn, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_words(trans, length):
    expected = int(count_words(ShiftSystem(trans), length))
    if kernels.HAVE_NUMBA:
        kernels.words_numba(trans.astype(np.uint8), length, expected)  # warm the JIT
        t_nb, w_nb = timeit(lambda: kernels.words_numba(trans.astype(np.uint8), length, expected))
    else:
        t_nb, w_nb = float("nan"), None
    t_np, w_np = timeit(lambda: kernels.words_numpy(trans.astype(np.uint8), length))
    if w_nb is not None:
        assert np.array_equal(w_nb, w_np)
    return t_nb, t_np, expected


def bench_birkhoff(words, n, m, values, A):
    if kernels.HAVE_NUMBA:
        kernels.birkhoff_numba(words, n, m, values, A)
        t_nb, b_nb = timeit(lambda: kernels.birkhoff_numba(words, n, m, values, A))
    else:
        t_nb, b_nb = float("nan"), None
    t_np, b_np = timeit(lambda: kernels.birkhoff_numpy(words, n, m, values, A))
    if b_nb is not None:
        assert np.abs(b_nb - b_np).max() < 1e-9
    return t_nb, t_np


def main():
    print(f"numba available and enabled: {kernels.HAVE_NUMBA}")
    print(f"{'kernel':<34}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")

    full2 = np.ones((2, 2), dtype=np.uint8)
    golden = np.array([[1, 1], [1, 0]], dtype=np.uint8)
    full3 = np.ones((3, 3), dtype=np.uint8)

    for name, trans, L in (
        ("words full-2 L=20", full2, 20),
        ("words golden L=28", golden, 28),
        ("words full-3 L=13", full3, 13),
    ):
        t_nb, t_np, count = bench_words(trans, L)
        ratio = t_np / t_nb if t_nb == t_nb else float("nan")
        print(f"{name + f' ({count} words)':<34}{t_nb:>12.4f}{t_np:>12.4f}{ratio:>10.2f}")

    rng = np.random.default_rng(0)
    words = kernels.words_numpy(full2, 22)
    vals1 = rng.random(2)
    t_nb, t_np = bench_birkhoff(words, 20, 1, vals1, 2)
    ratio = t_np / t_nb if t_nb == t_nb else float("nan")
    print(f"{'birkhoff m=1 4.2M x 20':<34}{t_nb:>12.4f}{t_np:>12.4f}{ratio:>10.2f}")
    vals2 = rng.random(4)
    t_nb, t_np = bench_birkhoff(words, 20, 2, vals2, 2)
    ratio = t_np / t_nb if t_nb == t_nb else float("nan")
    print(f"{'birkhoff m=2 4.2M x 20':<34}{t_nb:>12.4f}{t_np:>12.4f}{ratio:>10.2f}")

    # Karp DP on a dense random strongly connected digraph
    n = 64
    adj = rng.random((n, n)) < 0.3
    adj |= np.eye(n, k=1, dtype=bool)
    adj[n - 1, 0] = True
    src, dst = np.nonzero(adj)
    wgt = rng.random(src.shape[0])
    if kernels.HAVE_NUMBA:
        kernels.karp_numba(n, src, dst, wgt)
        t_nb, v_nb = timeit(lambda: kernels.karp_numba(n, src, dst, wgt))
    else:
        t_nb, v_nb = float("nan"), None
    t_np, v_np = timeit(lambda: kernels.karp_numpy(n, src, dst, wgt))
    if v_nb is not None:
        assert abs(v_nb - v_np) < 1e-12
    ratio = t_np / t_nb if t_nb == t_nb else float("nan")
    print(f"{'karp 64 vertices':<34}{t_nb:>12.4f}{t_np:>12.4f}{ratio:>10.2f}")


if __name__ == "__main__":
    main()
