"""Benchmark the numba kernels against the pure-numpy fallback.

Run from the repo root:

    python benchmarks/bench_kernels.py

The numpy path is what you get with BECSCATTER_NO_NUMBA=1; here both
implementations are called directly so one process can time the pair and
check they agree.
"""

import time

import numpy as np

from becscatter import kernels
from becscatter.core import SimulationParams, make_grid, make_profile


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_sigma(profile_kind: str, slab_depth: float, cutoff: int):
    params = SimulationParams(density=0.05, slab_depth=slab_depth)
    profile = make_profile(profile_kind, params)
    grid = make_grid(params, profile_kind)
    ks = 2.0 * np.pi * np.arange(-cutoff, cutoff + 1) / params.length
    amps = np.asarray(profile.amplitudes, dtype=complex)
    kaps = np.asarray(profile.wavenumbers, dtype=float)
    q = params.optical_wavenumber(0.0)
    L = params.length

    if kernels.NUMBA_ACTIVE:
        kernels._sigma_block_nb(ks, ks, amps, kaps, q, L)  # compile once
        t_nb, out_nb = _time(lambda: kernels._sigma_block_nb(ks, ks, amps, kaps, q, L))
    else:
        t_nb, out_nb = float("nan"), None
    t_np, out_np = _time(lambda: kernels._sigma_block_np(ks, ks, amps, kaps, q, L))
    agree = (np.max(np.abs(out_nb - out_np)) if out_nb is not None else float("nan"))
    n = ks.size
    print(f"sigma_block {profile_kind:8s} {n}x{n}: "
          f"numba {t_nb*1e3:8.1f} ms | numpy {t_np*1e3:8.1f} ms | "
          f"speedup {t_np/t_nb if t_nb else float('nan'):5.1f}x | "
          f"max |diff| {agree:.2e}")


def bench_cubic(n: int):
    rng = np.random.default_rng(0)
    delta = rng.uniform(-10, 10, n)
    b = np.pi * rng.uniform(0.0, 0.2, n)
    if kernels.NUMBA_ACTIVE:
        kernels._cubic_sqrt_eps_nb(delta, b)  # compile once
        t_nb, out_nb = _time(lambda: kernels._cubic_sqrt_eps_nb(delta, b))
    else:
        t_nb, out_nb = float("nan"), None
    def np_path():
        roots = kernels._cubic_roots_np(delta, b, eta=kernels._ETA)
        return kernels._polish_np(kernels._select_root_np(roots, b), delta, b)
    t_np, out_np = _time(np_path)
    agree = (np.max(np.abs(out_nb - out_np)) if out_nb is not None else float("nan"))
    print(f"cubic_sqrt_eps n={n}: "
          f"numba {t_nb*1e3:8.1f} ms | numpy {t_np*1e3:8.1f} ms | "
          f"speedup {t_np/t_nb if t_nb else float('nan'):5.1f}x | "
          f"max |diff| {agree:.2e}")


def main():
    print(f"active backend: {kernels.backend_name()}")
    bench_sigma("uniform", 10.0, 80)
    bench_sigma("split", 10.0, 120)
    bench_cubic(4096)
    bench_cubic(65536)


if __name__ == "__main__":
    main()
