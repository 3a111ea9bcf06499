"""Timing comparison of the compiled Bloch kernel against the numpy fallback.

Run as: python3 benchmarks/bench_kernels.py [--paths N] [--steps N]
"""

import argparse
import time

import numpy as np

from mesobath._kernels import _fallback

try:
    from mesobath._kernels import _core
except ImportError:
    _core = None


def bench(fn, delta_half, dt, out_idx, repeats=3):
    s0 = np.array([0.0, 0.0, 0.5])
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(delta_half, dt, 2.0 * np.pi, 0.0, 0.0, s0, out_idx)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=2048)
    ap.add_argument("--steps", type=int, default=1000)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    delta_half = rng.standard_normal((args.paths, 2 * args.steps + 1))
    dt = 0.01
    out_idx = np.arange(0, args.steps + 1, 10, dtype=np.intp)

    t_fb = bench(_fallback.bloch_rk4_batch, delta_half, dt, out_idx)
    print(f"fallback (numpy):  {t_fb * 1e3:9.2f} ms  "
          f"({args.paths} paths x {args.steps} steps)")
    if _core is None:
        print("compiled kernel not built; install the package to compare")
        return
    t_c = bench(_core.bloch_rk4_batch, delta_half, dt, out_idx)
    print(f"compiled (cython): {t_c * 1e3:9.2f} ms  speedup {t_fb / t_c:5.1f}x")

    ref = _fallback.bloch_rk4_batch(delta_half[:8], dt, 2.0 * np.pi, 0.0, 0.0,
                                    np.array([0.0, 0.0, 0.5]), out_idx)
    got = _core.bloch_rk4_batch(delta_half[:8], dt, 2.0 * np.pi, 0.0, 0.0,
                                np.array([0.0, 0.0, 0.5]), out_idx)
    print(f"max |difference|:  {np.max(np.abs(ref - got)):.3e}")


if __name__ == "__main__":
    main()
