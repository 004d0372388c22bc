"""Time each hot kernel under the numba and numpy backends.

Usage: python3 benchmarks/bench_kernels.py [--n 4096] [--repeat 5]
"""
import argparse
import time

import numpy as np

from prandtl import _kernels


def cases(n):
    rng = np.random.default_rng(0)
    h = 24.0 / n
    u = rng.standard_normal(n) + 0j
    kern = rng.standard_normal(2 * n - 1) + 0j
    xi = (np.arange(n) - n // 2) * (np.pi / (n * h))
    theta = np.linspace(0.01, np.pi - 0.01, n)
    weight = rng.uniform(0, 1, n)
    nm = 128
    return {
        "multiplier": (xi,),
        "direct_convolution": (u, kern, h),
        "fd4_derivative": (u, h),
        "glauert_matrix": (weight[:nm], theta[:nm], nm),
        "glauert_image": (rng.standard_normal(64), theta),
        "sine_projection": (u, theta, weight, h, 64),
    }


def best_of(fn, args, repeat):
    fn(*args)  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if _kernels.numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"n = {args.n}")
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speed-up':>10}")
    for name, a in cases(args.n).items():
        t_np = best_of(getattr(_kernels.numpy_impl, name), a, args.repeat)
        t_nb = best_of(getattr(_kernels.numba_impl, name), a, args.repeat)
        print(f"{name:<22}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.2f}")


if __name__ == "__main__":
    main()
