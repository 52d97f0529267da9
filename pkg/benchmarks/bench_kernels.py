"""Compare the compiled and pure-Python kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--n 129] [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np

from cmcbar import kernels


def _stencil_args(n):
    t = np.linspace(-1.0, 1.0, n)
    x = np.linspace(0.0, 1.0, n)
    u = 0.3 * np.cos(t)[:, None] * np.ones(n)[None, :]
    ht, hx = t[1] - t[0], x[1] - x[0]
    tf = 0.5 * (t[1:] + t[:-1])
    return u, ht, hx, np.cosh(tf), np.cosh(t), 0.25


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=129, help="grid points per side")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    sargs = _stencil_args(args.n)
    rk_args = (0, 0.25, 1.0, math.sqrt(1e-6), 1.25e-6, math.sqrt(2e-6 / 1.25), 1e-4, 5.0, 1, 1)
    print(f"{'kernel':<14}{'backend':<10}{'best [ms]':>12}")
    best = {}
    for name, mod in sorted(kernels.BACKENDS.items()):
        for label, fn, fargs, number in (("flux_stencil", mod.flux_stencil, sargs, 5),
                                         ("rk4_flux", mod.rk4_flux, rk_args, 1)):
            times = timeit.repeat(lambda: fn(*fargs), number=number, repeat=args.repeat)
            best[label, name] = min(times) / number * 1e3
            print(f"{label:<14}{name:<10}{best[label, name]:>12.3f}")
    if len(kernels.BACKENDS) > 1:
        for label in ("flux_stencil", "rk4_flux"):
            print(f"speedup {label}: {best[label, 'python'] / best[label, 'cython']:.1f}x")
    else:
        print("compiled backend not built; only the fallback was timed")


if __name__ == "__main__":
    main()
