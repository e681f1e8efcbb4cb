"""Time the compiled kernels against the pure NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from pinsync import _backend
from pinsync.resultant import _panel_nodes


def cases():
    gen = np.random.default_rng(0)
    d = gen.uniform(-np.pi, np.pi, 100_000)
    z = gen.uniform(0.0, 80.0, 20_000)
    x = gen.standard_normal((12, 512))
    u, _, wt, starts = _panel_nodes(10, 12.0, 400)
    R = np.linspace(0.5, 9.5, 64)
    return {
        "pin_logpdf (1e5 angles)": lambda k: k.pin_logpdf(d, 2.5),
        "pin_loglik_terms (1e5 angles)": lambda k: k.pin_loglik_terms(d, 2.5),
        "bessel_i_scaled (2e4 points)": lambda k: k.bessel_i_scaled(0.5, z),
        "weighted_j0_panel_sums (64 R)": lambda k: k.weighted_j0_panel_sums(R, u, wt, starts),
        "fft_radix2 (12 x 512)": lambda k: k.fft_radix2(x),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = _backend.available()
    print(f"{'kernel':32s}" + "".join(f"{b:>14s}" for b in backends) + ("      speedup" if len(backends) > 1 else ""))
    for name, fn in cases().items():
        times = []
        for b in backends:
            k = _backend.get(b)
            fn(k)  # warm up
            times.append(min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)))
        line = f"{name:32s}" + "".join(f"{t * 1e3:12.3f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[0] / times[1]:12.1f}x"
        print(line)


if __name__ == "__main__":
    main()
