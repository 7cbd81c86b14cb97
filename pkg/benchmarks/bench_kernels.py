"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Each kernel is
timed on the same inputs in both backends; the median of N calls is
reported together with the speedup and whether the outputs agree.
"""

import argparse
import statistics
import time

import numpy as np

from gaussreg import kernels
from gaussreg.latent import raw_words, random_permutation, sample_standard_gaussian


def _median_ms(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times) * 1e3


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(u, v) for u, v in zip(a, b))
    if isinstance(a, float):
        return a == b
    return np.allclose(a, b, rtol=1e-12, atol=1e-12)


def cases():
    d = 65536
    x = sample_standard_gaussian(d, 1)
    half = np.abs(np.fft.rfft(x)) / np.sqrt(d)
    order = random_permutation(d, 2)
    words = raw_words(3, d - 1 + 64)
    img = np.ascontiguousarray(x.reshape(256, 256))
    small = sample_standard_gaussian(2048, 4)
    return [
        ("fisher_yates D=65536", "fisher_yates", (words, d)),
        ("batch_abs_deviation D=65536", "batch_abs_deviation", (half, order, 16, 0.875, d)),
        ("smooth5 256x256", "smooth5", (img,)),
        ("circular_autocorr_direct D=2048", "circular_autocorr_direct", (small,)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=15)
    args = parser.parse_args(argv)
    backends = kernels.backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is available")
    print(f"{'kernel':34s} {'python ms':>10s} {'compiled ms':>12s} {'speedup':>8s}  match")
    for label, name, call_args in cases():
        py_fn = getattr(backends["python"], name)
        t_py = _median_ms(lambda: py_fn(*call_args), args.repeat)
        if "compiled" in backends:
            c_fn = getattr(backends["compiled"], name)
            t_c = _median_ms(lambda: c_fn(*call_args), args.repeat)
            match = _same(py_fn(*call_args), c_fn(*call_args))
            print(f"{label:34s} {t_py:10.3f} {t_c:12.3f} {t_py / t_c:7.1f}x  {match}")
        else:
            print(f"{label:34s} {t_py:10.3f} {'-':>12s} {'-':>8s}")


if __name__ == "__main__":
    main()
