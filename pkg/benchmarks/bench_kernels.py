"""Benchmark: compiled kernels vs the numpy fallback.

Times the raw table kernels on representative shapes and a full end-to-end
query on the bundled chest-clinic network with each backend.

Run:  python benchmarks/bench_kernels.py
"""

import statistics
import time

import numpy as np

from factorargs import _kernels_py

try:
    from factorargs import _ckernels
except ImportError:
    _ckernels = None


def _bench(fn, repeats=7, inner=2000):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        samples.append((time.perf_counter() - t0) / inner)
    return min(samples), statistics.median(samples)


def bench_kernels():
    rng = np.random.default_rng(0)
    cases = {
        "multiply 2x2x2": dict(
            dims=np.array([2, 2, 2], dtype=np.int64),
            a=rng.uniform(0.1, 1.0, 4),
            a_strides=np.array([2, 1, 0], dtype=np.int64),
            b=rng.uniform(0.1, 1.0, 4),
            b_strides=np.array([0, 2, 1], dtype=np.int64),
        ),
        "multiply 3x3x3x3": dict(
            dims=np.array([3, 3, 3, 3], dtype=np.int64),
            a=rng.uniform(0.1, 1.0, 27),
            a_strides=np.array([9, 3, 1, 0], dtype=np.int64),
            b=rng.uniform(0.1, 1.0, 27),
            b_strides=np.array([0, 9, 3, 1], dtype=np.int64),
        ),
    }
    backends = [("python", _kernels_py)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':24s} " + "".join(f"{name:>12s}" for name, _ in backends) + "   speedup")
    for label, kw in cases.items():
        times = []
        for _, mod in backends:
            best, _ = _bench(lambda m=mod: m.multiply(
                kw["dims"], kw["a"], kw["a_strides"], kw["b"], kw["b_strides"]
            ))
            times.append(best)
        _print_row(label, times)

    table = rng.uniform(0.1, 1.0, 27)
    dims = np.array([3, 3, 3], dtype=np.int64)
    incoming = np.ones((3, 3))
    incoming[0] = rng.uniform(0.1, 1.0, 3)
    times = []
    for _, mod in backends:
        best, _ = _bench(lambda m=mod: m.weighted_marginal(dims, table, incoming, 2))
        times.append(best)
    _print_row("weighted_marginal 3^3", times)


def _print_row(label, times):
    cols = "".join(f"{t * 1e6:10.2f}us" for t in times)
    speedup = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else "       -"
    print(f"{label:24s} {cols} {speedup}")


def bench_end_to_end():
    import os
    import subprocess
    import sys

    code = (
        "import time, factorargs as fx\n"
        "from factorargs.fixtures import load\n"
        "bn = load('asia')\n"
        "ev = {'XRay Result': 'abnormal', 'Tuberculosis': 'absent'}\n"
        "t0 = time.perf_counter()\n"
        "for _ in range(20):\n"
        "    fx.find_maximal_proper_fas(bn, 'Lung Cancer', ev)\n"
        "print(f'{fx.BACKEND}: {(time.perf_counter() - t0) / 20 * 1e3:.2f} ms/query')\n"
    )
    print("\nend-to-end argument search (asia, figure scenario):", flush=True)
    for env_val in ("", "1"):
        env = dict(os.environ, FACTORARGS_PURE=env_val) if env_val else {
            k: v for k, v in os.environ.items() if k != "FACTORARGS_PURE"
        }
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


if __name__ == "__main__":
    bench_kernels()
    bench_end_to_end()
