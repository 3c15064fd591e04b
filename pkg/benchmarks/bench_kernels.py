"""Compare the compiled and numpy kernels on batched risk and divergence workloads.

    python3 benchmarks/bench_kernels.py [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from dashift import _pykernels
from dashift.kernels import CROSS_ENTROPY as CE, ZERO_ONE as ZO

try:
    from dashift import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def workloads(rng):
    A, K, P = 64, 4, 2000
    w = rng.random((A, K))
    w /= w.sum()
    preds = rng.random((P, A, K)) + 1e-3
    preds /= preds.sum(axis=2, keepdims=True)
    ra, rb = rng.random(1000), rng.random(1000)
    return {
        "expected_losses ce (2000 x 64 x 4)": lambda m: m.expected_losses(w, preds, CE),
        "expected_losses 0-1 (2000 x 64 x 4)": lambda m: m.expected_losses(w, preds, ZO),
        "hdh_sup (1000 hypotheses)": lambda m: m.hdh_sup(ra, rb),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'workload':40s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, fn in workloads(rng).items():
        tp = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:40s} {tp:10.3f} {'n/a':>10s}")
            continue
        tc = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        a, b = fn(_pykernels), fn(_ckernels)
        np.testing.assert_allclose(np.asarray(a[0] if isinstance(a, tuple) else a),
                                   np.asarray(b[0] if isinstance(b, tuple) else b), rtol=1e-10)
        print(f"{name:40s} {tp:10.3f} {tc:10.3f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
