"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from qcond import _fallback, kernels
from qcond.qmath import random_density


def cases(rng):
    qubits = np.stack([random_density(2, rng) for _ in range(2000)])
    quarts = np.stack([random_density(4, rng) for _ in range(500)])
    eights = np.stack([random_density(8, rng) for _ in range(100)])
    probs = rng.dirichlet(np.ones(12), size=5000)
    return {
        "jacobi 2000x(2x2)": lambda m: m.jacobi_eigh_batch(qubits, 1e-14, 60, False),
        "jacobi 500x(4x4)": lambda m: m.jacobi_eigh_batch(quarts, 1e-14, 60, False),
        "jacobi 100x(8x8) +vectors": lambda m: m.jacobi_eigh_batch(eights, 1e-14, 60, True),
        "vn_entropy 500x(4x4)": lambda m: m.vn_entropy_batch(quarts, 1e-14, 60, 1e-15),
        "shannon 5000x12": lambda m: m.shannon_rows(probs, 1e-15),
        "curvature_series z=0.99": lambda m: m.curvature_series(0.99, 1e-14),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if kernels.compiled is None:
        print("compiled extension not available; only the fallback is timed")
    impls = [("python", _fallback)] + ([("compiled", kernels.compiled)] if kernels.compiled else [])
    print(f"{'case':28s}" + "".join(f"{name:>12s}" for name, _ in impls) + "     speedup")
    for label, fn in cases(np.random.default_rng(0)).items():
        times = [min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat)) for _, m in impls]
        row = f"{label:28s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
