"""Numba versus numpy kernel timings.

Run ``python3 benchmarks/bench_kernels.py``; each kernel is warmed once (JIT
compilation excluded) and the best of ``--repeat`` runs is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from shelldecay import PotentialSpec, build_modes, find_poles, psi_continuum, psi_resonant_batch
from shelldecay._jit import HAVE_NUMBA, use_backend
from shelldecay.special import faddeyeva_array


def best_of(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    spec = PotentialSpec(12.0)
    modes = build_modes(spec, find_poles(spec, 200))
    tau = modes[0].pole.lifetime
    rng = np.random.default_rng(0)
    z = 10 ** rng.uniform(-3, 1.5, 200_000) * np.exp(1j * rng.uniform(0, 2 * np.pi, 200_000))
    ts = tau * np.geomspace(0.05, 30, 2000)

    cases = {
        "faddeyeva_array (2e5 points)": lambda: faddeyeva_array(z),
        "psi_resonant_batch (N=200, 2000 t)": lambda: psi_resonant_batch(modes, 1.0, ts, 200),
        "psi_continuum (10 samples)": lambda: [psi_continuum(spec, 1.0, x * tau) for x in np.geomspace(0.05, 30, 10)],
    }
    backends = ["numba", "numpy"] if HAVE_NUMBA else ["numpy"]
    print(f"{'kernel':38s}" + "".join(f"{b:>12s}" for b in backends) + ("     speed-up" if len(backends) == 2 else ""))
    for name, fn in cases.items():
        row = []
        for b in backends:
            with use_backend(b):
                row.append(best_of(fn, args.repeat))
        line = f"{name:38s}" + "".join(f"{x:11.4f}s" for x in row)
        if len(row) == 2:
            line += f"{row[1] / row[0]:12.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
