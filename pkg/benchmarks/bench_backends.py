"""Compare the compiled and pure-Python sweep kernels.

    python benchmarks/bench_backends.py --degrees 64 256 1024 --repeat 5

Reports the median time of a single full-window sweep for each backend and
the speed-up, plus one complete solve with the compiled kernel.
"""

from __future__ import annotations

import argparse
import statistics
import time

from cmvroots import gen_P1, initial_state, solve, structqr


def time_sweep(degree: int, backend: str, repeat: int) -> float:
    structqr.set_backend(backend)
    state = initial_state(gen_P1(degree // 2))
    # a few sweeps first so the band is fully populated
    for _ in range(3):
        structqr._sweep_inplace(state, 0.3 + 0.2j)
    samples = []
    for _ in range(repeat):
        trial = state.copy()
        t0 = time.perf_counter()
        structqr._sweep_inplace(trial, 0.3 + 0.2j)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--degrees", type=int, nargs="+", default=[64, 256, 1024])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-python-above", type=int, default=4096, help="pure-Python runs are slow")
    args = ap.parse_args()

    backends = structqr.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'degree':>8} {'compiled [ms]':>14} {'python [ms]':>12} {'speed-up':>9}")
    for d in args.degrees:
        tc = time_sweep(d, "compiled", args.repeat) if "compiled" in backends else float("nan")
        tp = time_sweep(d, "python", args.repeat) if d <= args.skip_python_above else float("nan")
        print(f"{d:>8} {tc * 1e3:>14.3f} {tp * 1e3:>12.3f} {tp / tc:>9.1f}")

    if "compiled" in backends:
        structqr.set_backend("compiled")
        d = max(args.degrees)
        t0 = time.perf_counter()
        rep = solve(gen_P1(d // 2))
        print(f"full solve, P1 degree {d}: {time.perf_counter() - t0:.2f} s, averit {rep.averit:.2f}")


if __name__ == "__main__":
    main()
