"""Benchmark: compiled integrator core vs the pure-Python twin.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times (a) raw closed-form tensor evaluations and (b) full flow runs, for a
short collapsing run and a long immortal run, in both lanes.
"""
import argparse
import time

from hcflow import _core_py

try:
    from hcflow import _core_cy
except ImportError:
    _core_cy = None

KERNEL_POINTS = [
    (2, 0.7, 0.0, 1.0, 1.5, 0.3, -0.2),
    (3, 1.0, 0.0, 2.0, 1.0, 0.1, 0.4),
    (6, 1.0, 2.0, 1.0, 1.0, 0.3, 0.2),
    (8, 0.0, 0.0, 1.0, 1.0, 0.3, 0.4),
]

FLOW_RUNS = [
    ("hopf collapse (t ~ 2.8)", (2, 0.7, 0.0, (2.0, 0.7, 0.5, -0.3), 50.0)),
    ("properly-elliptic t = 1000", (3, 1.0, 0.0, (1.0, 1.0, 0.3, 0.2), 1000.0)),
    ("inoue-s0 t = 1000", (6, 1.0, 2.0, (1.0, 1.0, 0.3, 0.2), 1000.0)),
]


def time_kernel(mod, n):
    t0 = time.perf_counter()
    for _ in range(n):
        for args in KERNEL_POINTS:
            mod.closed_k(*args)
    return (time.perf_counter() - t0) / (n * len(KERNEL_POINTS))


def time_flow(mod, spec, repeat):
    geom, p1, p2, s0, t_max = spec
    t0 = time.perf_counter()
    for _ in range(repeat):
        mod.run_closed_flow(geom, p1, p2, s0, t_max, 1e-9, 1e-12, t_max / 1000, 1e-10)
    return (time.perf_counter() - t0) / repeat


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    lanes = [("python", _core_py)]
    if _core_cy is not None:
        lanes.append(("cython", _core_cy))
    else:
        print("compiled core not available; benchmarking the python lane only")

    results = {}
    for name, mod in lanes:
        per_eval = time_kernel(mod, 20000)
        results[name] = {"kernel": per_eval}
        print(f"{name:>7}: closed_k {per_eval * 1e9:8.0f} ns/eval")
    for label, spec in FLOW_RUNS:
        for name, mod in lanes:
            per_run = time_flow(mod, spec, args.repeat)
            results[name][label] = per_run
            print(f"{name:>7}: {label:<28} {per_run * 1e3:9.2f} ms/run")
        if len(lanes) == 2:
            speedup = results["python"][label] / results["cython"][label]
            print(f"{'':>7}  -> speedup {speedup:.1f}x")


if __name__ == "__main__":
    main()
