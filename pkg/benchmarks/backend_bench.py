"""Wall-time comparison of the compiled and pure-Python simulation engines.

Both engines consume identical pre-drawn random variates, so besides timing
the script asserts that every statistic agrees bit for bit.

Usage: python benchmarks/backend_bench.py [--completions N] [--repeats K]
"""

import argparse
import time

from parq.network import build_feedback, build_parallel_method_b, build_tandem
from parq.sim import SimConfig, active_backend, simulate


def scenarios(completions):
    yield "parallel m=4", SimConfig(
        seed=42, topology=build_parallel_method_b(2.0, 0.25, 4),
        measured_completions=completions)
    yield "tandem m=4", SimConfig(
        seed=42, topology=build_tandem(2.0, [0.0625] * 4),
        measured_completions=completions)
    yield "feedback V=4", SimConfig(
        seed=42, topology=build_feedback(2.0, 0.0625, 4),
        measured_completions=completions)


def best_of(repeats, config, backend):
    best = float("inf")
    stats = None
    for _ in range(repeats):
        started = time.perf_counter()
        stats = simulate(config, backend=backend)
        best = min(best, time.perf_counter() - started)
    return best, stats


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--completions", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if active_backend() != "c":
        parser.error("compiled engine is not available; build it first")

    print(f"{args.completions} measured completions, best of {args.repeats}")
    print(f"{'scenario':<16}{'compiled':>12}{'python':>12}{'speedup':>10}")
    for name, config in scenarios(args.completions):
        t_c, s_c = best_of(args.repeats, config, "c")
        t_py, s_py = best_of(args.repeats, config, "python")
        assert s_c == s_py, f"{name}: backends disagree"
        print(f"{name:<16}{t_c * 1e3:>10.1f}ms{t_py * 1e3:>10.1f}ms"
              f"{t_py / t_c:>9.1f}x")
    print("all statistics bit-identical across backends")


if __name__ == "__main__":
    main()
