"""Shipping gate: ten end-to-end guarantees, one verdict line each.

Every test prints ``PASS``/``FAIL`` with the measured numbers so the suite
output doubles as a release checklist. Tolerances and runtime budgets are
asserted, not just reported.
"""

import time

import numpy as np

from parq import (
    HeterogeneousArray,
    RoutingVector,
    SimConfig,
    build_parallel_method_b,
    build_tandem,
    compare_analytic,
    feedback_residence,
    gradient,
    optimize_dual,
    optimize_m,
    parallel_array_residence,
    parallelize_transform,
    solve,
    tandem_residence,
)
from parq.report import render_solution


def _verdict(name, passed, detail):
    print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    assert passed, f"{name}: {detail}"


def test_01_parallel_equals_fast_serial():
    rng = np.random.default_rng(1)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(1, 65))
        service = float(10.0 ** rng.uniform(-4, 1))
        load = float(rng.uniform(1e-6, 0.999))
        rate = load * m / service
        para = parallel_array_residence(rate, service, m)
        serial = tandem_residence(rate, service, m)
        worst = max(worst, abs(para - serial) / serial)
    elapsed = time.perf_counter() - started
    _verdict(
        "parallel array == m-times-faster tandem",
        worst <= 1e-12 and elapsed < 1.0,
        f"1000 tuples, worst relative gap {worst:.3e}, {elapsed * 1e3:.0f} ms",
    )


def test_02_four_queue_report_fields():
    report = render_solution(solve(build_parallel_method_b(2.0, 0.25, 4)))
    lines = report.splitlines()
    expected = []
    for k in range(1, 5):
        name = f"ParaQ{k}"
        expected += [
            f"Throughput      {name:<13}Requests         0.5000   Requests/Sec",
            f"Utilization     {name:<13}Requests        12.5000   Percent",
            f"Queue length    {name:<13}Requests         0.1429   Requests",
        ]
    missing = [row for row in expected if row not in lines]
    _verdict(
        "four-queue report renders exact per-node fields",
        not missing,
        "12/12 rows exact" if not missing else f"missing {missing[0]!r}",
    )


def test_03_two_queue_optimum():
    started = time.perf_counter()
    optimum = optimize_dual(166.67, 0.005, 0.015)
    elapsed = time.perf_counter() - started
    phi = optimum.routing.fractions[0]
    array = HeterogeneousArray((0.005, 0.015), 166.67)
    g = gradient(array, optimum.routing)
    balance = abs(g[0] - g[1])
    ok = (
        abs(phi - 0.819612) <= 1e-4
        and abs(optimum.response_time - 0.017857) <= 1e-5
        and balance < 1e-6
        and elapsed < 0.1
    )
    _verdict(
        "two-queue split optimum",
        ok,
        f"phi={phi:.6f}, R*={optimum.response_time:.6f}, "
        f"|g1-g2|={balance:.2e}, {elapsed * 1e3:.1f} ms",
    )


def test_04_four_queue_optimum():
    array = HeterogeneousArray((0.005, 0.015, 0.020, 0.020), 166.67)
    optimum = optimize_m(array)
    phi = optimum.routing.fractions
    targets = (0.73442, 0.13119, 0.06719, 0.06719)
    gaps = [abs(p - t) for p, t in zip(phi, targets)]
    ok = (
        max(gaps) <= 1e-4
        and phi[2] == phi[3]
        and abs(optimum.response_time - 0.0158568) <= 1e-5
    )
    _verdict(
        "four-queue split optimum",
        ok,
        f"phi=({phi[0]:.5f}, {phi[1]:.5f}, {phi[2]:.5f}, {phi[3]:.5f}), "
        f"R*={optimum.response_time:.7f}, worst gap {max(gaps):.1e}",
    )


def test_05_parallelize_rewrite_divides_by_m():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(2, 33))
        stage = float(10.0 ** rng.uniform(-3, 0))
        load = float(rng.uniform(0.01, 0.99))
        rate = load / stage  # per-stage utilization of the chain
        serial = build_tandem(rate, [stage] * m)
        parallel = parallelize_transform(serial, keep_stage_load=True)
        r_serial = solve(serial).system_residence
        r_parallel = solve(parallel).system_residence
        worst = max(worst, abs(r_parallel - r_serial / m) / (r_serial / m))
    _verdict(
        "stage-load-preserving rewrite cuts residence by exactly m",
        worst <= 1e-12,
        f"100 random chains, worst relative gap {worst:.3e}",
    )


def test_06_feedback_exceeds_tandem():
    rng = np.random.default_rng(6)
    margin = float("inf")
    for _ in range(500):
        m = int(rng.integers(2, 65))
        service = float(10.0 ** rng.uniform(-4, 1))
        # the revisited queue carries the whole demand S, so lambda*S < 1
        load = float(rng.uniform(1e-6, 0.999))
        rate = load / service
        fed = feedback_residence(rate, service / m, m)
        serial = tandem_residence(rate, service, m)
        margin = min(margin, fed - serial)
    _verdict(
        "revisiting one queue is strictly slower than a chain",
        margin > 0.0,
        f"500 stable tuples with m >= 2, smallest excess {margin:.3e} Sec",
    )


def test_07_simulation_confirms_the_identity():
    started = time.perf_counter()
    parallel = compare_analytic(
        SimConfig(seed=42, topology=build_parallel_method_b(2.0, 0.25, 4),
                  measured_completions=200_000)
    )
    tandem = compare_analytic(
        SimConfig(seed=42, topology=build_tandem(2.0, [0.0625] * 4),
                  measured_completions=200_000)
    )
    elapsed = time.perf_counter() - started
    analytic = 2.0 / 7.0
    inside = all(
        abs(side.stats.mean_residence - analytic) <= side.stats.half_width_95
        for side in (parallel, tandem)
    )
    gap = abs(parallel.stats.mean_residence - tandem.stats.mean_residence)
    overlap = gap <= parallel.stats.half_width_95 + tandem.stats.half_width_95
    _verdict(
        "simulation confirms the equivalence",
        inside and overlap and elapsed < 10.0,
        f"parallel {parallel.stats.mean_residence:.6f}"
        f"+-{parallel.stats.half_width_95:.6f}, "
        f"tandem {tandem.stats.mean_residence:.6f}"
        f"+-{tandem.stats.half_width_95:.6f}, "
        f"analytic {analytic:.6f}, {elapsed:.1f} s",
    )


def _grid_objective(rate, services, phi1, phi2):
    """Raw three-queue response time on a (phi1, phi2) grid, inf if unstable."""
    phi3 = 1.0 - phi1 - phi2
    total = np.zeros_like(phi1)
    stable = phi3 >= 0.0
    for phi, s in zip((phi1, phi2, phi3), services):
        x = phi * rate * s
        stable = stable & (x < 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            total = total + phi * s / (1.0 - x)
    return np.where(stable, total, np.inf)


def _grid_argmin(rate, services, lo1, hi1, lo2, hi2, step):
    axis1 = np.arange(lo1, hi1 + step / 2, step)
    axis2 = np.arange(lo2, hi2 + step / 2, step)
    phi1, phi2 = np.meshgrid(axis1, axis2, indexing="ij")
    flat = np.argmin(_grid_objective(rate, services, phi1, phi2))
    i, j = np.unravel_index(flat, phi1.shape)
    return float(axis1[i]), float(axis2[j])


def test_08_optimizer_matches_grid_search():
    rng = np.random.default_rng(8)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        services = tuple(rng.uniform(0.002, 0.02, size=3))
        capacity = sum(1.0 / s for s in services)
        rate = float(rng.uniform(0.3, 0.9)) * capacity
        optimum = optimize_m(HeterogeneousArray(services, rate))

        coarse1, coarse2 = _grid_argmin(rate, services, 0.0, 1.0, 0.0, 1.0, 1e-3)
        fine1, fine2 = _grid_argmin(
            rate, services,
            max(0.0, coarse1 - 2e-3), min(1.0, coarse1 + 2e-3),
            max(0.0, coarse2 - 2e-3), min(1.0, coarse2 + 2e-3),
            1e-5,
        )
        grid_phi = (fine1, fine2, 1.0 - fine1 - fine2)
        gaps = [abs(a - b) for a, b in zip(optimum.routing.fractions, grid_phi)]
        worst = max(worst, max(gaps))
    elapsed = time.perf_counter() - started
    _verdict(
        "optimizer agrees with exhaustive grid search",
        worst <= 5e-4 and elapsed < 30.0,
        f"20 three-queue instances, worst per-fraction gap {worst:.2e}, "
        f"{elapsed:.1f} s",
    )


def test_09_long_pipeline_residence():
    solution = solve(build_tandem(1.0, [0.001] * 300))
    residence = solution.system_residence
    _verdict(
        "300-stage millisecond pipeline reports ~300 ms",
        abs(residence - 0.300) <= 0.003,
        f"system residence {residence * 1e3:.4f} ms at 1 request/Sec",
    )


def test_10_gradient_matches_finite_differences():
    rng = np.random.default_rng(10)
    worst = 0.0
    checked = 0
    while checked < 20:
        m = int(rng.integers(2, 7))
        services = rng.uniform(0.001, 0.05, size=m)
        raw = rng.uniform(0.05, 1.0, size=m)
        phi = raw / raw.sum()
        capacity = float(np.sum(1.0 / services))
        rate = float(rng.uniform(0.1, 0.8)) * capacity
        x = phi * rate * services
        if np.max(x) >= 0.9:  # keep FD probes well inside the stable region
            continue
        checked += 1
        array = HeterogeneousArray(tuple(services), rate)
        analytic = gradient(array, RoutingVector(tuple(phi)))

        def local(k, value):
            return value * services[k] / (1.0 - value * rate * services[k])

        step = 1e-7
        for k in range(m):
            fd = (local(k, phi[k] + step) - local(k, phi[k] - step)) / (2 * step)
            worst = max(worst, abs(analytic[k] - fd) / abs(fd))
    _verdict(
        "analytic gradient matches central differences",
        worst <= 1e-5,
        f"20 random stable points, worst relative gap {worst:.2e}",
    )
