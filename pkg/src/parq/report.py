"""Fixed-width text reports and CSV sweep profiles.

Every value is formatted from the solver outputs at render time;
formatting never feeds back into any computation.
"""

import io
import csv
import math

import numpy as np

from .errors import InfeasibleError
from . import mm1
from .routing import STABILITY_MARGIN

_ROW = "{:<16}{:<13}{:<10}{:>13}   {}"


def report_row(metric, resource, work, value, unit):
    """One report line in the Metric/Resource/Work/Value/Unit grid."""
    return _ROW.format(metric, resource, work, value, unit)


def _header():
    return [
        report_row("Metric", "Resource", "Work", "Value", "Unit"),
        report_row("------", "--------", "----", "-----", "----"),
    ]


def render_solution(solution):
    """Per-node metric blocks plus a system summary line."""
    workload = solution.workload_name
    lines = _header()
    for name, node in solution.nodes.items():
        lines.append("")
        lines.append(report_row("Capacity", name, workload, "1", "Servers"))
        lines.append(report_row(
            "Throughput", name, workload,
            f"{node.throughput:.4f}", f"{workload}/Sec",
        ))
        lines.append(report_row(
            "Utilization", name, workload,
            f"{node.utilization * 100.0:.4f}", "Percent",
        ))
        lines.append(report_row(
            "Queue length", name, workload,
            f"{node.queue_length:.4f}", workload,
        ))
        lines.append(report_row(
            "Residence time", name, workload,
            f"{node.residence_time:.4f}", "Sec",
        ))
    lines.append("")
    lines.append(report_row(
        "Residence time", "System", workload,
        f"{solution.system_residence:.4f}", "Sec",
    ))
    return "\n".join(lines) + "\n"


def render_optimum(service_times, optimum):
    """Routing table: queue index, service time, fraction (6 d.p.)."""
    lines = [
        f"{'Queue':<8}{'ServiceTime':>14}{'Fraction':>13}",
        f"{'-----':<8}{'-----------':>14}{'--------':>13}",
    ]
    for k, (s, phi) in enumerate(
        zip(service_times, optimum.routing.fractions), start=1
    ):
        lines.append(f"{k:<8}{s:>14.6f}{phi:>13.6f}")
    m = len(service_times)
    lines.append("")
    lines.append(f"R*_{m} = {optimum.response_time:.6f} Sec")
    lines.append(f"Iterations = {optimum.iterations}")
    return "\n".join(lines) + "\n"


def render_equivalence(agg_rate, service_time, m):
    """Residence of the three rewritings of one workload, with differences."""
    r_para = mm1.parallel_array_residence(agg_rate, service_time, m)
    r_serial = mm1.tandem_residence(agg_rate, service_time, m)
    r_feedback = mm1.feedback_residence(agg_rate, service_time / m, m)
    lines = [
        f"{'Topology':<26}{'Residence':>14}",
        f"{'--------':<26}{'---------':>14}",
        f"{'Parallel array':<26}{r_para:>14.9f}",
        f"{'Tandem chain':<26}{r_serial:>14.9f}",
        f"{'Feedback queue':<26}{r_feedback:>14.9f}",
        "",
        f"|parallel - tandem|   = {abs(r_para - r_serial):.3e}",
        f"feedback - tandem     = {r_feedback - r_serial:.6f}",
    ]
    identical = abs(r_para - r_serial) <= 1e-12 * abs(r_serial)
    return "\n".join(lines) + "\n", identical


def render_comparison(comparison):
    """Analytic value against the simulated interval, with the verdict."""
    stats = comparison.stats
    low = stats.mean_residence - stats.half_width_95
    high = stats.mean_residence + stats.half_width_95
    util = "  ".join(f"{u:.4f}" for u in stats.per_node_utilization)
    lines = [
        f"Analytic residence   = {comparison.analytic_residence:.6f} Sec",
        f"Simulated mean       = {stats.mean_residence:.6f} Sec",
        f"95% CI               = [{low:.6f}, {high:.6f}]",
        f"Measured completions = {stats.completions}",
        f"Node utilization     = {util}",
        f"Verdict              = {'PASS' if comparison.passed else 'FAIL'}",
    ]
    return "\n".join(lines) + "\n"


def stable_fraction_interval(agg_rate, fast, slow):
    """The open interval of fractions keeping both queues stable."""
    if agg_rate >= 1.0 / fast + 1.0 / slow:
        raise InfeasibleError(agg_rate, 1.0 / fast + 1.0 / slow)
    lo = max(0.0, 1.0 - 1.0 / (agg_rate * slow))
    hi = min(1.0, 1.0 / (agg_rate * fast))
    inset = (hi - lo) * STABILITY_MARGIN
    if lo > 0.0:
        lo += inset
    if hi < 1.0:
        hi -= inset
    return lo, hi


def sweep_rows(agg_rate, fast, slow, steps):
    """Routing sweep rows (phi, fast component, slow component, total)."""
    lo, hi = stable_fraction_interval(agg_rate, fast, slow)
    rows = []
    for phi in np.linspace(lo, hi, steps):
        phi = float(phi)
        r_fast = phi * fast / (1.0 - phi * agg_rate * fast)
        r_slow = ((1.0 - phi) * slow
                  / (1.0 - (1.0 - phi) * agg_rate * slow))
        rows.append((phi, r_fast, r_slow, r_fast + r_slow))
    return rows


def render_sweep_csv(rows):
    """CSV text: header plus one row per grid point, '.' decimals."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["phi", "fast_component", "slow_component", "total"])
    for row in rows:
        writer.writerow([repr(v) for v in row])
    return buffer.getvalue()
