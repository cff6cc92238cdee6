"""Discrete-event simulation of the open network topologies.

Every random variate is drawn up front from counter-based Philox
streams, then replayed through a single-clock FIFO event loop.  The
loop lives in a compiled extension when available, with a pure-Python
twin that consumes the same draws in the same order, so the statistics
of a run are bit-identical across engines.

Stream derivation from the run seed:

* ``Philox(key=(seed, 0))`` interarrival gaps
* ``Philox(key=(seed, 1))`` branching: routing picks for parallel
  arrays, visit counts for feedback queues
* ``Philox(key=(seed, 2 + k))`` service draws for node ``k``,
  consumed in service-start order

A parallel array is simulated physically: each arrival is routed to
queue ``k`` with probability ``phi_k`` (``1/m`` when homogeneous), so
per-queue streams stay Poisson.  A feedback queue draws each job's
visit count from the geometric distribution with mean ``visits``, the
branching model under which its analytic residence is exact.
"""

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats

from ..errors import SaturationError, SimulationError
from ..network import FeedbackQueue, OpenNetwork, ParallelArray, TandemChain
from ..routing import HeterogeneousArray, RoutingVector

from . import _engine_py

try:
    from . import _engine
except ImportError:
    _engine = None

MIN_MEASURED = 1_000
BATCHES = 20
# two-sided 95% t quantile at BATCHES - 1 degrees of freedom
_T95 = float(_scipy_stats.t.ppf(0.975, BATCHES - 1))


@dataclass(frozen=True)
class RoutedParallel:
    """A heterogeneous parallel array under a fixed routing vector."""

    array: HeterogeneousArray
    routing: RoutingVector

    def __post_init__(self):
        if len(self.routing) != len(self.array):
            raise ValueError(
                f"routing has {len(self.routing)} fractions for "
                f"{len(self.array)} queues"
            )


@dataclass(frozen=True)
class SimConfig:
    """One reproducible run: the seed fully determines the result."""

    seed: int
    topology: object
    measured_completions: int
    warmup_completions: int = None

    def __post_init__(self):
        if self.warmup_completions is None:
            object.__setattr__(
                self, "warmup_completions", self.measured_completions // 10
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        if self.measured_completions < MIN_MEASURED:
            raise ValueError(
                f"measured_completions must be >= {MIN_MEASURED}, "
                f"got {self.measured_completions}"
            )
        if self.warmup_completions < 0:
            raise ValueError(
                f"warmup_completions must be >= 0, "
                f"got {self.warmup_completions}"
            )


@dataclass(frozen=True)
class SimStats:
    """Measured residence time with a batch-means confidence interval.

    ``completions`` counts measured completions only; the per-node
    arrival and completion tallies cover the whole run including
    warmup and drain.
    """

    mean_residence: float
    half_width_95: float
    per_node_utilization: tuple
    completions: int
    arrivals_per_node: tuple
    completions_per_node: tuple


@dataclass(frozen=True)
class Comparison:
    """Analytic value against the simulated interval for one topology."""

    analytic_residence: float
    stats: SimStats
    passed: bool


@dataclass(frozen=True)
class _Plan:
    tandem: int
    arrival_rate: float
    service_times: tuple
    fractions: tuple
    mean_visits: int


def _plan(topology):
    # normalize any accepted topology to one routing rule + rates
    if isinstance(topology, RoutedParallel):
        lam = topology.array.agg_rate
        return _Plan(
            0, lam, topology.array.service_times,
            topology.routing.fractions, 1,
        )
    if not isinstance(topology, OpenNetwork):
        raise SimulationError(
            f"cannot simulate topology of type {type(topology).__name__}"
        )
    lam = topology.arrival_rate
    inner = topology.topology
    if isinstance(inner, ParallelArray):
        m = inner.m
        return _Plan(0, lam, (inner.service_time,) * m, (1.0 / m,) * m, 1)
    if isinstance(inner, TandemChain):
        if any(node.visits != 1 for node in inner.nodes):
            raise SimulationError(
                "tandem stages with visit counts other than 1 are not "
                "simulable; model repeated visits as a feedback queue"
            )
        times = tuple(node.service_time for node in inner.nodes)
        return _Plan(1, lam, times, (1.0,) + (0.0,) * (len(times) - 1), 1)
    if isinstance(inner, FeedbackQueue):
        # builders mirror the visit count onto the node for the solver
        if inner.node.visits not in (1, inner.visits):
            raise SimulationError(
                "feedback node visit count contradicts the queue's"
            )
        return _Plan(0, lam, (inner.node.service_time,), (1.0,), inner.visits)
    raise SimulationError(
        f"cannot simulate topology of type {type(inner).__name__}"
    )


def _check_stable(plan):
    if plan.arrival_rate <= 0:
        raise SimulationError("arrival rate must be > 0: nothing to measure")
    if plan.tandem:
        loads = [plan.arrival_rate * s for s in plan.service_times]
    else:
        loads = [
            p * plan.arrival_rate * s * plan.mean_visits
            for p, s in zip(plan.fractions, plan.service_times)
        ]
    for k, rho in enumerate(loads):
        if rho >= 1.0:
            raise SaturationError(rho, node=f"node {k + 1}")


def _stream(seed, index):
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw(plan, seed, n):
    # all variates come from here; the engines only replay them
    k_nodes = len(plan.service_times)
    gaps = _stream(seed, 0).exponential(1.0 / plan.arrival_rate, size=n)
    arr_times = np.cumsum(gaps)

    branch = _stream(seed, 1)
    if plan.tandem:
        routes = np.zeros(n, dtype=np.int64)
        visits = np.ones(n, dtype=np.int64)
        per_node = [n] * k_nodes
    elif plan.mean_visits > 1:
        routes = np.zeros(n, dtype=np.int64)
        visits = branch.geometric(1.0 / plan.mean_visits, size=n)
        visits = visits.astype(np.int64)
        per_node = [int(visits.sum())]
    else:
        edges = np.cumsum(np.asarray(plan.fractions, dtype=np.float64))
        edges[-1] = 1.0  # guard the top edge against rounding
        routes = np.searchsorted(edges, branch.random(n), side="right")
        routes = routes.astype(np.int64)
        per_node = np.bincount(routes, minlength=k_nodes).tolist()
        visits = np.ones(n, dtype=np.int64)

    draws = [
        _stream(seed, 2 + k).exponential(plan.service_times[k], size=c)
        for k, c in enumerate(per_node)
    ]
    services = np.concatenate(draws)
    offsets = np.zeros(k_nodes, dtype=np.int64)
    np.cumsum([len(d) for d in draws[:-1]], out=offsets[1:])
    return arr_times, routes, visits, services, offsets


def _resolve_backend(name):
    if name is None:
        name = os.environ.get("PARQ_SIM_BACKEND", "auto")
    name = name.strip().lower()
    if name == "auto":
        name = "c" if _engine is not None else "python"
    if name == "python":
        return _engine_py, "python"
    if name == "c":
        if _engine is None:
            raise SimulationError("compiled engine is not available")
        return _engine, "c"
    raise ValueError(f"unknown simulation backend {name!r}")


def active_backend():
    """Name of the engine simulate() uses by default: 'c' or 'python'."""
    return _resolve_backend(None)[1]


def simulate(config, backend=None):
    """Run one simulation and return its :class:`SimStats`.

    ``backend`` forces an engine ('c' or 'python'); by default the
    compiled engine is used when built, honoring the PARQ_SIM_BACKEND
    environment variable.
    """
    plan = _plan(config.topology)
    _check_stable(plan)
    engine, _ = _resolve_backend(backend)

    n = config.warmup_completions + config.measured_completions
    arr_times, routes, visits, services, offsets = _draw(
        plan, config.seed, n
    )
    res, snap_w, snap_e, t_w, t_e, arrivals, completions = engine.run(
        plan.tandem, len(plan.service_times), arr_times, routes, visits,
        services, offsets, config.warmup_completions,
    )

    window = t_e - t_w
    if window <= 0:
        raise SimulationError(
            "warmup outlasted the arrival horizon; shrink warmup or "
            "measure more completions"
        )
    measured = res[config.warmup_completions:]
    batch_means = np.array(
        [batch.mean() for batch in np.array_split(measured, BATCHES)]
    )
    half_width = _T95 * batch_means.std(ddof=1) / math.sqrt(BATCHES)
    util = tuple(
        min(max(float(b) / window, 0.0), 1.0) for b in snap_e - snap_w
    )
    return SimStats(
        mean_residence=float(measured.mean()),
        half_width_95=float(half_width),
        per_node_utilization=util,
        completions=config.measured_completions,
        arrivals_per_node=tuple(int(c) for c in arrivals),
        completions_per_node=tuple(int(c) for c in completions),
    )


def analytic_residence(topology):
    """Mean residence the analytic model predicts for a simulable topology."""
    plan = _plan(topology)
    _check_stable(plan)
    if plan.tandem:
        return math.fsum(
            s / (1.0 - plan.arrival_rate * s) for s in plan.service_times
        )
    demand = plan.service_times[0] * plan.mean_visits
    if plan.mean_visits > 1:
        return demand / (1.0 - plan.arrival_rate * demand)
    return math.fsum(
        p * s / (1.0 - p * plan.arrival_rate * s)
        for p, s in zip(plan.fractions, plan.service_times)
    )


def compare_analytic(config, backend=None):
    """Simulate and check the analytic value against the measured interval.

    Passes when the analytic residence lies inside the 95% confidence
    interval or within 2% relative of the simulated mean, whichever
    is looser.
    """
    analytic = analytic_residence(config.topology)
    run_stats = simulate(config, backend=backend)
    gap = abs(analytic - run_stats.mean_residence)
    passed = gap <= max(run_stats.half_width_95, 0.02 * analytic)
    return Comparison(
        analytic_residence=analytic, stats=run_stats, passed=passed
    )
