"""Closed-form M/M/1 performance formulas.

Every function here is a pure function of scalar inputs, computed in double
precision. A queue driven at utilization >= 1 has no steady state; those
inputs raise :class:`~parq.errors.SaturationError` carrying the offending
utilization instead of returning infinity.

Conventions: ``arrival_rate`` is requests per unit time (lambda),
``service_time`` is time per request (S), and residence time is the mean
total time in the node, waiting plus service.
"""

from .errors import SaturationError

__all__ = [
    "mm1_residence",
    "utilization",
    "parallel_array_residence",
    "tandem_residence",
    "feedback_residence",
    "queue_length",
]


def _check_rate_time(arrival_rate, service_time):
    if arrival_rate < 0:
        raise ValueError(f"arrival_rate must be >= 0, got {arrival_rate}")
    if service_time <= 0:
        raise ValueError(f"service_time must be > 0, got {service_time}")


def _check_count(m, name="m"):
    if int(m) != m or m < 1:
        raise ValueError(f"{name} must be a positive integer, got {m}")


def mm1_residence(arrival_rate, service_time, node=None):
    """Mean residence time S / (1 - lambda * S) of a single M/M/1 queue.

    ``node`` optionally names the queue in the saturation diagnostic.
    """
    _check_rate_time(arrival_rate, service_time)
    rho = arrival_rate * service_time
    if rho >= 1.0:
        raise SaturationError(rho, node=node)
    return service_time / (1.0 - rho)


def utilization(arrival_rate, service_time):
    """Server utilization lambda * S.

    The caller supplies the per-node effective rate and time (e.g. lambda/m
    and S, or lambda and S/m). Values >= 1 are legal outputs here; the
    solvers reject them when a steady state is required.
    """
    _check_rate_time(arrival_rate, service_time)
    return arrival_rate * service_time


def parallel_array_residence(agg_rate, service_time, m):
    """Mean residence time of an array of m parallel queues.

    The aggregate Poisson stream of rate ``agg_rate`` is split equally, so
    each queue is M/M/1 with arrival rate lambda/m and service time S. By
    symmetry the array residence equals the per-queue residence.
    """
    _check_count(m)
    return mm1_residence(agg_rate / m, service_time)


def tandem_residence(agg_rate, total_service_time, m):
    """Mean residence time of m identical tandem stages totalling S.

    Each stage is M/M/1 with the full arrival rate and service time S/m;
    the network residence is the sum over the m stages.
    """
    _check_count(m)
    stage_time = total_service_time / m
    return m * mm1_residence(agg_rate, stage_time)


def feedback_residence(agg_rate, stage_service_time, visits):
    """Mean residence time of a single queue visited ``visits`` times.

    Repeat visits scale the service demand, D = V * S, so the residence is
    D / (1 - lambda * D). For V >= 2 this always exceeds the residence of
    the tandem chain with the same total demand, because the demand sits in
    the denominator rather than multiplying a smaller per-stage term.
    """
    _check_count(visits, "visits")
    demand = visits * stage_service_time
    return mm1_residence(agg_rate, demand)


def queue_length(utilization):
    """Expected number of requests in an M/M/1 node, rho / (1 - rho)."""
    if utilization < 0:
        raise ValueError(f"utilization must be >= 0, got {utilization}")
    if utilization >= 1.0:
        raise SaturationError(utilization)
    return utilization / (1.0 - utilization)
