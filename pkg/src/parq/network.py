"""Open queueing network construction, solution, and rewriting transforms.

A network is an aggregate Poisson arrival stream plus one topology:

* :class:`ParallelArray` -- m homogeneous queues side by side, the stream
  split equally. Two construction methods exist: method "a" models a single
  representative queue at the fractional rate lambda/m, method "b"
  enumerates all m queues with fractional service times S/m under the
  global rate. Both solve to the same system residence time.
* :class:`TandemChain` -- queues in series, every request visits each stage.
* :class:`FeedbackQueue` -- a single queue revisited V times per request.

Networks are immutable after construction and :func:`solve` is pure, so
concurrent use needs no locking.
"""

from dataclasses import dataclass, field

from . import mm1
from .errors import SaturationError

__all__ = [
    "QueueNode",
    "ParallelArray",
    "TandemChain",
    "FeedbackQueue",
    "OpenNetwork",
    "Metrics",
    "SolutionReport",
    "build_parallel_method_a",
    "build_parallel_method_b",
    "build_tandem",
    "build_feedback",
    "solve",
    "serialize_transform",
    "parallelize_transform",
]

PARALLEL_PREFIX = "ParaQ"
SERIAL_PREFIX = "SerQ"
FEEDBACK_PREFIX = "FbkQ"


@dataclass(frozen=True)
class QueueNode:
    """One service facility: a name, a mean service time, a visit count."""

    name: str
    service_time: float
    visits: int = 1

    def __post_init__(self):
        if self.service_time <= 0:
            raise ValueError(
                f"node '{self.name}': service_time must be > 0, "
                f"got {self.service_time}"
            )
        if int(self.visits) != self.visits or self.visits < 1:
            raise ValueError(
                f"node '{self.name}': visits must be a positive integer, "
                f"got {self.visits}"
            )

    @property
    def demand(self):
        """Total service demand over all visits, D = V * S."""
        return self.visits * self.service_time


@dataclass(frozen=True)
class ParallelArray:
    """m homogeneous parallel queues, each with per-queue service time S."""

    m: int
    service_time: float
    method: str = "b"
    prefix: str = PARALLEL_PREFIX

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"parallel array needs m >= 1, got {self.m}")
        if self.service_time <= 0:
            raise ValueError(
                f"service_time must be > 0, got {self.service_time}"
            )
        if self.method not in ("a", "b"):
            raise ValueError(f"method must be 'a' or 'b', got {self.method!r}")


@dataclass(frozen=True)
class TandemChain:
    """Ordered queues in series; every request traverses all of them."""

    nodes: tuple

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("tandem chain must contain at least one node")
        names = [n.name for n in self.nodes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate node names in chain: {names}")


@dataclass(frozen=True)
class FeedbackQueue:
    """A single queue each request revisits ``visits`` times before leaving."""

    node: QueueNode
    visits: int

    def __post_init__(self):
        if int(self.visits) != self.visits or self.visits < 1:
            raise ValueError(
                f"feedback queue needs visits >= 1, got {self.visits}"
            )


@dataclass(frozen=True)
class OpenNetwork:
    """An open network: aggregate arrival rate plus one topology."""

    workload_name: str
    arrival_rate: float
    topology: object

    def __post_init__(self):
        if self.arrival_rate < 0:
            raise ValueError(
                f"arrival_rate must be >= 0, got {self.arrival_rate}"
            )


@dataclass(frozen=True)
class Metrics:
    """Per-node analytic metrics of a solved network."""

    utilization: float
    residence_time: float
    queue_length: float
    throughput: float


@dataclass(frozen=True)
class SolutionReport:
    """Per-node metrics keyed by node name plus the system-level totals."""

    workload_name: str
    nodes: dict = field(compare=False)
    system_residence: float = 0.0
    system_throughput: float = 0.0


def build_parallel_method_a(agg_rate, service_time, m, workload="Requests"):
    """Parallel array modelled through one representative queue.

    The single queue receives the fractional arrival rate lambda/m and the
    full per-queue service time S; solving reports the whole array by
    symmetry, with the system throughput aggregated back to lambda.
    """
    return OpenNetwork(
        workload, agg_rate, ParallelArray(m, service_time, method="a")
    )


def build_parallel_method_b(agg_rate, service_time, m, workload="Requests"):
    """Parallel array modelled as m enumerated queues under the global rate.

    Each queue k = 1..m is named ``ParaQ<k>`` and parameterized with the
    fractional service time S/m while seeing the aggregate rate, the safer
    encoding when the array sits inside a larger network.
    """
    return OpenNetwork(
        workload, agg_rate, ParallelArray(m, service_time, method="b")
    )


def build_tandem(agg_rate, stage_times, workload="Requests", prefix=SERIAL_PREFIX):
    """Tandem chain with the given per-stage service times, in order."""
    nodes = tuple(
        QueueNode(f"{prefix}{k}", s) for k, s in enumerate(stage_times, start=1)
    )
    return OpenNetwork(workload, agg_rate, TandemChain(nodes))


def build_feedback(agg_rate, stage_service_time, visits, workload="Requests"):
    """Single queue with ``visits`` passes per request."""
    node = QueueNode(f"{FEEDBACK_PREFIX}1", stage_service_time, visits=visits)
    return OpenNetwork(workload, agg_rate, FeedbackQueue(node, visits))


def _node_metrics(local_rate, demand, reported_throughput, name):
    rho = local_rate * demand
    if rho >= 1.0:
        raise SaturationError(rho, node=name)
    return Metrics(
        utilization=rho,
        residence_time=demand / (1.0 - rho),
        queue_length=mm1.queue_length(rho),
        throughput=reported_throughput,
    )


def solve(network):
    """Solve an open network into a per-node and system-level report.

    Raises :class:`SaturationError` naming the first node whose implied
    utilization reaches 1. In parallel-array reports the per-node throughput
    is the per-queue share lambda/m under either construction method.
    """
    lam = network.arrival_rate
    topo = network.topology
    nodes = {}

    if isinstance(topo, ParallelArray):
        share = lam / topo.m
        if topo.method == "a":
            # One representative queue at the fractional arrival rate.
            name = f"{topo.prefix}1"
            nodes[name] = _node_metrics(share, topo.service_time, share, name)
            system_residence = nodes[name].residence_time
        else:
            # m enumerated queues, fractional service times, global rate.
            stage = topo.service_time / topo.m
            for k in range(1, topo.m + 1):
                name = f"{topo.prefix}{k}"
                nodes[name] = _node_metrics(lam, stage, share, name)
            system_residence = topo.m * next(iter(nodes.values())).residence_time
        return SolutionReport(network.workload_name, nodes, system_residence, lam)

    if isinstance(topo, TandemChain):
        system_residence = 0.0
        for node in topo.nodes:
            nodes[node.name] = _node_metrics(
                lam, node.demand, lam * node.visits, node.name
            )
            system_residence += nodes[node.name].residence_time
        return SolutionReport(network.workload_name, nodes, system_residence, lam)

    if isinstance(topo, FeedbackQueue):
        demand = topo.visits * topo.node.service_time
        name = topo.node.name
        nodes[name] = _node_metrics(lam, demand, lam * topo.visits, name)
        return SolutionReport(
            network.workload_name, nodes, nodes[name].residence_time, lam
        )

    raise TypeError(f"unsupported topology: {type(topo).__name__}")


def serialize_transform(parallel):
    """Rewrite a homogeneous parallel array as its equivalent tandem chain.

    The m parallel queues of per-queue service time S become m tandem
    stages of service time S/m under the same aggregate rate; both networks
    solve to the same system residence time. Anything other than a
    homogeneous :class:`ParallelArray` is rejected.
    """
    topo = parallel.topology
    if not isinstance(topo, ParallelArray):
        raise ValueError(
            "serialize_transform requires a homogeneous parallel array, "
            f"got {type(topo).__name__}"
        )
    stage = topo.service_time / topo.m
    return build_tandem(
        parallel.arrival_rate,
        [stage] * topo.m,
        workload=parallel.workload_name,
    )


def parallelize_transform(serial, keep_stage_load):
    """Rewrite a homogeneous tandem chain as a parallel array of its stages.

    Each of the m stages (stage time s) becomes one parallel queue with the
    same service time s.

    With ``keep_stage_load=True`` every queue keeps the per-queue
    utilization lambda*s it had as a stage, i.e. each queue still sees the
    full rate lambda (the aggregate rate of the array is m*lambda), and the
    system residence time of the result is exactly 1/m of the input's.

    With ``keep_stage_load=False`` the original aggregate rate is split m
    ways instead; the factor-m speedup then holds only in the zero-load
    limit.
    """
    topo = serial.topology
    if not isinstance(topo, TandemChain):
        raise ValueError(
            "parallelize_transform requires a tandem chain, "
            f"got {type(topo).__name__}"
        )
    stage_times = {n.service_time for n in topo.nodes}
    if len(stage_times) != 1 or any(n.visits != 1 for n in topo.nodes):
        raise ValueError(
            "parallelize_transform requires homogeneous single-visit stages"
        )
    m = len(topo.nodes)
    stage = topo.nodes[0].service_time
    agg = serial.arrival_rate * m if keep_stage_load else serial.arrival_rate
    return OpenNetwork(
        serial.workload_name, agg, ParallelArray(m, stage, method="a")
    )
