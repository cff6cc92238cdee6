"""Analytic solver, routing optimizer, and simulation oracle for open
networks of M/M/1 queues.

The closed forms live in :mod:`parq.mm1`, network construction and
rewriting in :mod:`parq.network`, routing optimization in
:mod:`parq.routing`, the discrete-event oracle in :mod:`parq.sim`, and
the ``parq`` command line in :mod:`parq.cli`.
"""

from .errors import (
    ConvergenceError,
    InfeasibleError,
    ModelError,
    ParqError,
    SaturationError,
    SimulationError,
)
from .mm1 import (
    feedback_residence,
    mm1_residence,
    parallel_array_residence,
    queue_length,
    tandem_residence,
    utilization,
)
from .network import (
    FeedbackQueue,
    Metrics,
    OpenNetwork,
    ParallelArray,
    QueueNode,
    SolutionReport,
    TandemChain,
    build_feedback,
    build_parallel_method_a,
    build_parallel_method_b,
    build_tandem,
    parallelize_transform,
    serialize_transform,
    solve,
)
from .routing import (
    HeterogeneousArray,
    Optimum,
    RoutingVector,
    feasibility,
    gradient,
    objective,
    optimize_dual,
    optimize_m,
)
from .sim import (
    Comparison,
    RoutedParallel,
    SimConfig,
    SimStats,
    compare_analytic,
    simulate,
)

__version__ = "0.1.0"
