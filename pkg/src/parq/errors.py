"""Exception hierarchy shared by all parq modules.

The CLI maps these onto exit statuses: model/validation problems exit 1,
saturation and infeasibility exit 2, optimizer non-convergence exit 3.
"""


class ParqError(Exception):
    """Base class for all parq errors."""


class ModelError(ParqError):
    """Invalid model input: bad file syntax, unknown keys, bad values."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SaturationError(ParqError):
    """A queue is driven at or beyond its service capacity (rho >= 1)."""

    def __init__(self, utilization, node=None):
        self.utilization = utilization
        self.node = node
        where = f" at node '{node}'" if node else ""
        super().__init__(
            f"saturated queue{where}: utilization {utilization:.6g} >= 1"
        )


class InfeasibleError(ParqError):
    """No stable routing exists: arrival rate exceeds total capacity."""

    def __init__(self, arrival_rate, capacity):
        self.arrival_rate = arrival_rate
        self.capacity = capacity
        super().__init__(
            f"arrival rate {arrival_rate:.6g} exceeds total capacity "
            f"{capacity:.6g}; no stable routing exists"
        )


class ConvergenceError(ParqError):
    """Iterative optimization hit its iteration cap before converging."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SimulationError(ParqError):
    """Simulation run rejected or failed (unstable topology, clock overflow)."""
