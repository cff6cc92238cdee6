"""Traffic-routing optimization for heterogeneous parallel queue arrays.

Given m parallel M/M/1 queues with service times S_1..S_m and an aggregate
Poisson arrival rate lambda, find the traffic fractions phi_1..phi_m on the
probability simplex that minimize the mean response time

    R(phi) = sum_k  phi_k * S_k / (1 - phi_k * lambda * S_k).

The objective is smooth, separable, and convex on the stable region, so
projected gradient descent with a backtracking line search converges to the
global optimum; the dual-queue case is solved directly as a scalar root of
the derivative. At an interior optimum every queue that receives traffic
has the same marginal residence time, and queues too slow to be worth using
sit at exactly phi_k = 0.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, InfeasibleError, SaturationError

__all__ = [
    "HeterogeneousArray",
    "RoutingVector",
    "Optimum",
    "Feasibility",
    "objective",
    "gradient",
    "optimize_dual",
    "optimize_m",
    "feasibility",
]

SIMPLEX_TOL = 1e-12
MARGINAL_TOL = 1e-10
MAX_ITERATIONS = 10_000
STABILITY_MARGIN = 1e-9


@dataclass(frozen=True)
class HeterogeneousArray:
    """Parallel queues with per-queue service times and an aggregate rate.

    ``service_times`` keeps the caller's order for reporting;
    :meth:`ascending_order` gives the permutation that sorts them.
    """

    service_times: tuple
    agg_rate: float

    def __post_init__(self):
        object.__setattr__(self, "service_times", tuple(self.service_times))
        if not self.service_times:
            raise ValueError("array needs at least one queue")
        for k, s in enumerate(self.service_times):
            if s <= 0:
                raise ValueError(f"service_times[{k}] must be > 0, got {s}")
        if self.agg_rate < 0:
            raise ValueError(f"agg_rate must be >= 0, got {self.agg_rate}")

    def __len__(self):
        return len(self.service_times)

    def ascending_order(self):
        """Indices that sort the service times ascending (stable on ties)."""
        return tuple(
            sorted(range(len(self.service_times)),
                   key=lambda k: self.service_times[k])
        )


@dataclass(frozen=True)
class RoutingVector:
    """Per-queue traffic fractions on the probability simplex."""

    fractions: tuple

    def __post_init__(self):
        object.__setattr__(self, "fractions", tuple(self.fractions))
        for k, p in enumerate(self.fractions):
            if p < 0.0 or p > 1.0:
                raise ValueError(f"fractions[{k}] out of [0, 1]: {p}")
        total = math.fsum(self.fractions)
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"fractions must sum to 1, got {total!r}")

    def __len__(self):
        return len(self.fractions)


@dataclass(frozen=True)
class Optimum:
    """Result of a routing optimization."""

    routing: RoutingVector
    response_time: float
    iterations: int
    converged: bool


class Feasibility(NamedTuple):
    feasible: bool
    capacity: float


def _arrays(array, routing):
    if len(routing) != len(array):
        raise ValueError(
            f"routing has {len(routing)} fractions for {len(array)} queues"
        )
    phi = np.asarray(routing.fractions, dtype=float)
    s = np.asarray(array.service_times, dtype=float)
    x = phi * array.agg_rate * s
    bad = np.nonzero(x >= 1.0)[0]
    if bad.size:
        k = int(bad[0])
        raise SaturationError(x[k], node=f"queue {k + 1}")
    return phi, s, x


def objective(array, routing):
    """Mean response time of the array under the given routing."""
    phi, s, x = _arrays(array, routing)
    return float(np.sum(phi * s / (1.0 - x)))


def gradient(array, routing):
    """Per-fraction derivative of :func:`objective`.

    Component k is S_k/(1 - x_k) + phi_k*lambda*S_k^2/(1 - x_k)^2 with
    x_k = phi_k*lambda*S_k, the marginal residence cost of routing more
    traffic to queue k.
    """
    phi, s, x = _arrays(array, routing)
    denom = 1.0 - x
    g = s / denom + phi * array.agg_rate * s * s / (denom * denom)
    return tuple(float(v) for v in g)


def feasibility(array):
    """Whether any stable routing exists, plus the total capacity sum 1/S_k.

    Stability of some routing requires lambda strictly below the capacity.
    """
    capacity = math.fsum(1.0 / s for s in array.service_times)
    return Feasibility(array.agg_rate < capacity, capacity)


def _dual_derivative(phi, lam, s_f, s_s):
    # R'(phi) for the two-queue case; increasing in phi by convexity.
    return s_f / (1.0 - phi * lam * s_f) ** 2 - s_s / (
        1.0 - (1.0 - phi) * lam * s_s
    ) ** 2


def optimize_dual(agg_rate, fast, slow):
    """Optimal split between two queues by root-finding on the derivative.

    Returns the fraction routed to the first (``fast``) queue. The root is
    bracketed inside the interval where both queues stay stable; when the
    derivative does not change sign there, the optimum sits on the boundary
    (all traffic to one queue).
    """
    array = HeterogeneousArray((fast, slow), agg_rate)
    feas = feasibility(array)
    if not feas.feasible:
        raise InfeasibleError(agg_rate, feas.capacity)
    lam = agg_rate

    lo = 0.0 if lam * slow < 1.0 else 1.0 - 1.0 / (lam * slow)
    hi = 1.0 if lam * fast < 1.0 else 1.0 / (lam * fast)
    inset = (hi - lo) * 1e-12
    a = lo if lo == 0.0 else lo + inset
    b = hi if hi == 1.0 else hi - inset

    iterations = 0
    if _dual_derivative(a, lam, fast, slow) >= 0.0:
        phi = a
    elif _dual_derivative(b, lam, fast, slow) <= 0.0:
        phi = b
    else:
        phi, result = brentq(
            _dual_derivative, a, b, args=(lam, fast, slow),
            xtol=1e-15, full_output=True,
        )
        iterations = result.iterations
        if not result.converged:
            raise ConvergenceError("dual-queue root finding did not converge")

    routing = RoutingVector((phi, 1.0 - phi))
    return Optimum(routing, objective(array, routing), iterations, True)


def _project_simplex(v):
    # Euclidean projection onto {x >= 0, sum x = 1} (sort-based algorithm).
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u * idx > (css - 1.0))[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    # clamp: rounding in theta can push a lone coordinate a few ulp past 1
    return np.minimum(np.maximum(v - theta, 0.0), 1.0)


def _marginal_residual(phi, g):
    # KKT residual: active fractions share one marginal cost; inactive
    # fractions must not undercut it.
    active = phi > 0.0
    mu = g[active].mean()
    r = np.abs(g[active] - mu).max()
    if not active.all():
        r = max(r, max(0.0, (mu - g[~active]).max()))
    return float(r)


def _tie_average(phi, service_times):
    # Queues with identical service times receive identical fractions.
    groups = {}
    for k, s in enumerate(service_times):
        groups.setdefault(s, []).append(k)
    for members in groups.values():
        if len(members) > 1:
            phi[members] = phi[members].mean()
    return phi


def optimize_m(array):
    """Optimal routing for m queues via projected gradient descent.

    Seeded at phi_k proportional to 1/S_k (always stable when the array is
    feasible), with backtracking line search; trial points that leave the
    per-queue stability region are rejected during the search. Converged
    when the equal-marginal (KKT) residual drops below 1e-10; exceeding the
    iteration cap raises :class:`ConvergenceError` carrying the best point
    found so far.
    """
    feas = feasibility(array)
    if not feas.feasible:
        raise InfeasibleError(array.agg_rate, feas.capacity)

    lam = array.agg_rate
    s = np.asarray(array.service_times, dtype=float)
    m = s.size

    def f(phi):
        x = phi * lam * s
        return float(np.sum(phi * s / (1.0 - x)))

    def grad(phi):
        denom = 1.0 - phi * lam * s
        return s / denom + phi * lam * s * s / (denom * denom)

    def stable(phi):
        return bool(np.all(phi * lam * s <= 1.0 - STABILITY_MARGIN))

    phi = (1.0 / s) / np.sum(1.0 / s)
    fval = f(phi)
    g = grad(phi)
    step = 1.0
    recent = [fval]  # nonmonotone line-search memory
    iterations = 0
    converged = False

    for iterations in range(1, MAX_ITERATIONS + 1):
        if _marginal_residual(phi, g) < MARGINAL_TOL:
            converged = True
            iterations -= 1
            break

        # Backtracking line search from the spectral step. The sufficient
        # decrease test carries an absolute slack at the floating point
        # floor: near the optimum the true decrease per step falls below
        # the evaluation noise of f (gradient magnitude times coordinate
        # rounding in the projection), and without the slack the search
        # rejects every productive step.
        slack = 8.0 * np.finfo(float).eps * (abs(fval) + np.abs(g).sum())
        fref = max(recent)
        t = step
        accepted = False
        while t > 1e-20:
            trial = _project_simplex(phi - t * g)
            if stable(trial):
                ftrial = f(trial)
                if ftrial <= fref + 1e-4 * float(g @ (trial - phi)) + slack:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            break  # step underflow; residual re-checked below

        gtrial = grad(trial)
        dphi = trial - phi
        dg = gtrial - g
        phi, fval, g = trial, ftrial, gtrial
        recent.append(fval)
        if len(recent) > 10:
            recent.pop(0)

        # Barzilai-Borwein step for the next iteration: tracks the local
        # inverse curvature, which varies by orders of magnitude with load.
        ss = float(dphi @ dphi)
        sy = float(dphi @ dg)
        step = min(max(ss / sy, 1e-12), 1e8) if sy > 0.0 and ss > 0.0 else 1e2

    if not converged:
        g = grad(phi)
        converged = _marginal_residual(phi, g) < MARGINAL_TOL

    phi = _tie_average(phi, array.service_times)
    routing = RoutingVector(tuple(float(p) for p in phi))
    best = Optimum(routing, objective(array, routing), iterations, converged)
    if not converged:
        raise ConvergenceError(
            f"routing optimization did not converge within {iterations} "
            "iterations", best=best,
        )
    return best
