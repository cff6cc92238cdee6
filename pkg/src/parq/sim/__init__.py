"""Discrete-event simulation oracle for the analytic models."""

from .core import (
    Comparison,
    RoutedParallel,
    SimConfig,
    SimStats,
    active_backend,
    analytic_residence,
    compare_analytic,
    simulate,
)

__all__ = [
    "Comparison",
    "RoutedParallel",
    "SimConfig",
    "SimStats",
    "active_backend",
    "analytic_residence",
    "compare_analytic",
    "simulate",
]
