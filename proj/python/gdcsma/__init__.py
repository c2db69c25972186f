"""Python bindings for the gdcsma core library."""

from ._core import (
    Graph,
    capacity_check,
    dependencies_matrix,
    empirical_dependencies,
    enumerate_schedules,
    matrix_norms,
    max_independent_set_size,
    min_vertex_cover_size,
    service_rates,
    simulate_occupancy,
    solve_prime,
    stationary_distribution,
    theorem5_run,
    verify_duality,
)

__all__ = [
    "Graph",
    "capacity_check",
    "dependencies_matrix",
    "empirical_dependencies",
    "enumerate_schedules",
    "matrix_norms",
    "max_independent_set_size",
    "min_vertex_cover_size",
    "service_rates",
    "simulate_occupancy",
    "solve_prime",
    "stationary_distribution",
    "theorem5_run",
    "verify_duality",
]
