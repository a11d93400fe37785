"""Convergence-time bounds for local probabilistic evolutions.

Conductance computation, max-flow extraction of local stochastic matrices,
clocked lifted chains, and an empirical checker for the bound
``tau >= 1 / (8 * phi)`` over Markov chains, Cesaro averages, lifted walks
and coined quantum walks.
"""

from localmix.errors import (
    AxiomViolationError,
    CapacityExceededError,
    DegenerateConditioningError,
    InternalError,
    InvalidInputError,
    UnsupportedFamilyError,
)
from localmix.graphs import Graph, is_local, make_graph, neighborhood

__all__ = [
    "AxiomViolationError",
    "CapacityExceededError",
    "DegenerateConditioningError",
    "Graph",
    "InternalError",
    "InvalidInputError",
    "UnsupportedFamilyError",
    "is_local",
    "make_graph",
    "neighborhood",
]

__version__ = "0.1.0"
