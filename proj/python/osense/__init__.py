"""Operator learning for spin-1/2 Heisenberg systems from low-lying eigenstates."""

from ._osense import (
    Learner,
    crossover,
    lattice_graph,
    run_single,
    sample_er_graph,
    swap_automorphisms,
)

__all__ = [
    "Learner",
    "crossover",
    "lattice_graph",
    "run_single",
    "sample_er_graph",
    "swap_automorphisms",
]
