"""Grover-adaptive-search TSP solver on a gate-level statevector simulator."""

__version__ = "0.1.0"

from gqtsp.backends import HAVE_COMPILED, backend_name, get_backend
from gqtsp.circuit import Circuit, Gate, QubitLedger
from gqtsp.gas import (
    GasConfig,
    GqtspLayout,
    estimate_iterations,
    fixed_iteration_count,
    run_gqtsp,
)
from gqtsp.statevector import (
    StateVector,
    apply_circuit,
    apply_gate,
    basis_probability,
    new_state,
    sample,
)
from gqtsp.tsp import (
    TspGraph,
    brute_force_best,
    build_adjacency_lists,
    load_graph,
    normalize_phases,
    random_euclidean_graph,
    save_graph,
)

__all__ = [
    "HAVE_COMPILED", "backend_name", "get_backend",
    "Circuit", "Gate", "QubitLedger",
    "GasConfig", "GqtspLayout", "estimate_iterations",
    "fixed_iteration_count", "run_gqtsp",
    "StateVector", "apply_circuit", "apply_gate", "basis_probability",
    "new_state", "sample",
    "TspGraph", "brute_force_best", "build_adjacency_lists", "load_graph",
    "normalize_phases", "random_euclidean_graph", "save_graph",
    "__version__",
]
