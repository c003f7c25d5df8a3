"""spinbound: spin-energy operator inequalities on Heisenberg-coupled qubit graphs.

The library builds singlet-projector operators in magnetization sectors,
certifies bounds of the form  deltaS^2 <= c * deltaH/4J  by smallest
eigenvalues, evaluates exact closed-form constants for lattices, optimizes
per-path weights to tighten the constant, and compares against the
coupling-spectrum (weak-homogeneity) bound.
"""

__version__ = "0.1.0"

from .graphs import (
    Graph,
    LatticeSpec,
    Path,
    build_lattice,
    canonical_lattice_path,
    diameter,
    distance,
    from_edge_list,
    shortest_path,
)
from .operators import (
    SectorBasis,
    StateVector,
    delta_hamiltonian,
    delta_spin_squared,
    magnon_state,
    max_spin_squared,
    multiplet_multiplicity,
    sector_basis,
    singlet_projector,
    spin_deficit_levels,
)
from .spectral import (
    Certificate,
    ConvergenceError,
    PencilResult,
    certify_inequality,
    joint_spectrum,
    min_eigenvalue,
    optimal_constant,
)
from .bounds import (
    BoundSpec,
    ComparisonReport,
    CouplingMatrix,
    baerwinkel_bound,
    closed_form_constant,
    compare_bounds,
    coupling_matrix,
    diameter_constant,
    gauge_weak_homogeneity,
    generic_constant,
    lattice_coupling_eigenvalues,
    open_constant,
    open_leading_term,
    periodic_constant,
    periodic_leading_term,
    three_qubit_eigenvalues,
    three_qubit_psd,
)
from .weights import (
    LoadMap,
    OptimizeParams,
    OptimizeResult,
    WeightedAssignment,
    assignment_constant,
    optimize_weights,
    uniform_assignment,
)
from .io import (
    export_operator,
    load_edge_list,
    parse_edge_list,
    read_matrix_market,
    write_matrix_market,
    write_state_vector,
)

__all__ = [name for name in dir() if not name.startswith("_")]
