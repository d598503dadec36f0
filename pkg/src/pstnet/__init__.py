"""Perfect state transfer in XX spin networks."""

__version__ = "0.1.0"

from .classical import (
    HittingProfile,
    WalkGenerator,
    hitting_growth_profile,
    lumped_generator,
    lumped_hypercube_hitting,
    mean_hitting_time,
    occupation_generator,
    walk_generator,
)
from .dynamics import (
    ExcitationState,
    FidelitySeries,
    SpectralDecomposition,
    column_space_couplings,
    column_space_evolution_check,
    engineered_amplitude_closed_form,
    evolve_state,
    fidelity_scan,
    hypercube_amplitude,
    path_amplitude_closed_form,
    spectral_decompose,
    transfer_amplitude,
)
from .graphs import (
    ColumnPartition,
    Graph,
    cartesian_power,
    cartesian_product,
    column_partition,
    graph_distance,
    hypercube,
    parse_edge_list,
    path_graph,
    read_edge_list,
)
from .spins import (
    CouplingChain,
    FieldProfile,
    FullHamiltonian,
    chain_hamiltonian,
    engineered_couplings,
    full_hamiltonian,
    heisenberg_fields,
    total_sz,
    xx_subspace_hamiltonian,
)
from .transfer import (
    RationalityReport,
    TransferReport,
    communication_distance_report,
    find_pst_times,
    rationality_check,
    rationality_for,
    transfer_report,
)
