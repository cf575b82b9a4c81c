"""Phase retrieval for the Schrodinger equation on finite graphs."""

from .errors import (
    CounterexampleError,
    DimensionError,
    EigensolverError,
    GraphaseError,
    GraphError,
    IdentifiabilityError,
    IllConditionedError,
)
from .graph import Graph, Hamiltonian, build_hamiltonian, connected_components, is_connected
from .spectral import (
    EigenSystem,
    SpectrumReport,
    SupportGraph,
    check_dissociated,
    check_property_s,
    eigendecompose,
    spectrum_report,
    support_graph,
)
from .evolution import (
    CoefficientVector,
    IntensityTrace,
    default_times,
    evolve,
    evolve_direct,
    from_coefficients,
    resolving_times,
    sample_intensity,
    to_coefficients,
)
from .retrieval import (
    CrossTermTensor,
    RetrievalResult,
    phase_aligned_distance,
    reconstruct,
    recover_cross_terms,
    retrieve,
)
from .counterexamples import (
    EqualModulusPair,
    complete_graph_pair,
    disconnected_phase_family,
    incomplete_support_counterexample,
    orthogonalize_pair,
)
from .experiments import TrialConfig, TrialStats, run_trials, sample_gnp

__version__ = "0.1.0"
