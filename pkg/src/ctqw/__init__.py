"""Continuous-time quantum walks on graphs.

Computes transition and mixing matrices, decides perfect state transfer (with
exact certificates on integral spectra), lifts transfer through weighted
equitable quotients, analyses uniform mixing in association schemes, and
builds average mixing matrices with their positivity structure.
"""

__version__ = "0.1.0"

from .avgmix import (
    AvgMixingAnalysis,
    CPFactorization,
    DistributionSpec,
    average_mixing,
    cp_factorize,
    distribution_average,
    drg_rank_probe,
    interval_average,
)
from .errors import (
    ConsistencyError,
    FormatError,
    NotApplicableError,
    NotDistanceRegularError,
    ToolkitError,
)
from .graphs import (
    Graph,
    GraphStats,
    build_family,
    cartesian_product,
    complete,
    compressed_q4,
    cycle,
    format_edge_list,
    hadamard_graph,
    hypercube,
    load_graph,
    parse_edge_list,
    path,
    stats,
)
from .quotient import (
    Partition,
    QuotientResult,
    coarsest_equitable,
    distance_partition,
    is_equitable,
    lift_pst,
    quotient,
)
from .scheme import (
    SchemeData,
    hadamard_lambda2,
    is_scaled_J,
    mixing_eigenvalues,
    roots_of_unity_probe,
    scheme_from_drg,
    uniform_mixing_scan,
    uniform_mixing_test,
)
from .spectral import SpectralDecomposition, decompose, eigenvalue_support
from .transfer import (
    PSTResult,
    StrongCospectralResult,
    check_bounds,
    cospectral,
    detect_pst,
    integer_pst_criterion,
    no_pst_support_test,
    pgst_scan,
    strong_cospectral,
)
from .walk import MixingMatrix, TransitionMatrix, fidelity, mixing, transition
