"""2-Opt for the metric TSP: local search, exact baselines, the tight
sqrt(n/2) lower-bound family and a packing certificate for the upper bound."""
from .certificate import (
    CertificateError,
    CertificateReport,
    CircleEmbedding,
    Diamond,
    certify,
    circle_metric,
    diamond_area,
    diamonds_disjoint,
    embed,
    estimate_diamond_area,
    invariance_check,
    rebase_embedding,
)
from .exact import SolverLimitError, SolverLimits, brute_force_opt, held_karp_opt
from .generators import (
    RandomFamilySpec,
    SectionedInstance,
    metric_closure,
    paper_lower_bound,
    random_euclidean,
    random_metric_closure,
)
from .instance import (
    EXACT,
    FLOAT,
    Instance,
    InstanceError,
    Tour,
    TourError,
    check_metric,
    make_tour,
    parse_instance,
    parse_tour,
    same_cycle,
    tour_length,
    write_instance,
    write_tour,
)
from .twoopt import (
    MoveError,
    ScanPolicy,
    TwoChange,
    apply_two_change,
    find_improving,
    gain,
    is_two_optimal,
    run_two_opt,
)

__version__ = "0.1.0"
