"""Higher-order asymptotics of the parametric complexity for exponential families."""

__version__ = "0.1.0"

from .complexity import (
    ComplexityReport,
    Region,
    comp_approx,
    exact_comp_exponential,
    exact_comp_spherical,
    jeffreys_mean_corrections,
    jeffreys_volume,
    mc_validate_ac,
    overestimation,
)
from .errors import DegenerateMetricError, DerivativeOrderError, DomainError, ExpansionInvalidError
from .expansion import (
    ExpansionTerms,
    LogExpansion,
    amari_chentsov,
    expansion_terms,
    f1,
    f1_invariant,
    f1_tensor,
    f2,
    log_expansion,
)
from .family import (
    ExpFamily,
    cumulants,
    exponential_1d,
    fisher_metric,
    load_poly_partition,
    normal_known_var,
    poly_partition,
    spherical_normal,
)
from .hermite import hermite_number, hermite_rank4_explicit, hermite_rank6_explicit
from .tensors import Metric, SymTensor, metric_power_contract, tensor_get
