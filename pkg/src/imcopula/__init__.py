"""Index-mixed copulas: exact evaluation, sampling, dependence measures and sum distributions."""
from .base_copulas import (
    EFGM,
    Capability,
    Clayton,
    Comonotone,
    Copula,
    Countermonotone,
    FiniteMixture,
    GaussianSampleOnly,
    Gumbel,
    Independence,
    ProductCopula,
    SurvivalCopula,
    rectangle_mass,
)
from .efgm import (
    BernoulliVectorLaw,
    EfgmParameters,
    bernoulli_from_thetas,
    efgm_admissible,
    efgm_cdf,
    efgm_density,
    efgm_mixture_cdf,
    efgm_sample,
    thetas_from_bernoulli,
)
from .dependence import (
    blomqvist_beta_multivariate,
    blomqvist_beta_pair,
    concordance_compare,
    concordance_integral,
    empirical_measures,
    kendall_tau_pair,
    multivariate_spearman,
    orthant_dependence_check,
    pair_measure_matrix,
    spearman_rho_pair,
    tail_dependence_matrix,
)
from .errors import CapabilityError, ConfigError, CopulaError, DimensionError, DomainError, EnumerationCapError
from .index_mixed import IndexMixedCopula, TrivariateMargin, check_exchangeable, make_index_mixed
from .index_model import (
    IndexDistribution,
    IndexPartition,
    OrderedClass,
    index_partition,
    index_predicates,
    marginal_index_probabilities,
    ordered_classes,
    sample_index,
)
from .sums import (
    Exponential,
    JointModel,
    PointMass,
    dkw_threshold,
    exp_sum_distribution,
    ks_distance,
    ls_transform,
    mc_sum_cdf,
)

__version__ = "0.1.0"
