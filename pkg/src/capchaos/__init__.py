"""Excursion areas of random spherical eigenfunctions on caps: chaos analytics and Monte Carlo checks."""
from .chaos import (
    ChaosVarianceModel,
    ChaosVarianceReport,
    Cum4Breakdown,
    build_report,
    chaos_tail_bound,
    cum4_second_chaos,
    expected_area,
    j_coeff,
    var_first_chaos,
    var_second_chaos,
    wasserstein_bound,
)
from .config import parse_config
from .exceptions import AdmissibilityError, ConfigFileError, ConfigurationError, DomainError, TruncationWarning
from .field import FieldGrid, HarmonicCoefficients, evaluate, evaluate_cap_grid, sample_coefficients
from .harness import (
    ExperimentConfig,
    SummaryStats,
    clt_report,
    excursion_area,
    oracle_var2_quadrature,
    run_replicates,
    summarize,
)
from .mollifier import CapMollifier, MollifierSpec, epsilon_schedule, fourier_coefficients
from .wigner import clebsch_gordan, wigner_3j, wigner_6j, wigner_9j

__version__ = "0.1.0"
