"""Pathwise solvers for reflected differential equations driven by fractional Brownian motion."""

from .coefficients import CoefficientSpec
from .fbm import FbmSpec, HolderReport, derive_seed, fbm_covariance, measure_regularity, sample_fbm
from .paths import (
    DiscretePath, Increment2, Increment3, UniformGrid, delta1, delta2, holder_norm,
    holder_norm_componentwise, read_path_csv, sup_norm, write_path_csv,
)
from .skorokhod import (
    CounterexampleReport, SkorokhodSolution, counterexample, lipschitz_check, regulator,
    regulator_holder_check, solve_skorokhod,
)
from .solver import (
    ConstantsLedger, ReflectedSolution, SolverConfig, SolverError, apriori_bound, direct_solve,
    local_uniqueness_check, picard_solve,
)
from .young import YoungBoundParams, refinement_defect, young_bound, young_integral

__version__ = "0.1.0"
