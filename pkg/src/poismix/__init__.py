"""Poisson-mixture lattice approximations of infinitely divisible laws.

A subordinator ``X`` with Levy measure ``M`` is approximated at scale ``a``
by ``a Z(X / (a gamma))``, a mixture of compound Poisson counts on the
lattice ``a Z``.  The package provides the lattice measures, exact pmfs,
samplers, error bounds and goodness-of-fit tooling.
"""
from ._backend import backend_name, set_backend
from .bounds import (
    BoundInputs,
    BoundReport,
    exact_kolmogorov,
    exact_kolmogorov_nvm,
    exact_lp,
    prop_no_r0,
    thm1_l1,
    thm1_linf,
    thm1_lp,
    thm2_lp,
    thm2_rate,
    thm3_bounds,
)
from .discretize import DiscretizedMeasure, build, ell_k, ell_plus, tabulate
from .errors import PoismixError
from .gof import GofResult, StudyConfig, cvm_test, emit_diagnostics, ks_test, run_table1, run_table2
from .inversion import InversionConfig, cdf_grid, invert_cdf
from .levy import RADEMACHER, UNIT_POISSON, BilateralSpec, Family, LevySpec, NuSpec
from .rng import RandomSource
from .samplers import (
    PmfTable,
    SampleBatch,
    acceptance_probabilities,
    pmf_recursive,
    sample_bilateral,
    sample_compound,
    sample_inverse,
    sample_nvm,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
