"""Spectral solvers for one-dimensional pseudo-parabolic equations.

Legendre Galerkin (nodal and Shen-basis) and Chebyshev collocation
semidiscretizations with SDIRK time stepping, series reference solutions,
error measurement on Chebyshev evaluation grids, and a config-driven
experiment harness.
"""

from .grids import (GaussLobattoGrid, chebyshev_gl_grid, cheb_coeffs_to_nodal,
                    cheb_nodal_to_coeffs, diff_matrix, discrete_inner_product,
                    eval_orthopoly, eval_orthopoly_derivative, interpolant_eval,
                    legendre_gl_grid, nodal_basis_eval)
from .operators import (CollocationOperators, DenseSemidiscreteSystem,
                        GniOperators, ShenSystem, assemble_collocation,
                        assemble_gni_bbm, assemble_gni_general, bn_eigenvalues,
                        boundary_projector, shen_from_nodal, shen_matrices,
                        shen_reconstruct)
from .problems import (AffineDomainMap, PDEProblem, builtin_initial_data,
                       flux_burgers, flux_porous, lift_boundary,
                       map_to_reference)
from .series import (ManufacturedSolution, SineSeriesSolution,
                     TruncationBudgetError, builtin_series, decay_rate,
                     manufactured_problem1, manufactured_problem2,
                     pq_coefficients, pulse_coefficients,
                     sine_coefficients_numeric, tent_coefficients)
from .stepping import (ButcherTableau, EulerStepper, IntegrationResult,
                       NumericalError, SdirkStepper, StepperConfig,
                       forward_euler_step, integrate, sdirk_step,
                       ssp_timestep_bound, tableau_gamma_half,
                       tableau_third_order)
from .norms import ErrorReport, convergence_rates, error_norms, weighted_error_norms
from .harness import (ConfigError, ExperimentConfig, RunResult, check_goldens,
                      emit_csv, emit_plotdata, parse_config, registry_ids,
                      run_experiment, write_goldens)

__version__ = "0.1.0"

__all__ = [
    "GaussLobattoGrid", "chebyshev_gl_grid", "cheb_coeffs_to_nodal",
    "cheb_nodal_to_coeffs", "diff_matrix", "discrete_inner_product",
    "eval_orthopoly", "eval_orthopoly_derivative", "interpolant_eval",
    "legendre_gl_grid", "nodal_basis_eval",
    "CollocationOperators", "DenseSemidiscreteSystem", "GniOperators",
    "ShenSystem", "assemble_collocation", "assemble_gni_bbm",
    "assemble_gni_general", "bn_eigenvalues", "boundary_projector",
    "shen_from_nodal", "shen_matrices", "shen_reconstruct",
    "AffineDomainMap", "PDEProblem", "builtin_initial_data", "flux_burgers",
    "flux_porous", "lift_boundary", "map_to_reference",
    "ManufacturedSolution", "SineSeriesSolution", "TruncationBudgetError",
    "builtin_series", "decay_rate", "manufactured_problem1",
    "manufactured_problem2", "pq_coefficients", "pulse_coefficients",
    "sine_coefficients_numeric", "tent_coefficients",
    "ButcherTableau", "EulerStepper", "IntegrationResult", "NumericalError",
    "SdirkStepper", "StepperConfig", "forward_euler_step", "integrate",
    "sdirk_step", "ssp_timestep_bound", "tableau_gamma_half",
    "tableau_third_order",
    "ErrorReport", "convergence_rates", "error_norms", "weighted_error_norms",
    "ConfigError", "ExperimentConfig", "RunResult", "check_goldens",
    "emit_csv", "emit_plotdata", "parse_config", "registry_ids",
    "run_experiment", "write_goldens",
    "__version__",
]
