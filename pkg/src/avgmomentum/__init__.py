"""Average-case optimal first-order methods for random quadratics.

Builds the optimal momentum/step schedule for an expected spectral distribution,
compares it with Polyak momentum, and evaluates expected errors by quadrature or
Monte Carlo.
"""
from .errors import DomainError, NumericalError
from .experiments import (MonteCarloReport, QuadraticProblem, monte_carlo, problem_sampler,
                          sample_diagonal_problem, sample_wishart_problem)
from .methods import (IterationState, gradient_descent_coefficients, mp_closed_form, polyak_coefficients,
                      polyak_rate, run_method)
from .orthopoly import (MethodCoefficients, OrthonormalRecurrence, affine_map, b1_from_moments,
                        coefficients_from_recurrence, eval_residual, optimal_coefficients,
                        q_ratio_sequence, stieltjes, stieltjes_recurrence)
from .rates import ErrorSeries, asymptotic_rate, error_series, expected_error_integral, rate_recurrence
from .spectrum import (Quadrature, SpectralMeasure, build_quadrature, empirical_measure, integrate,
                       lambda_weighted, marchenko_pastur, uniform_measure)

__version__ = "0.1.0"

__all__ = [
    "DomainError", "NumericalError",
    "MonteCarloReport", "QuadraticProblem", "monte_carlo", "problem_sampler", "sample_diagonal_problem",
    "sample_wishart_problem",
    "IterationState", "gradient_descent_coefficients", "mp_closed_form", "polyak_coefficients", "polyak_rate",
    "run_method",
    "MethodCoefficients", "OrthonormalRecurrence", "affine_map", "b1_from_moments", "coefficients_from_recurrence",
    "eval_residual", "optimal_coefficients", "q_ratio_sequence", "stieltjes", "stieltjes_recurrence",
    "ErrorSeries", "asymptotic_rate", "error_series", "expected_error_integral", "rate_recurrence",
    "Quadrature", "SpectralMeasure", "build_quadrature", "empirical_measure", "integrate", "lambda_weighted",
    "marchenko_pastur", "uniform_measure",
]
