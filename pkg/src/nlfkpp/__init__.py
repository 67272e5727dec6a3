"""Asymptotic solution machinery for the 1D nonlocal Fisher-KPP equation.

Layers, bottom up:

- `hermite`: Hermite polynomials/functions and closed-form Gaussian integrals.
- `model`: coefficient handles (growth rate, kernels, potentials) + ModelSpec.
- `grids`: uniform grids and sampled fields.
- `moments`: the closed moment system of order M and its special-case closed form.
- `germ`: the system in variations attached to a moment trajectory.
- `linearized`: the associated linear operator, residuals, expansion coefficients.
- `coherent`: trajectory-coherent states and assembled asymptotic solutions.
- `largetime`: homogeneous background + perturbation series, pattern onset.
- `direct`: method-of-lines solver for the full integro-differential equation.
- `acceptance`: the runnable acceptance suite (also behind `nlfkpp acceptance`).
- `cli`: config-driven command-line frontend.
"""

from .errors import (BlowupError, FocalPointError, NlfkppError,
                     TruncationError, WindowError)
from .grids import Field, FieldGrid, auto_grid
from .hermite import (gaussian_linear_integral, hermite_function,
                      hermite_gauss_integral, hermite_gauss_moment2,
                      hermite_poly)
from .model import (ModelSpec, callback_coefficient, callback_kernel,
                    constant_coefficient, constant_kernel,
                    cosine_gaussian_kernel, gaussian_kernel,
                    polynomial_coefficient)
from .moments import (EETrajectory, MomentState, SpecialCaseParams,
                      closed_form_m2, ee_rhs, integrate_ee, match_constants,
                      moments_of_field)
from .germ import (GermState, action_and_mass_factor, integrate_variations,
                   integrate_variations_from_lambda, lambda_x_on_trajectory,
                   phase_factor, q_ratio)
from .linearized import (AssociatedOperator, apply_operator, coeff_A,
                         coeff_lambda, expansion_coefficients,
                         residual_from_snapshots)
from .coherent import (AssembledSolution, CoherentState, assemble_solution,
                       dual_state, initial_moment_constants, state, vacuum)
from .largetime import (CoefficientSeries, LargeTimeParams, background,
                        chi, coefficient_asymptote, coefficients,
                        kernel_fourier, mode_count, scan_modes, u1_fourier,
                        u1_series, u2_correction)
from .direct import (SolveResult, solve_linear_associated,
                     solve_linear_perturbation, solve_nonlinear)

__version__ = "0.1.0"
