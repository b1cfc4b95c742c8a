"""Spacetime ultraweak DPG solver for the 1D linear Schrodinger equation.

The package bundles a minimum-residual spacetime discretization with
per-element optimal test functions, a sine-eigenfunction reference
solver with exact norm formulas, manufactured solutions for rate
studies, and a batch harness emitting CSV convergence tables.
"""

from .dpg_core import (DpgSystem, SolveReport, Solution, assemble,
                       condition_estimate, element_matrices, l2_error, solve)
from .fe_spaces import BoundaryData, DofMap, build_dofmap, trace_dof_values
from .harness import (ConvergenceTable, StudyConfig, fit_rate, run_convergence,
                      run_interp_study, run_oracle)
from .mesh import Mesh, Skeleton, build_mesh, build_skeleton
from .physics import (ManufacturedCase, SchrodingerOperator, apply_operator,
                      case_from_derivatives, gaussian_case, wavepacket_case)
from .ref_element import (Basis, DofSet, QuadratureRule, dual_basis,
                          gauss_legendre_2d, interpolate)
from .spectral import (SpectralSolution, blowup_norms, counterexample_forcing,
                       counterexample_solution, duhamel, expand_forcing,
                       solution_from_forcing)

__version__ = "0.1.0"
