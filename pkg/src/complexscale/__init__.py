"""Complex scaling (analytic dilation) laboratory for Laplacians on ends and corners.

Modules
-------
profile     cutoff dilation profile, jets, dilated coefficients
geometry    cross-sections, radial grids, potentials, model descriptions
operators   finite-difference blocks of the dilated operators
linalg      dense eigensolver, linear solves, numerical range
spectral    ray prediction, classification, resonances, sectoriality
weyl        boundary Weyl sequences and commutator estimates
resolvent   analytic vectors and continued resolvent matrix elements
cli         JSON job configuration and command-line front-end
"""
from .errors import *  # noqa: F401,F403
from .geometry import (CornerModel, CornerPotential, CrossSectionSpectrum, CylinderModel,
                       HalfLineGrid, PotentialProfile, barrier_well, circle_cross_section,
                       gaussian_corner_well, gaussian_well, make_grid, zero_potential)
from .linalg import EigenResult, eig_dense, numerical_range_boundary, solve_linear
from .operators import (ModeOperator, assemble_channel_mode, assemble_corner_mode,
                        assemble_cyl_mode, conjugation_residual, discrete_dilation,
                        inverse_dilation)
from .profile import (DEFAULT_PROFILE, CutoffProfile, DilationParameter,
                      dilation_coefficients, in_gamma, psi_jet, theta_prime)
from .resolvent import (AnalyticVector, ContinuationTrace, continuation_scan, dilate_vector,
                        make_analytic_vector, matrix_element)
from .spectral import (RayFamily, classify_spectrum, detect_resonances, ichinose_sumcheck,
                       predict_essential, sector_search)
from .weyl import SingularSequenceSpec, build_bws, commutator_decay, defect_norm

__version__ = "0.1.0"
