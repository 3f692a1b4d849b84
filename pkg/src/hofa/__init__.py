"""Spectral quadratic Fourier analysis on finite abelian groups."""

__version__ = "0.1.0"

from .group import (GroupFunction, GroupSpec, enumerate_group, fourier_transform, inverse_fourier_transform,
                    mult_derivative, shift)
from .zmatrix import (ZMatrix, diagonal, diagonals, du_norm, from_diagonals, identity, l2_norm, ma_norm, matmul,
                      matmul_via_diagonals, matvec, outer, poly_apply, poly_plus)
from .fourier_ops import (InvariantOperator, RadialProfile, apply_K_eps, apply_K_r, average, averaging_operator,
                          denoise, denoising_residual, dual_function, lift, lift_outer, q_eps, q_eps_prime,
                          sharp_cutoff)
from .gowers import gowers_inner, gowers_product, poly_phase, u2_dual_norm, uk_norm, uk_norm_direct
from .spectral import (EigenDecomposition, SpectrumSlice, cluster_project, eigendecompose, gram_schmidt_quantitative,
                       hoffman_wielandt_gap, is_separated, is_theta_isolated, nearest_unitary, project,
                       pseudo_residual, quasiunitary_defect, spec_slice, subspace_distance)
from .characters import (fourier_structure, isolated_eigenvector_check, order1_certificate, quadratic_certificate,
                         stability_correspondence, weak_quadratic_certificate)
from .algorithms import (RngSeed, choose_rho, denoise_experiment, order_increment, quadratic_character_decomposition,
                         random_unit_vector, regularize_u3, regularize_u3_continuous)
