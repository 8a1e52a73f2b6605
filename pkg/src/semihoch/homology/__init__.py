"""Hochschild homology of finite-dimensional convolution algebras."""

from .chains import (DEFAULT_RESOURCE_LIMIT, ChainSpaceIndex, DegreeData, HochschildComplex, HomologyReport,
                     betti, boundary, coboundary, cohomology_betti, face_map)
from .relative import (KAction, boundary_preserves_normalized, find_diagonal, mu_normalises_check,
                       normalized_subspace, product_of_diagonal, relative_betti, scalar_K_action,
                       shape_K_action, verify_diagonal)
from .splitting import (ConvolutionComplex, SplittingEngine, combine_homotopy, condition_T,
                        diag_subcomplex_betti, disintegration_check, free_homotopy, homotopy_identity,
                        mu_projection, pi_projection, rect_band_check, rect_band_homotopy, sigma_family,
                        sigma_norms, solve_homotopy, splitting_conditions, transfer_chain)
