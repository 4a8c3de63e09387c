"""Discrete exterior calculus and lowest-order finite element exterior calculus in 2D.

Both discretizations share one triangulation and one set of cochain degrees
of freedom; they differ only in the mass operators (diagonal circumcentric
Hodge stars versus Whitney-form Gram matrices).
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .mesh import Cochain, SimplicialComplex2, build_complex, coboundary, is_symmetric
from .geometry import (DualMeasures, MeshQualityReport, TriangleGeometry, classify_mesh,
                       delta_T, mesh_size, shape_constants, signed_dual_measures,
                       triangle_geometry)
from .whitney import de_rham_map, whitney_evaluate
from .delaunay import delaunay_triangulate
from .families import FamilySpec, generate_family
from .meshio import mesh_io, read_mesh, write_mesh
from .operators import (MassOperators, dec_hodge_star, feec_mass_matrix,
                        lumped_mass_and_star1_check, mass_matrix, scalar_stiffness)
from .norms import (NormReport, degenerate_pair_counterexample, inner_product,
                    ip_discrepancy_study, norm_equivalence_constants)
from .harmonic import HarmonicBasis, betti_numbers, harmonic_basis, hodge_decompose, pi_h_map
from .solver import (MixedSolution, StabilityReport, assemble_mixed_system, infsup_constant,
                     poincare_constant, solve_hodge_laplace)
from .report import StudyResult, emit_report
from .studies import StudyConfig, run_convergence_study, run_study
