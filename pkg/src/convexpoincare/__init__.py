"""Sharp Poincare-Sobolev constants of convex sets: computation and checks."""
from .geometry import ConvexPolygon, InnerParallelProfile, ModelBody, inner_parallel, parallel_profile
from .profile1d import ExponentPair, DiscreteProfile, solve_pi_pq, solve_a_pq, rayleigh_1d
from .mesh import TriMesh, triangulate, refine
from .pde import MeshField, EigEstimate, SolverOptions, solve_lambda_pq, rayleigh_2d, polya_upper_bound
from .bounds import (polya_rhs, polya_check, cheeger_convex_2d, buser_check,
                     cheeger_lower_check, monotonicity_scan)
from .records import CheckRecord

__version__ = "0.1.0"
