"""Exact computation of invariant curvature, torsion and inner torsion for
manifolds whose tangent frames are reduced to a matrix group."""
from .linalg import RatMatrix, Rational, Subspace, coset_reduce, contains, intersect, kernel, rref
from .tensors import TensorElement, TensorSpec, evaluate, lower_index, named_tensor, raise_index, symmetry_subspace
from .groups import GroupSpec, builtin, catalog, load_group, scalar_matrix_census, validate
from .equivariance import (
    InnerTorsionSolution,
    InvalidGroupError,
    InvariantSpaceResult,
    finite_constraint,
    g_valued_filter,
    infinitesimal_constraint,
    inner_torsion_space,
    invariant_tensors,
)

__version__ = "0.1.0"
