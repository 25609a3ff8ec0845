"""Numerical laboratory for von Neumann-type inequalities, Bohr radii and
isometric-dilation criteria on finite-dimensional complex Banach spaces."""

from .spaces import Leaf, NormTree, Sum, parse_space, sample_unit_sphere, vector_norm

__version__ = "0.1.0"

__all__ = ["Leaf", "Sum", "NormTree", "parse_space", "vector_norm", "sample_unit_sphere"]
