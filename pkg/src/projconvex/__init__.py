"""Properly convex real projective structures: projective primitives, convex bodies,
Hilbert metric, characteristic functions, reflection groups and developing maps."""

from .errors import ProjConvexError

__version__ = "0.1.0"

__all__ = ["ProjConvexError", "__version__"]
