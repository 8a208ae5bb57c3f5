"""Differentiable surfel renderer on float64 NumPy arrays.

Camera, material and lights are passed as JSON strings in the same schema the
command-line tool reads.
"""

from ._core import Error, chamfer, estimate_normals, render, render_backward, version

__all__ = ["Error", "chamfer", "estimate_normals", "render", "render_backward", "version"]
__version__ = version()
